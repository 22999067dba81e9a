"""Data-collaboration analysis with kernel-based integration."""
__version__ = "0.2.0"
