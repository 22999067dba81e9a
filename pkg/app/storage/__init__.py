from .datasets import load_csv, load_dataset, load_idx_images, load_idx_labels
from .results import FLOAT_FORMAT, ResultStorage, environment_fingerprint, load_manifest
