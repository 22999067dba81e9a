from setuptools import setup, find_packages

setup(
    name="dc-kernel-integration",
    version="0.2.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "torch",
        "pydantic>=2",
        "pydantic-settings",
        "python-dotenv",
        "threadpoolctl"
    ],
    extras_require={
        "test": ["pytest"]
    },
    entry_points={
        "console_scripts": ["dc=app.main:main"]
    }
)
