from pathlib import Path
from typing import Optional, Tuple
import logging
import struct

import numpy as np
import pandas as pd

from ..errors import DatasetFormatError
from ..models.experiment import DatasetFormat

logger = logging.getLogger(__name__)

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


def _read_idx(path: Path, expected_magic: int) -> np.ndarray:
    data = path.read_bytes()
    if len(data) < 4:
        raise DatasetFormatError(f"{path}: truncated file, no magic number at offset 0")
    (magic,) = struct.unpack(">I", data[:4])
    if magic != expected_magic:
        raise DatasetFormatError(
            f"{path}: magic number 0x{magic:08x} at offset 0, expected 0x{expected_magic:08x}"
        )

    n_dims = magic & 0xFF
    header_end = 4 + 4 * n_dims
    if len(data) < header_end:
        raise DatasetFormatError(f"{path}: truncated header, expected {n_dims} dimensions at offset 4")
    dims = struct.unpack(f">{n_dims}I", data[4:header_end])
    expected = int(np.prod(dims))
    payload = np.frombuffer(data, dtype=np.uint8, offset=header_end)
    if payload.size < expected:
        raise DatasetFormatError(
            f"{path}: truncated payload at offset {header_end}, expected {expected} bytes, got {payload.size}"
        )
    return payload[:expected].reshape(dims)


def load_idx_images(path) -> np.ndarray:
    """Images flattened row-major and scaled to [0, 1] by dividing by 255"""
    images = _read_idx(Path(path), IDX_IMAGES_MAGIC)
    return images.reshape(images.shape[0], -1).astype(float) / 255.0


def load_idx_labels(path) -> np.ndarray:
    return _read_idx(Path(path), IDX_LABELS_MAGIC).astype(int)


def load_csv(path, has_label: bool = True, header: bool = False) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Numeric CSV; the last column holds the label unless has_label is false"""
    path = Path(path)
    frame = pd.read_csv(path, header=0 if header else None, dtype=str, keep_default_na=False)
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().to_numpy()
    if bad.any():
        row, col = np.argwhere(bad)[0]
        line = row + (2 if header else 1)
        raise DatasetFormatError(
            f"{path}: non-numeric cell '{frame.iat[row, col]}' at line {line}, column {col + 1}"
        )
    values = numeric.to_numpy(dtype=float)
    if not has_label:
        return values, None
    if values.shape[1] < 2:
        raise DatasetFormatError(f"{path}: need at least one feature column and a label column")
    return values[:, :-1], values[:, -1]


def load_dataset(
    path,
    format: DatasetFormat = DatasetFormat.CSV,
    labels_path: Optional[str] = None,
    has_label: bool = True,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Load (X, y) from CSV or IDX files"""
    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"Dataset file not found: {path}")

    if DatasetFormat(format) == DatasetFormat.IDX:
        X = load_idx_images(path)
        y = load_idx_labels(labels_path) if labels_path else None
        if y is not None and y.shape[0] != X.shape[0]:
            raise DatasetFormatError(f"{labels_path}: {y.shape[0]} labels for {X.shape[0]} images")
    else:
        X, y = load_csv(path, has_label=has_label)
        if y is not None and np.all(y == np.round(y)):
            y = y.astype(int)

    logger.info(f"Loaded dataset {path}: {X.shape[0]} rows, {X.shape[1]} features")
    return X, y
