"""PGM (P5, 8-bit) and PBM (P4) codecs backed by Pillow."""

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from bubforge.engine.errors import FormatError
from bubforge.engine.imgproc.arrays import BitMask, Raster, as_mask, as_raster

PathLike = Union[str, Path]


def _open(path: PathLike, mode: str) -> Image.Image:
    try:
        with Image.open(path) as img:
            img.load()
            loaded = img.copy()
            fmt = img.format
    except FileNotFoundError:
        raise
    except (OSError, SyntaxError, ValueError) as e:
        raise FormatError(f"{path}: unreadable image ({e})") from e
    if fmt != "PPM" or loaded.mode != mode:
        raise FormatError(f"{path}: expected a portable {mode!r} image, got {fmt} {loaded.mode}")
    return loaded


def quantize(img: Raster) -> np.ndarray:
    """Intensities in [0, 1] to bytes, ``v -> round(255 v)``."""
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def read_pgm(path: PathLike) -> Raster:
    """Reads an 8-bit P5 PGM; intensity byte ``v`` maps to ``v / 255``."""
    img = _open(path, "L")
    return np.asarray(img, dtype=np.float64) / 255.0


def write_pgm(path: PathLike, img: Raster) -> None:
    Image.fromarray(quantize(as_raster(img))).save(path, format="PPM")


def read_pbm(path: PathLike) -> BitMask:
    """Reads a P4 PBM; a set bit (black) becomes ``True``."""
    img = _open(path, "1")
    return ~np.asarray(img, dtype=bool)


def write_pbm(path: PathLike, mask: BitMask) -> None:
    # Pillow's "1" mode stores white as True, PBM stores black as 1
    Image.fromarray(~as_mask(mask)).save(path, format="PPM")
