"""
BUBDB1 container.

Layout (little-endian): magic ``BUBDB1\\0\\0``, u32 version, u32 count, u16 side, u8 channels,
u8 flags, then ``count`` fixed-stride records of 4 x f32 features ``[E, phi, psi, m]``,
``side * side * channels`` patch bytes (intensity x 255, row-major) and ``side * side`` mask
bytes (0/1). Flag bit 0 marks a training corpus; with bit 1 set a u32-length JSON trailer
holding the seed and config hash follows the records.
"""

import json
from pathlib import Path
from typing import Union

import numpy as np

from bubforge.engine.binio import BinaryReader, pack
from bubforge.engine.bubdb.database import BubbleDb
from bubforge.engine.errors import FormatError, ValidationError
from bubforge.engine.features.feature_vector import FeatureVector
from bubforge.engine.imgproc.codecs import quantize
from bubforge.engine.models.bubble_record import BubbleRecord

MAGIC = b"BUBDB1\x00\x00"
VERSION = 1
HEADER_SIZE = len(MAGIC) + 12
FLAG_CORPUS = 0x01
FLAG_TRAILER = 0x02


def record_dtype(side: int, channels: int = 1) -> np.dtype:
    return np.dtype(
        [
            ("features", "<f4", (4,)),
            ("patch", "u1", (side * side * channels,)),
            ("mask", "u1", (side * side,)),
        ]
    )


def to_bytes(db: BubbleDb) -> bytes:
    flags = FLAG_TRAILER | (FLAG_CORPUS if db.is_corpus else 0)
    rows = np.zeros(len(db), dtype=record_dtype(db.side, db.channels))
    for i, r in enumerate(db.records):
        rows[i]["features"] = r.features.to_list()
        rows[i]["patch"] = quantize(r.patch).ravel()
        rows[i]["mask"] = r.mask.ravel()
    trailer = json.dumps({"seed": db.seed, "config_hash": db.config_hash}, sort_keys=True).encode("utf-8")
    return (
        MAGIC
        + pack("IIHBB", VERSION, len(db), db.side, db.channels, flags)
        + rows.tobytes()
        + pack("I", len(trailer))
        + trailer
    )


def save_db(db: BubbleDb, path: Union[str, Path]) -> None:
    Path(path).write_bytes(to_bytes(db))


def from_bytes(data: bytes, source: str = "<bytes>") -> BubbleDb:
    """
    Parses a BUBDB1 container and rebuilds the feature index.

    Raises:
        FormatError: On bad magic, unknown version, truncation, trailing bytes or records
            violating the feature ranges or mask encoding.
    """
    reader = BinaryReader(data, source)
    if reader.take(len(MAGIC)) != MAGIC:
        raise FormatError(f"{source}: not a BUBDB1 file (bad magic)")
    version, count, side, channels, flags = reader.unpack("IIHBB")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported BUBDB1 version {version}")
    if side == 0 or channels != 1:
        raise FormatError(f"{source}: unsupported record geometry side={side} channels={channels}")

    dtype = record_dtype(side, channels)
    expected = HEADER_SIZE + count * dtype.itemsize
    if len(data) < expected:
        raise FormatError(f"{source}: truncated file, expected {expected} bytes, got {len(data)}")
    rows = np.frombuffer(reader.take(count * dtype.itemsize), dtype=dtype)

    seed, config_hash = 0, ""
    if flags & FLAG_TRAILER:
        payload = reader.take(reader.u32())
        try:
            trailer = json.loads(payload.decode("utf-8"))
            seed, config_hash = int(trailer["seed"]), str(trailer["config_hash"])
        except (ValueError, KeyError, TypeError) as e:
            raise FormatError(f"{source}: malformed metadata trailer ({e})") from e
    reader.expect_end()

    records = []
    for i, row in enumerate(rows):
        if np.any(row["mask"] > 1):
            raise FormatError(f"{source}: record {i} mask holds values other than 0 and 1")
        try:
            features = FeatureVector(*(float(v) for v in row["features"]))
            record = BubbleRecord(
                patch=row["patch"].reshape(side, side).astype(np.float64) / 255.0,
                mask=row["mask"].reshape(side, side).astype(bool),
                features=features,
            )
        except ValidationError as e:
            raise FormatError(f"{source}: record {i} is invalid ({e})") from e
        records.append(record)

    return BubbleDb(
        records=records,
        side=side,
        channels=channels,
        is_corpus=bool(flags & FLAG_CORPUS),
        seed=seed,
        config_hash=config_hash,
    )


def load_db(path: Union[str, Path]) -> BubbleDb:
    path = Path(path)
    return from_bytes(path.read_bytes(), str(path))
