"""Little-endian binary reading with truncation diagnostics, shared by the container codecs."""

import struct
from typing import Any, Tuple

import numpy as np

from bubforge.engine.errors import FormatError


class BinaryReader:
    def __init__(self, data: bytes, source: str = "<bytes>") -> None:
        self.data = data
        self.offset = 0
        self.source = source

    @property
    def remaining(self) -> int:
        return len(self.data) - self.offset

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise FormatError(
                f"{self.source}: truncated file, expected {self.offset + n} bytes, got {len(self.data)}"
            )
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str) -> Tuple[Any, ...]:
        return struct.unpack("<" + fmt, self.take(struct.calcsize("<" + fmt)))

    def u8(self) -> int:
        return int(self.unpack("B")[0])

    def u16(self) -> int:
        return int(self.unpack("H")[0])

    def u32(self) -> int:
        return int(self.unpack("I")[0])

    def array(self, dtype: str, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        return np.frombuffer(self.take(size), dtype=dtype).copy()

    def expect_end(self) -> None:
        if self.remaining:
            raise FormatError(f"{self.source}: {self.remaining} unexpected trailing bytes")


def pack(fmt: str, *values: Any) -> bytes:
    return struct.pack("<" + fmt, *values)
