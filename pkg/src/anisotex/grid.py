"""Field samples on the grid ``{(k1/r, k2/r) : 0 <= k1, k2 <= r}`` and their file formats."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RAW_MAGIC = b"LAFBF01\n"


@dataclass
class FieldGrid:
    """A sampled field; ``values[k1, k2]`` is the value at ``(k1/r, k2/r)``."""

    r: int
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.r + 1, self.r + 1):
            raise ValueError(f"expected shape {(self.r + 1,) * 2}, got {self.values.shape}")

    @property
    def shape(self):
        return self.values.shape


def write_raw(path, values) -> None:
    """Raw format: magic, ASCII ``"<rows> <cols>\\n"``, then little-endian float64 row-major."""
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.ndim != 2:
        raise ValueError("raw files hold 2-D arrays")
    rows, cols = values.shape
    with open(path, "wb") as fh:
        fh.write(RAW_MAGIC)
        fh.write(f"{rows} {cols}\n".encode("ascii"))
        fh.write(values.tobytes(order="C"))


def read_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(len(RAW_MAGIC)) != RAW_MAGIC:
            raise ValueError(f"{path}: not a LAFBF01 raw field file")
        header = fh.readline().decode("ascii").split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed size header")
        rows, cols = int(header[0]), int(header[1])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} values, found {data.size}")
    return data.reshape(rows, cols).astype(float)


def to_image(values) -> np.ndarray:
    """Affine rescale to 0..255 (min -> 0, max -> 255), as uint8."""
    v = np.asarray(values, dtype=float)
    lo, hi = v.min(), v.max()
    if hi > lo:
        scaled = (v - lo) * (255.0 / (hi - lo))
    else:
        scaled = np.zeros_like(v)
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)


def write_pgm(path, field_grid: FieldGrid) -> None:
    """Binary P5 preview with x to the right and y upward."""
    img = to_image(field_grid.values).T[::-1]
    rows, cols = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    cols, rows, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(data[pos + 1:pos + 1 + rows * cols], dtype=np.uint8)
    return pixels.reshape(rows, cols)
