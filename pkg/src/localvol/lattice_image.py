"""Lattices, windows, bit-packed binary images and 2x2 configuration counts.

Images are stored as rows of 64-bit words. Row 0 is the lowest lattice row;
within a row, column ``j`` lives in bit ``j % 64`` of word ``j // 64``
(little-endian bit order). PBM files are MSB-first with the top row first, and
the conversion happens only at the I/O boundary.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import BinaryIO, Callable, Iterator

import numpy as np

from .config_algebra import CLASS_OF_INDEX

WORD = 64
WINDOW_SLACK = 1e-12
DEFAULT_BAND = 256

Indicator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Lattice:
    """Points ``a * R_v(z + c)`` for integer ``z``."""

    a: float
    c: tuple[float, float] = (0.0, 0.0)
    v: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"lattice spacing must be positive, got {self.a}")

    def points(self, i: np.ndarray, j: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Absolute coordinates of lattice point ``(i, j)`` (column, row)."""
        u = self.a * (np.asarray(i, dtype=float) + self.c[0])
        w = self.a * (np.asarray(j, dtype=float) + self.c[1])
        if self.v == 0.0:
            return u, w
        cv, sv = math.cos(self.v), math.sin(self.v)
        return cv * u - sv * w, sv * u + cv * w

    def coords(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Inverse of :meth:`points`, fractional lattice indices."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        cv, sv = math.cos(self.v), math.sin(self.v)
        u = cv * x + sv * y
        w = -sv * x + cv * y
        return u / self.a - self.c[0], w / self.a - self.c[1]


@dataclass(frozen=True)
class Window:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"window must have nonempty interior, got {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def corners(self) -> tuple[tuple[float, float], ...]:
        return ((self.x0, self.y0), (self.x1, self.y0), (self.x0, self.y1), (self.x1, self.y1))

    def contains(self, x: np.ndarray, y: np.ndarray, slack: float = WINDOW_SLACK) -> np.ndarray:
        return ((x >= self.x0 - slack) & (x <= self.x1 + slack)
                & (y >= self.y0 - slack) & (y <= self.y1 + slack))


# -- bit packing -------------------------------------------------------------------


def n_words(cols: int) -> int:
    return -(-cols // WORD)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D boolean array into little-endian 64-bit words per row."""
    bits = np.asarray(bits, dtype=bool)
    rows, cols = bits.shape
    nw = n_words(cols)
    padded = np.zeros((rows, nw * WORD), dtype=bool)
    padded[:, :cols] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols].astype(bool)


def _column_mask(cols: int, lo: int, hi: int) -> np.ndarray:
    """One row of words with bits ``lo <= j < hi`` set."""
    bits = np.zeros((1, cols), dtype=bool)
    bits[0, max(lo, 0):max(min(hi, cols), 0)] = True
    return pack_rows(bits)[0]


@dataclass
class BinaryImage:
    """Foreground bits of lattice points ``(origin[0] + col, origin[1] + row)``.

    ``window`` is the observation window used for minus-sampling; ``None``
    means every 2x2 cell of the grid is counted.
    """

    words: np.ndarray
    cols: int
    lattice: Lattice = Lattice(1.0)
    window: Window | None = None
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        self.words = np.asarray(self.words, dtype=np.uint64)
        if self.words.ndim != 2 or self.words.shape[1] != n_words(self.cols):
            raise ValueError(f"word array of shape {self.words.shape} does not fit {self.cols} columns")

    @property
    def rows(self) -> int:
        return self.words.shape[0]

    @classmethod
    def from_array(cls, bits: np.ndarray, lattice: Lattice = Lattice(1.0),
                   window: Window | None = None, origin: tuple[int, int] = (0, 0)) -> BinaryImage:
        """``bits[row, col]`` with row 0 the lowest lattice row."""
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("image must be 2-dimensional")
        return cls(pack_rows(bits), bits.shape[1], lattice, window, origin)

    def to_array(self) -> np.ndarray:
        return unpack_rows(self.words, self.cols)

    def complement(self) -> BinaryImage:
        bits = ~self.to_array()
        return BinaryImage.from_array(bits, self.lattice, self.window, self.origin)

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return (self.cols == other.cols and self.rows == other.rows
                and np.array_equal(self.to_array(), other.to_array()))


def digitize(indicator: Indicator, lattice: Lattice, window: Window) -> BinaryImage:
    """Sample a vectorized indicator ``indicator(x, y) -> bool array`` at every
    lattice point near the window.

    The grid covers the lattice bounding box of the window plus one cell on
    each side; minus-sampling later picks the cells that lie inside.
    """
    if window.width < lattice.a or window.height < lattice.a:
        raise ValueError(f"window {window} cannot hold a lattice cell of spacing {lattice.a}")
    cx, cy = zip(*window.corners)
    u, w = lattice.coords(np.array(cx), np.array(cy))
    i0, i1 = math.floor(u.min()) - 1, math.ceil(u.max()) + 1
    j0, j1 = math.floor(w.min()) - 1, math.ceil(w.max()) + 1
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1))
    x, y = lattice.points(ii, jj)
    bits = np.asarray(indicator(x, y), dtype=bool)
    return BinaryImage.from_array(bits, lattice, window, (i0, j0))


# -- configuration histogram ---------------------------------------------------------


@dataclass
class ConfigHistogram:
    """Counts ``n[l]`` of the 16 configurations over the counted cells."""

    n: np.ndarray

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=np.int64)
        if self.n.shape != (16,):
            raise ValueError("a configuration histogram has 16 bins")

    @property
    def n0(self) -> int:
        return int(self.n.sum())

    @property
    def class_counts(self) -> np.ndarray:
        """Counts N_1..N_6 aggregated over the configuration classes."""
        return np.bincount(CLASS_OF_INDEX, weights=self.n, minlength=7)[1:].astype(np.int64)

    def __add__(self, other: ConfigHistogram) -> ConfigHistogram:
        return ConfigHistogram(self.n + other.n)

    def __eq__(self, other):
        if not isinstance(other, ConfigHistogram):
            return NotImplemented
        return bool(np.array_equal(self.n, other.n))


def _right_neighbor(words: np.ndarray) -> np.ndarray:
    # bit j of the result is bit j + 1 of the row
    out = words >> np.uint64(1)
    out[:, :-1] |= words[:, 1:] << np.uint64(WORD - 1)
    return out


def band_counts(lower: np.ndarray, upper: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Configuration counts of the cells between two aligned stacks of rows.

    ``lower[k]`` and ``upper[k]`` are packed rows with ``upper[k]`` directly
    above ``lower[k]``; ``valid`` selects the cells (by lower-left column) that
    are counted and may be a single row broadcast over the band.
    """
    l0 = lower
    l1 = _right_neighbor(lower)
    u0 = upper
    u1 = _right_neighbor(upper)
    nl0, nl1, nu0, nu1 = ~l0, ~l1, ~u0, ~u1
    low = [nl0 & nl1 & valid, l0 & nl1 & valid, nl0 & l1 & valid, l0 & l1 & valid]
    up = [nu0 & nu1, u0 & nu1, nu0 & u1, u0 & u1]
    counts = np.zeros(16, dtype=np.int64)
    for q in range(4):
        for p in range(4):
            counts[p + 4 * q] = np.bitwise_count(low[p] & up[q]).sum(dtype=np.int64)
    return counts


def _minus_sampling_mask(lattice: Lattice, window: Window | None, origin: tuple[int, int],
                         cols: int) -> Callable[[np.ndarray], np.ndarray]:
    """Valid-cell mask words for given lattice rows (indexed from ``origin``)."""
    full = _column_mask(cols, 0, cols - 1)
    i0, j0 = origin
    if window is None:
        return lambda rows: full[None, :]

    if lattice.v == 0.0:
        a, (cx, cy) = lattice.a, lattice.c
        s = WINDOW_SLACK
        lo = math.ceil((window.x0 - s) / a - cx) - i0
        hi = math.floor((window.x1 + s) / a - cx - 1) - i0 + 1
        row_mask = full & _column_mask(cols, lo, hi)
        none = np.zeros_like(full)

        def axis_mask(rows: np.ndarray) -> np.ndarray:
            y_lo = a * (rows + j0 + cy)
            ok = (y_lo >= window.y0 - s) & (y_lo + a <= window.y1 + s)
            return np.where(ok[:, None], row_mask[None, :], none[None, :])

        return axis_mask

    def rotated_mask(rows: np.ndarray) -> np.ndarray:
        ii = np.arange(cols - 1) + i0
        ok = np.ones((len(rows), cols - 1), dtype=bool)
        for di, dj in ((0, 0), (1, 0), (0, 1), (1, 1)):
            x, y = lattice.points(ii[None, :] + di, rows[:, None] + j0 + dj)
            ok &= window.contains(x, y)
        padded = np.zeros((len(rows), cols), dtype=bool)
        padded[:, :cols - 1] = ok
        return pack_rows(padded)

    return rotated_mask


class HistogramAccumulator:
    """Streaming two-row configuration counter.

    Feed bands of packed rows with :meth:`push`; only the last row of each
    band is retained between calls. With ``top_down`` the rows arrive from the
    highest lattice row downwards (PBM order) and ``rows`` must be given.
    """

    def __init__(self, cols: int, lattice: Lattice = Lattice(1.0), window: Window | None = None,
                 origin: tuple[int, int] = (0, 0), top_down: bool = False, rows: int | None = None):
        if top_down and rows is None:
            raise ValueError("top-down streaming needs the total row count")
        self.cols = cols
        self.top_down = top_down
        self._mask = _minus_sampling_mask(lattice, window, origin, cols)
        self._carry: np.ndarray | None = None
        self._next_row = rows - 1 if top_down else 0
        self.counts = np.zeros(16, dtype=np.int64)

    def push(self, band: np.ndarray) -> None:
        band = np.asarray(band, dtype=np.uint64)
        if band.shape[0] == 0:
            return
        step = -1 if self.top_down else 1
        if self._carry is None:
            first_row = self._next_row
            stack = band
        else:
            first_row = self._next_row - step
            stack = np.concatenate([self._carry, band])
        self._next_row += step * band.shape[0]
        self._carry = stack[-1:].copy()
        if stack.shape[0] < 2:
            return
        if self.top_down:
            upper, lower = stack[:-1], stack[1:]
            lower_rows = first_row - 1 - np.arange(stack.shape[0] - 1)
        else:
            lower, upper = stack[:-1], stack[1:]
            lower_rows = first_row + np.arange(stack.shape[0] - 1)
        self.counts += band_counts(lower, upper, self._mask(lower_rows))

    def result(self) -> ConfigHistogram:
        return ConfigHistogram(self.counts.copy())


def config_histogram(image: BinaryImage, band_rows: int = DEFAULT_BAND) -> ConfigHistogram:
    """Count the 2x2 configurations of every cell whose lower-left lattice
    point is minus-sampled by the image window (all cells when it has none)."""
    if image.rows < 2 or image.cols < 2:
        raise ValueError(f"need at least 2x2 lattice points, got {image.rows}x{image.cols}")
    acc = HistogramAccumulator(image.cols, image.lattice, image.window, image.origin)
    for start in range(0, image.rows, band_rows):
        acc.push(image.words[start:start + band_rows])
    return acc.result()


# -- PBM (P4) -----------------------------------------------------------------------


class PBMParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


_WS = b" \t\n\r\x0b\x0c"


def _read_header(read1: Callable[[], bytes]) -> tuple[int, int, int]:
    """Parse ``P4 <width> <height>`` from a byte source; returns width, height, payload offset."""
    pos = 0

    def next_byte() -> bytes:
        nonlocal pos
        ch = read1()
        pos += len(ch)
        return ch

    magic = next_byte() + next_byte()
    if magic != b"P4":
        raise PBMParseError(f"expected magic b'P4', got {magic!r}", 0)
    fields = []
    ch = next_byte()
    while len(fields) < 2:
        if not ch:
            raise PBMParseError("truncated header", pos)
        if ch == b"#":
            while ch and ch not in b"\n\r":
                ch = next_byte()
            continue
        if ch in _WS:
            ch = next_byte()
            continue
        if not ch.isdigit():
            raise PBMParseError(f"unexpected byte {ch!r} in header", pos - 1)
        start = pos - 1
        token = b""
        while ch and ch.isdigit():
            token += ch
            ch = next_byte()
        fields.append((int(token), start))
        if not ch:
            raise PBMParseError("truncated header", pos)
        if ch not in _WS:
            raise PBMParseError(f"unexpected byte {ch!r} in header", pos - 1)
        if len(fields) < 2:
            ch = next_byte()
    (width, wpos), (height, hpos) = fields
    if width <= 0:
        raise PBMParseError(f"width must be positive, got {width}", wpos)
    if height <= 0:
        raise PBMParseError(f"height must be positive, got {height}", hpos)
    return width, height, pos


def _pbm_rows_to_words(raw: np.ndarray, width: int) -> np.ndarray:
    bits = np.unpackbits(raw, axis=1, bitorder="big")[:, :width]
    return pack_rows(bits.astype(bool))


def iter_pbm_bands(stream: BinaryIO, band_rows: int = DEFAULT_BAND
                   ) -> tuple[int, int, Iterator[np.ndarray]]:
    """Header of a P4 stream plus an iterator of packed row bands, top row first."""
    width, height, offset = _read_header(lambda: stream.read(1))
    row_bytes = -(-width // 8)

    def bands() -> Iterator[np.ndarray]:
        pos = offset
        for start in range(0, height, band_rows):
            k = min(band_rows, height - start)
            chunk = stream.read(k * row_bytes)
            if len(chunk) < k * row_bytes:
                raise PBMParseError(
                    f"truncated payload: expected {height * row_bytes} bytes", pos + len(chunk))
            pos += len(chunk)
            raw = np.frombuffer(chunk, dtype=np.uint8).reshape(k, row_bytes)
            yield _pbm_rows_to_words(raw, width)

    return width, height, bands()


def read_pbm(data: bytes, lattice: Lattice = Lattice(1.0), window: Window | None = None) -> BinaryImage:
    """Decode a binary PBM; bit 1 is foreground and the first file row is the top."""
    width, height, bands = iter_pbm_bands(io.BytesIO(data))
    words = np.concatenate(list(bands))
    return BinaryImage(words[::-1].copy(), width, lattice, window)


def write_pbm(image: BinaryImage) -> bytes:
    bits = image.to_array()[::-1]
    payload = np.packbits(bits, axis=1, bitorder="big")
    return f"P4\n{image.cols} {image.rows}\n".encode("ascii") + payload.tobytes()


def count_pbm(stream: BinaryIO, lattice: Lattice = Lattice(1.0), window: Window | None = None,
              band_rows: int = DEFAULT_BAND) -> tuple[ConfigHistogram, int, int]:
    """Stream a P4 file through the counter without holding the whole raster.

    Returns the histogram and the image width and height.
    """
    width, height, bands = iter_pbm_bands(stream, band_rows)
    if width < 2 or height < 2:
        raise ValueError(f"need at least 2x2 lattice points, got {height}x{width}")
    acc = HistogramAccumulator(width, lattice, window, top_down=True, rows=height)
    for band in bands:
        acc.push(band)
    return acc.result(), width, height


