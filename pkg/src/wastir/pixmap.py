"""Netpbm image IO plus the 16-bit biased container for stego output.

Covers and secrets are plain 8-bit Netpbm images (P2/P3 ASCII, P5/P6
binary, maxval up to 255). Stego output lives in a signed "translated"
domain whose samples can be negative or exceed 255, so it is stored in
its own container: a Netpbm P5/P6 raster with maxval 65535 where every
sample is biased by +512 and written as a big-endian 16-bit word. The
bias is this tool's own convention; standard viewers can still open the
file. Reading recovers the signed values exactly.
"""

from dataclasses import dataclass

import numpy as np

STEGO_BIAS = 512
STEGO_MAXVAL = 65535
STEGO_MIN_SAMPLE = -STEGO_BIAS
STEGO_MAX_SAMPLE = STEGO_MAXVAL - STEGO_BIAS

_WHITESPACE = b" \t\n\r\x0b\x0c"
_GRAY_MAGICS = (b"P2", b"P5")
_COLOR_MAGICS = (b"P3", b"P6")
_ASCII_MAGICS = (b"P2", b"P3")


class PixmapError(ValueError):
    """Malformed or unsupported Netpbm data."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale plane; ``pixels`` has shape (height, width), dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise PixmapError("gray image requires a 2D pixel array")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise PixmapError("zero dimension")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer):
                raise PixmapError("pixel samples must be integers")
            if px.size and (px.min() < 0 or px.max() > 255):
                raise PixmapError("pixel sample outside [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class ColorImage:
    """Three 8-bit planes (R, G, B) of identical dimensions."""

    planes: tuple

    def __post_init__(self):
        planes = tuple(self.planes)
        if len(planes) != 3 or not all(isinstance(p, GrayImage) for p in planes):
            raise PixmapError("color image requires exactly 3 gray planes")
        shape = planes[0].pixels.shape
        if any(p.pixels.shape != shape for p in planes):
            raise PixmapError("color planes differ in dimensions")
        object.__setattr__(self, "planes", planes)

    @property
    def width(self) -> int:
        return self.planes[0].width

    @property
    def height(self) -> int:
        return self.planes[0].height

    def __eq__(self, other):
        if not isinstance(other, ColorImage):
            return NotImplemented
        return all(a == b for a, b in zip(self.planes, other.planes))


@dataclass(frozen=True, eq=False)
class StegoContainer:
    """Signed translated-domain raster, 1 or 3 planes, fixed bias 512.

    Planes are 2D int64 arrays of identical even dimensions; every sample v
    satisfies -512 <= v <= 65023 so that v + 512 fits an unsigned 16-bit word.
    """

    planes: tuple

    bias = STEGO_BIAS

    def __post_init__(self):
        planes = tuple(np.asarray(p, dtype=np.int64) for p in self.planes)
        if len(planes) not in (1, 3):
            raise PixmapError("stego container requires 1 or 3 planes")
        shape = planes[0].shape
        if len(shape) != 2 or any(p.shape != shape for p in planes):
            raise PixmapError("stego planes must be 2D and share dimensions")
        if shape[0] == 0 or shape[1] == 0:
            raise PixmapError("zero dimension")
        if shape[0] % 2 or shape[1] % 2:
            raise PixmapError("stego dimensions must be even")
        for p in planes:
            if p.min() < STEGO_MIN_SAMPLE or p.max() > STEGO_MAX_SAMPLE:
                raise PixmapError(
                    "stego sample outside [%d, %d]" % (STEGO_MIN_SAMPLE, STEGO_MAX_SAMPLE)
                )
        object.__setattr__(self, "planes", planes)

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def channel_count(self) -> int:
        return len(self.planes)

    def __eq__(self, other):
        if not isinstance(other, StegoContainer):
            return NotImplemented
        return len(self.planes) == len(other.planes) and all(
            np.array_equal(a, b) for a, b in zip(self.planes, other.planes)
        )


class _Scanner:
    """Token reader for Netpbm headers: whitespace-separated tokens,
    '#' comments running to end of line."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def token(self) -> bytes:
        d, n = self.data, len(self.data)
        i = self.pos
        while i < n:
            c = d[i]
            if c == 0x23:  # '#'
                while i < n and d[i] not in (0x0A, 0x0D):
                    i += 1
            elif c in _WHITESPACE:
                i += 1
            else:
                break
        if i >= n:
            raise PixmapError("malformed header: unexpected end of data")
        j = i
        while j < n and d[j] not in _WHITESPACE and d[j] != 0x23:
            j += 1
        self.pos = j
        return d[i:j]

    def int_token(self, what: str) -> int:
        tok = self.token()
        try:
            return int(tok)
        except ValueError:
            raise PixmapError("malformed header: bad %s %r" % (what, tok)) from None

    def binary_raster(self) -> bytes:
        # Exactly one whitespace byte separates the maxval from a binary raster.
        if self.pos >= len(self.data) or self.data[self.pos] not in _WHITESPACE:
            raise PixmapError("malformed header: missing raster separator")
        return self.data[self.pos + 1 :]


def _read_header(scanner: _Scanner):
    magic = scanner.token()
    if magic not in _GRAY_MAGICS + _COLOR_MAGICS:
        raise PixmapError("unsupported magic %r" % magic)
    width = scanner.int_token("width")
    height = scanner.int_token("height")
    if width <= 0 or height <= 0:
        raise PixmapError("zero dimension")
    maxval = scanner.int_token("maxval")
    if maxval < 1:
        raise PixmapError("malformed header: maxval %d" % maxval)
    return magic, width, height, maxval


def _read_ascii_samples(scanner: _Scanner, count: int, maxval: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    for k in range(count):
        try:
            v = scanner.int_token("sample")
        except PixmapError:
            raise PixmapError("truncated raster") from None
        if v < 0 or v > maxval:
            raise PixmapError("sample %d outside [0, %d]" % (v, maxval))
        out[k] = v
    return out


def read_pixmap(data: bytes):
    """Decode a PGM/PPM byte string into a GrayImage or ColorImage.

    Accepts P2/P5 (gray) and P3/P6 (color) with maxval <= 255. Comments are
    skipped per Netpbm rules. Raises PixmapError on malformed input.
    """
    scanner = _Scanner(data)
    magic, width, height, maxval = _read_header(scanner)
    if maxval > 255:
        raise PixmapError("maxval %d unsupported here; images must be 8-bit" % maxval)
    channels = 3 if magic in _COLOR_MAGICS else 1
    count = width * height * channels
    if magic in _ASCII_MAGICS:
        flat = _read_ascii_samples(scanner, count, maxval)
    else:
        raster = scanner.binary_raster()
        if len(raster) < count:
            raise PixmapError("truncated raster")
        flat = np.frombuffer(raster[:count], dtype=np.uint8).astype(np.int64)
    if channels == 1:
        return GrayImage(flat.reshape(height, width))
    rgb = flat.reshape(height, width, 3)
    return ColorImage(tuple(GrayImage(rgb[:, :, c]) for c in range(3)))


def _ascii_raster(rows: np.ndarray) -> bytes:
    lines = [" ".join(str(int(v)) for v in row) for row in rows]
    return ("\n".join(lines) + "\n").encode("ascii")


def write_pixmap(img, ascii: bool = False) -> bytes:
    """Serialize an image to canonical Netpbm bytes (binary P5/P6 by default)."""
    if isinstance(img, GrayImage):
        header = b"%s\n%d %d\n255\n" % (b"P2" if ascii else b"P5", img.width, img.height)
        if ascii:
            return header + _ascii_raster(img.pixels)
        return header + img.pixels.tobytes()
    if isinstance(img, ColorImage):
        header = b"%s\n%d %d\n255\n" % (b"P3" if ascii else b"P6", img.width, img.height)
        rgb = np.stack([p.pixels for p in img.planes], axis=-1)
        if ascii:
            return header + _ascii_raster(rgb.reshape(img.height, img.width * 3))
        return header + rgb.tobytes()
    raise PixmapError("expected GrayImage or ColorImage, got %r" % type(img).__name__)


def read_stego(data: bytes) -> StegoContainer:
    """Decode a stego container: P5/P6, maxval 65535, big-endian samples,
    each stored value carrying the fixed +512 bias."""
    scanner = _Scanner(data)
    magic, width, height, maxval = _read_header(scanner)
    if magic in _ASCII_MAGICS:
        raise PixmapError("stego container must be binary P5 or P6")
    if maxval != STEGO_MAXVAL:
        raise PixmapError("stego container requires maxval %d, got %d" % (STEGO_MAXVAL, maxval))
    if width % 2 or height % 2:
        raise PixmapError("stego dimensions must be even")
    channels = 3 if magic == b"P6" else 1
    count = width * height * channels
    raster = scanner.binary_raster()
    if len(raster) < 2 * count:
        raise PixmapError("truncated raster")
    stored = np.frombuffer(raster[: 2 * count], dtype=">u2").astype(np.int64)
    samples = stored - STEGO_BIAS
    if channels == 1:
        return StegoContainer((samples.reshape(height, width),))
    rgb = samples.reshape(height, width, 3)
    return StegoContainer(tuple(rgb[:, :, c] for c in range(3)))


def read_auto(data: bytes):
    """Decode either an 8-bit pixmap or a 16-bit stego container, by maxval."""
    scanner = _Scanner(data)
    _, _, _, maxval = _read_header(scanner)
    if maxval == STEGO_MAXVAL:
        return read_stego(data)
    return read_pixmap(data)


def write_stego(container: StegoContainer) -> bytes:
    """Serialize a stego container; read_stego(write_stego(c)) == c bit-exactly."""
    magic = b"P5" if container.channel_count == 1 else b"P6"
    header = b"%s\n# WASTIR bias=%d\n%d %d\n%d\n" % (
        magic,
        STEGO_BIAS,
        container.width,
        container.height,
        STEGO_MAXVAL,
    )
    if container.channel_count == 1:
        stored = container.planes[0] + STEGO_BIAS
    else:
        stored = np.stack(container.planes, axis=-1) + STEGO_BIAS
    return header + stored.astype(">u2").tobytes()
