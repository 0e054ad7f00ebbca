"""Quaternary payload coding and the keyed mod-4 embed/extract pipeline.

Every payload byte becomes four base-4 digits (most significant first).
Two digits ride in each 2x2 block of the translated image: one in the
top-right sample (R01), one in the bottom-left (R10), with a key-derived
bit deciding which digit lands where. A sample is steered onto the wanted
residue mod 4 by the fixed rule

    diff = digit - floor_mod(old, 4)
    diff == 0  ->  unchanged
    diff  > 0  ->  old - (4 - diff)
    diff  < 0  ->  old + (4 + diff)

which never moves it by more than 3. The bottom-right sample (R11) then
absorbs the negated sum of both changes, so the block sum - and with it
the recoverable cover pixel - never moves.

Keying is deliberately simple and bit-exact across platforms: the key
string hashes to a 64-bit seed with FNV-1a, and each block index mixes
with the seed through a SplitMix64-style finalizer whose low bit picks
the digit order. Blocks are scanned row-major; color planes run R, G, B
with one continuous block index and one continuous digit stream.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .haar import TranslatedImage
from .pixmap import GrayImage, StegoContainer

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

FRAME_MAGIC = b"WSTR"
FRAME_VERSION = 1
FRAME_HEADER_BYTES = 16
FRAME_HEADER_DIGITS = 4 * FRAME_HEADER_BYTES
KIND_BYTES = 0
KIND_IMAGE = 1

MODE_FRAMED = "framed"
MODE_RAW = "raw"


class CapacityError(ValueError):
    """Payload needs more quaternary digits than the carrier offers."""

    def __init__(self, required_digits: int, available_digits: int):
        self.required_digits = required_digits
        self.available_digits = available_digits
        super().__init__(
            "payload needs %d digits but carrier offers %d"
            % (required_digits, available_digits)
        )


class PayloadError(ValueError):
    """Extraction cannot produce a payload (bad frame, wrong key, bad arguments)."""


@dataclass(frozen=True)
class KeyStream:
    """Deterministic per-block ordering bits derived from a secret key."""

    seed: int


def derive_keystream(key) -> KeyStream:
    """Hash a key (str or bytes, empty allowed) to a KeyStream via FNV-1a-64."""
    if isinstance(key, str):
        key = key.encode("utf-8")
    seed = _FNV_OFFSET
    for b in bytes(key):
        seed = ((seed ^ b) * _FNV_PRIME) & _MASK64
    return KeyStream(seed)


def order_bit(ks: KeyStream, block_index: int) -> int:
    """Ordering bit for one block: 0 puts the first digit in R01, 1 swaps.

    Pure function of (seed, index); blocks can be evaluated in any order.
    """
    z = (ks.seed + ((block_index + 1) * _GOLDEN)) & _MASK64
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return int(z & 1)


def _order_bits(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized order_bit over an array of block indices."""
    z = np.uint64(seed) + (indices.astype(np.uint64) + np.uint64(1)) * np.uint64(_GOLDEN)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_MIX1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_MIX2)
    z ^= z >> np.uint64(31)
    return (z & np.uint64(1)).astype(np.uint8)


def bytes_to_digits(payload) -> np.ndarray:
    """Expand bytes to base-4 digits, most significant pair of bits first."""
    b = np.frombuffer(bytes(payload), dtype=np.uint8)
    out = np.empty(4 * b.size, dtype=np.uint8)
    out[0::4] = b >> 6
    out[1::4] = (b >> 4) & 3
    out[2::4] = (b >> 2) & 3
    out[3::4] = b & 3
    return out


def digits_to_bytes(digits) -> bytes:
    """Pack base-4 digits (length divisible by 4) back into bytes."""
    d = np.asarray(digits)
    if d.size % 4:
        raise ValueError("digit count %d not divisible by 4" % d.size)
    if d.size and (d.min() < 0 or d.max() > 3):
        raise ValueError("digits must lie in [0, 3]")
    d = d.astype(np.uint8)
    packed = (d[0::4] << 6) | (d[1::4] << 4) | (d[2::4] << 2) | d[3::4]
    return packed.tobytes()


def embed_digit(old_value: int, digit: int) -> int:
    """Move one sample onto residue `digit` mod 4 by the fixed +-(4-|diff|) rule."""
    if not 0 <= digit <= 3:
        raise ValueError("digit must be in [0, 3]")
    diff = digit - (old_value % 4)
    if diff == 0:
        return old_value
    if diff > 0:
        return old_value - (4 - diff)
    return old_value + (4 + diff)


def _embed_digits(old: np.ndarray, digit: np.ndarray) -> np.ndarray:
    diff = digit - (old % 4)
    return np.where(diff == 0, old, np.where(diff > 0, old - (4 - diff), old + (4 + diff)))


@dataclass(frozen=True)
class Block:
    """One 2x2 mask of translated samples."""

    r00: int
    r01: int
    r10: int
    r11: int


def adjust_block(block: Block, delta01: int, delta10: int) -> Block:
    """Cancel the embedding deltas on R11 so the block sum is unchanged."""
    return Block(block.r00, block.r01, block.r10, block.r11 - (delta01 + delta10))


@dataclass(frozen=True)
class PayloadFrame:
    """A payload plus the way it is carried.

    Framed payloads are prefixed by a 16-byte header (64 digits): magic
    "WSTR", version, kind, 32-bit big-endian width and height, two zero
    bytes. kind 1 marks an 8-bit image whose dimensions are width x height;
    kind 0 marks opaque bytes, stored with width = byte count, height = 1.
    Raw payloads carry nothing but the bytes; the receiver must know the
    digit count out of band.
    """

    data: bytes
    mode: str = MODE_FRAMED
    kind: int = KIND_BYTES
    width: int = 0
    height: int = 0

    def __post_init__(self):
        if self.mode not in (MODE_FRAMED, MODE_RAW):
            raise ValueError("mode must be %r or %r" % (MODE_FRAMED, MODE_RAW))
        if self.mode == MODE_FRAMED:
            if self.kind not in (KIND_BYTES, KIND_IMAGE):
                raise ValueError("unknown payload kind %r" % (self.kind,))
            if self.width * self.height != len(self.data):
                raise ValueError("frame dimensions do not match payload size")

    @classmethod
    def raw(cls, data: bytes) -> "PayloadFrame":
        return cls(bytes(data), mode=MODE_RAW)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PayloadFrame":
        data = bytes(data)
        return cls(data, mode=MODE_FRAMED, kind=KIND_BYTES, width=len(data), height=1)

    @classmethod
    def from_image(cls, img: GrayImage) -> "PayloadFrame":
        return cls(
            img.pixels.tobytes(),
            mode=MODE_FRAMED,
            kind=KIND_IMAGE,
            width=img.width,
            height=img.height,
        )

    def header(self) -> bytes:
        if self.mode != MODE_FRAMED:
            raise ValueError("raw payloads have no header")
        return (
            FRAME_MAGIC
            + struct.pack(">BB", FRAME_VERSION, self.kind)
            + struct.pack(">II", self.width, self.height)
            + b"\x00\x00"
        )

    def to_digits(self) -> np.ndarray:
        if self.mode == MODE_RAW:
            return bytes_to_digits(self.data)
        return bytes_to_digits(self.header() + self.data)

    def digit_count(self) -> int:
        extra = FRAME_HEADER_DIGITS if self.mode == MODE_FRAMED else 0
        return 4 * len(self.data) + extra


def _parse_frame_header(header: bytes):
    if len(header) != FRAME_HEADER_BYTES or header[:4] != FRAME_MAGIC:
        raise PayloadError("no WASTIR payload found (wrong key or not a framed stego)")
    version, kind = header[4], header[5]
    if version != FRAME_VERSION:
        raise PayloadError("unsupported payload frame version %d (wrong key?)" % version)
    if kind not in (KIND_BYTES, KIND_IMAGE):
        raise PayloadError("unknown payload kind %d (wrong key?)" % kind)
    width, height = struct.unpack(">II", header[6:14])
    return kind, width, height


def capacity_bytes(cover_width: int, cover_height: int, channels: int = 1,
                   mode: str = MODE_FRAMED) -> int:
    """Payload bytes a cover of the given size can carry.

    Two digits fit in each 2x2 block of the translated image, which maps
    one-to-one onto cover pixels; framed mode spends 64 digits on the header.
    """
    if mode not in (MODE_FRAMED, MODE_RAW):
        raise ValueError("mode must be %r or %r" % (MODE_FRAMED, MODE_RAW))
    digits = 2 * cover_width * cover_height * channels
    if mode == MODE_FRAMED:
        digits -= FRAME_HEADER_DIGITS
    return max(digits, 0) // 4


def _block_count(planes) -> int:
    return sum((p.shape[0] // 2) * (p.shape[1] // 2) for p in planes)


def embed(translated: TranslatedImage, payload: PayloadFrame, ks: KeyStream) -> TranslatedImage:
    """Embed a payload into a translated image; returns a new TranslatedImage.

    Blocks are consumed row-major (planes in sequence for color); each used
    block takes the next two digits, ordered by the key bit, and has its R11
    adjusted so every block sum stays put. Unused blocks are untouched.
    """
    digits = payload.to_digits()
    available = 2 * _block_count(translated.planes)
    if digits.size > available:
        raise CapacityError(digits.size, available)
    n_pairs = digits.size // 2

    d_first = digits[0::2].astype(np.int64)
    d_second = digits[1::2].astype(np.int64)
    bits = _order_bits(ks.seed, np.arange(n_pairs, dtype=np.uint64))
    d01 = np.where(bits == 0, d_first, d_second)
    d10 = np.where(bits == 0, d_second, d_first)

    out = []
    offset = 0
    for plane in translated.planes:
        q = plane.copy()
        blocks = (q.shape[0] // 2) * (q.shape[1] // 2)
        used = min(max(n_pairs - offset, 0), blocks)
        if used:
            v01 = q[0::2, 1::2]
            v10 = q[1::2, 0::2]
            v11 = q[1::2, 1::2]
            f01 = v01.ravel()  # strided views, so these are copies
            f10 = v10.ravel()
            f11 = v11.ravel()
            sel = slice(offset, offset + used)
            new01 = _embed_digits(f01[:used], d01[sel])
            new10 = _embed_digits(f10[:used], d10[sel])
            f11[:used] -= (new01 - f01[:used]) + (new10 - f10[:used])
            f01[:used] = new01
            f10[:used] = new10
            v01[:] = f01.reshape(v01.shape)
            v10[:] = f10.reshape(v10.shape)
            v11[:] = f11.reshape(v11.shape)
        out.append(q)
        offset += blocks
    return TranslatedImage(tuple(out), translated.beta)


def _extract_digit_range(planes, ks: KeyStream, start: int, count: int) -> np.ndarray:
    """Digits at stream positions [start, start+count) read from block mods."""
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    first_block = start // 2
    last_block = (start + count + 1) // 2  # exclusive
    if last_block > _block_count(planes):
        raise PayloadError(
            "declared payload exceeds carrier capacity (wrong key or corrupted stego)"
        )
    m01_parts = []
    m10_parts = []
    offset = 0
    for plane in planes:
        blocks = (plane.shape[0] // 2) * (plane.shape[1] // 2)
        lo = max(first_block, offset)
        hi = min(last_block, offset + blocks)
        if lo < hi:
            m01_parts.append(plane[0::2, 1::2].ravel()[lo - offset : hi - offset] % 4)
            m10_parts.append(plane[1::2, 0::2].ravel()[lo - offset : hi - offset] % 4)
        offset += blocks
    m01 = np.concatenate(m01_parts)
    m10 = np.concatenate(m10_parts)
    bits = _order_bits(ks.seed, np.arange(first_block, last_block, dtype=np.uint64))
    first = np.where(bits == 0, m01, m10).astype(np.uint8)
    second = np.where(bits == 0, m10, m01).astype(np.uint8)
    digits = np.empty(2 * (last_block - first_block), dtype=np.uint8)
    digits[0::2] = first
    digits[1::2] = second
    skip = start - 2 * first_block
    return digits[skip : skip + count]


def extract_frame(stego, ks: KeyStream, mode: str = MODE_FRAMED,
                  raw_digit_count: int | None = None) -> PayloadFrame:
    """Extract the payload and its frame metadata from a stego image.

    `stego` may be a TranslatedImage or a StegoContainer. Framed mode reads
    and validates the 64 header digits, then exactly the declared payload;
    raw mode reads `raw_digit_count` digits (must be a multiple of 4).
    """
    if not isinstance(stego, (TranslatedImage, StegoContainer)):
        raise TypeError(
            "expected TranslatedImage or StegoContainer, got %r" % type(stego).__name__
        )
    planes = stego.planes
    if mode == MODE_RAW:
        if raw_digit_count is None:
            raise PayloadError("raw mode requires raw_digit_count")
        if raw_digit_count < 0 or raw_digit_count % 4:
            raise PayloadError("raw_digit_count must be a non-negative multiple of 4")
        if raw_digit_count > 2 * _block_count(planes):
            raise PayloadError("raw_digit_count exceeds carrier capacity")
        digits = _extract_digit_range(planes, ks, 0, raw_digit_count)
        return PayloadFrame.raw(digits_to_bytes(digits))
    if mode != MODE_FRAMED:
        raise ValueError("mode must be %r or %r" % (MODE_FRAMED, MODE_RAW))
    header = digits_to_bytes(
        _extract_digit_range(planes, ks, 0, FRAME_HEADER_DIGITS)
    )
    kind, width, height = _parse_frame_header(header)
    payload_digits = 4 * width * height
    data = digits_to_bytes(
        _extract_digit_range(planes, ks, FRAME_HEADER_DIGITS, payload_digits)
    )
    return PayloadFrame(data, mode=MODE_FRAMED, kind=kind, width=width, height=height)


def extract(stego, ks: KeyStream, mode: str = MODE_FRAMED,
            raw_digit_count: int | None = None) -> bytes:
    """Extract just the payload bytes; see extract_frame for the rules."""
    return extract_frame(stego, ks, mode, raw_digit_count).data
