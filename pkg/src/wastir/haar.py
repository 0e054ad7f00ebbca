"""Exact one-level 2D Haar transforms over integer planes.

Subband coefficients are kept in quarter units: a stored integer q stands
for the real coefficient q / 4. With that convention the forward transform
of any integer plane is itself integer (no rounding anywhere), the inverse
is exact, and a recovered cover can be compared bit-for-bit.

Per 2x2 input block [x00 x01; x10 x11] the forward transform yields, in
quarter units:

    a = x00 + x01 + x10 + x11      (average / low-low)
    h = x00 - x01 + x10 - x11      (row detail)
    v = x00 + x01 - x10 - x11      (column detail)
    d = x00 - x01 - x10 + x11      (diagonal detail)

and the inverse, with real-valued coefficients (A, H, V, D):

    x00 = A + H + V + D        x01 = A - H + V - D
    x10 = A + H - V - D        x11 = A - H - V + D

Upscaling a cover feeds it through the inverse transform as the average
band with a constant false detail coefficient beta, so each cover pixel A
expands to the block [A+3*beta, A-beta; A-beta, A-beta]. The cover comes
back as block_sum / 4, which is what makes bit-exact recovery possible.
"""

from dataclasses import dataclass

import numpy as np

from .pixmap import ColorImage, GrayImage, PixmapError, StegoContainer


class ReconstructionError(ValueError):
    """Inverse transform would produce non-integer samples (corrupted subbands)."""


class AuthenticationError(ValueError):
    """Cover recovery failed: the stego data is not a valid embedding result."""


@dataclass(frozen=True, eq=False)
class SubbandSet:
    """Four quarter-unit coefficient planes of identical shape."""

    a: np.ndarray
    h: np.ndarray
    v: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        planes = [np.asarray(p, dtype=np.int64) for p in (self.a, self.h, self.v, self.d)]
        shape = planes[0].shape
        if len(shape) != 2 or any(p.shape != shape for p in planes):
            raise ValueError("subband planes must be 2D and share one shape")
        for name, plane in zip("ahvd", planes):
            object.__setattr__(self, name, plane)

    @property
    def n_rows(self) -> int:
        return self.a.shape[0]

    @property
    def n_cols(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True, eq=False)
class TranslatedImage:
    """2Nx2M signed-sample image produced by upscaling an NxM cover.

    Holds 1 plane (gray cover) or 3 (color, R/G/B order) plus the false
    detail coefficient beta used to build it. Every 2x2 block sums to four
    times the matching cover pixel; embedding preserves that invariant.
    """

    planes: tuple
    beta: int

    def __post_init__(self):
        planes = tuple(np.asarray(p, dtype=np.int64) for p in self.planes)
        if len(planes) not in (1, 3):
            raise ValueError("translated image requires 1 or 3 planes")
        shape = planes[0].shape
        if len(shape) != 2 or any(p.shape != shape for p in planes):
            raise ValueError("translated planes must be 2D and share one shape")
        if shape[0] % 2 or shape[1] % 2 or shape[0] == 0 or shape[1] == 0:
            raise ValueError("translated dimensions must be even and nonzero")
        if not 0 <= int(self.beta) <= 255:
            raise ValueError("beta must be in [0, 255]")
        object.__setattr__(self, "planes", planes)
        object.__setattr__(self, "beta", int(self.beta))

    @property
    def width(self) -> int:
        return self.planes[0].shape[1]

    @property
    def height(self) -> int:
        return self.planes[0].shape[0]

    @property
    def channel_count(self) -> int:
        return len(self.planes)

    def to_container(self) -> StegoContainer:
        return StegoContainer(self.planes)

    def __eq__(self, other):
        if not isinstance(other, TranslatedImage):
            return NotImplemented
        return (
            self.beta == other.beta
            and len(self.planes) == len(other.planes)
            and all(np.array_equal(a, b) for a, b in zip(self.planes, other.planes))
        )


def _require_even_plane(plane: np.ndarray) -> np.ndarray:
    plane = np.asarray(plane, dtype=np.int64)
    if plane.ndim != 2:
        raise ValueError("expected a 2D plane")
    if plane.shape[0] % 2 or plane.shape[1] % 2:
        raise ValueError("plane dimensions must be even, got %dx%d" % plane.shape)
    return plane


def forward_haar(plane: np.ndarray) -> SubbandSet:
    """Decompose an even-dimension integer plane into quarter-unit subbands."""
    x = _require_even_plane(plane)
    x00 = x[0::2, 0::2]
    x01 = x[0::2, 1::2]
    x10 = x[1::2, 0::2]
    x11 = x[1::2, 1::2]
    return SubbandSet(
        a=x00 + x01 + x10 + x11,
        h=x00 - x01 + x10 - x11,
        v=x00 + x01 - x10 - x11,
        d=x00 - x01 - x10 + x11,
    )


def inverse_haar(subbands: SubbandSet) -> np.ndarray:
    """Rebuild the plane whose forward transform is `subbands`.

    The quarter-unit sums a+-h+-v+-d must all be divisible by 4, otherwise
    the reconstruction would not be integer and ReconstructionError is
    raised. inverse_haar(forward_haar(x)) == x exactly.
    """
    a, h, v, d = subbands.a, subbands.h, subbands.v, subbands.d
    s00 = a + h + v + d
    s01 = a - h + v - d
    s10 = a + h - v - d
    s11 = a - h - v + d
    for s in (s00, s01, s10, s11):
        if np.any(s & 3):
            raise ReconstructionError("quarter-unit sums not divisible by 4")
    out = np.empty((2 * subbands.n_rows, 2 * subbands.n_cols), dtype=np.int64)
    out[0::2, 0::2] = s00 >> 2
    out[0::2, 1::2] = s01 >> 2
    out[1::2, 0::2] = s10 >> 2
    out[1::2, 1::2] = s11 >> 2
    return out


def _cover_planes(cover):
    if isinstance(cover, GrayImage):
        return (cover.pixels,)
    if isinstance(cover, ColorImage):
        return tuple(p.pixels for p in cover.planes)
    raise TypeError("expected GrayImage or ColorImage, got %r" % type(cover).__name__)


def resize_cover(cover, beta: int) -> TranslatedImage:
    """Upscale a cover 2x by inverse transform with false detail constant beta.

    Each cover pixel A becomes the block [A+3*beta, A-beta; A-beta, A-beta];
    forward_haar of the result recovers the cover in its average band.
    """
    if not 0 <= int(beta) <= 255:
        raise ValueError("beta must be in [0, 255], got %r" % (beta,))
    beta = int(beta)
    out = []
    for plane in _cover_planes(cover):
        a = plane.astype(np.int64) * 4
        false = np.full(a.shape, 4 * beta, dtype=np.int64)
        out.append(inverse_haar(SubbandSet(a=a, h=false, v=false, d=false)))
    return TranslatedImage(tuple(out), beta)


def _stego_planes(stego):
    if isinstance(stego, (TranslatedImage, StegoContainer)):
        return stego.planes
    raise TypeError(
        "expected TranslatedImage or StegoContainer, got %r" % type(stego).__name__
    )


def recover_cover(stego):
    """Recover the original cover from a (possibly embedded) translated image.

    Each 2x2 block must sum to 4*A with A in [0, 255]; embedding keeps block
    sums intact, so any violation means the stego data was tampered with and
    AuthenticationError is raised. Returns GrayImage or ColorImage.
    """
    recovered = []
    for plane in _stego_planes(stego):
        sums = forward_haar(plane).a
        if np.any(sums & 3):
            raise AuthenticationError(
                "cover authentication failed: block sum not divisible by 4"
            )
        pixels = sums >> 2
        if pixels.min() < 0 or pixels.max() > 255:
            raise AuthenticationError(
                "cover authentication failed: recovered pixel outside [0, 255]"
            )
        recovered.append(GrayImage(pixels))
    if len(recovered) == 1:
        return recovered[0]
    try:
        return ColorImage(tuple(recovered))
    except PixmapError as exc:  # pragma: no cover - shapes already validated
        raise AuthenticationError(str(exc)) from exc
