"""Image-quality measures: MSE, PSNR (peak 255), and image fidelity.

All three accept plain integer arrays; pass a 3D stack (or any equal-shape
pair) to average over every sample of every plane. Sums are accumulated in
int64 so results are exact up to the final division.
"""

import math
from dataclasses import dataclass

import numpy as np

PEAK = 255


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr: float
    fidelity: float


def _paired(ref, dist):
    a = np.asarray(ref, dtype=np.int64)
    b = np.asarray(dist, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch: %r vs %r" % (a.shape, b.shape))
    if a.size == 0:
        raise ValueError("empty input")
    return a, b


def mse(ref, dist) -> float:
    """Mean squared error over all samples of all planes."""
    a, b = _paired(ref, dist)
    diff = a - b
    return int(np.sum(diff * diff)) / a.size


def psnr(mse_value: float) -> float:
    """Peak signal-to-noise ratio in dB for peak 255; +inf when mse is 0."""
    if mse_value < 0:
        raise ValueError("mse must be non-negative")
    if mse_value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse_value)


def image_fidelity(ref, dist) -> float:
    """1 - sum((ref-dist)^2) / sum(ref^2); 1.0 means identical."""
    a, b = _paired(ref, dist)
    energy = int(np.sum(a * a))
    if energy == 0:
        raise ValueError("zero-energy reference")
    diff = a - b
    return 1.0 - int(np.sum(diff * diff)) / energy


def compute_report(ref, dist) -> MetricsReport:
    """MSE, PSNR and fidelity between a reference and a distorted image."""
    m = mse(ref, dist)
    return MetricsReport(mse=m, psnr=psnr(m), fidelity=image_fidelity(ref, dist))
