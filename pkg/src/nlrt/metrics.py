"""Approximation quality: relative error, PSNR and SSIM."""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import fro_norm

PSNR_CAP = 99.0


def rel_error(estimate, truth):
    """``||estimate - truth||_F / ||truth||_F``."""
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {truth.shape}")
    denom = fro_norm(truth)
    if denom == 0:
        raise ValueError("relative error undefined for a zero reference")
    return fro_norm(estimate - truth) / denom


def psnr(estimate, truth, peak):
    """Peak signal-to-noise ratio in dB, capped at 99 dB for identical inputs."""
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {truth.shape}")
    if not peak > 0:
        raise ValueError("peak must be positive")
    mse = float(np.mean((estimate - truth) ** 2))
    if mse == 0:
        return PSNR_CAP
    return min(10.0 * np.log10(peak * peak / mse), PSNR_CAP)


def gaussian_window(size=11, sigma=1.5):
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(img, g):
    # separable 'valid' correlation: rows then columns
    rows = sliding_window_view(img, len(g), axis=1) @ g
    return sliding_window_view(rows, len(g), axis=0) @ g


def ssim(estimate, truth, dynamic_range, window=11, sigma=1.5, k1=0.01, k2=0.03):
    """Mean structural similarity over all full ``window x window`` Gaussian windows."""
    x = np.asarray(estimate, dtype=np.float64)
    y = np.asarray(truth, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 2:
        raise ValueError(f"ssim needs two same-shaped 2-D slices, got {x.shape} and {y.shape}")
    if min(x.shape) < window:
        raise ValueError(
            f"slice {x.shape} is smaller than the {window}x{window} window; crop or pad it first"
        )
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    g = gaussian_window(window, sigma)
    mx = _filter_valid(x, g)
    my = _filter_valid(y, g)
    sxx = _filter_valid(x * x, g) - mx * mx
    syy = _filter_valid(y * y, g) - my * my
    sxy = _filter_valid(x * y, g) - mx * my
    smap = ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
    return float(np.mean(smap))


@dataclass
class BandReport:
    psnr: list
    ssim: list

    @property
    def mean_psnr(self):
        return float(np.mean(self.psnr))

    @property
    def mean_ssim(self):
        return float(np.mean(self.ssim))


def band_report(estimate, truth, spectral_mode=2, peak=None):
    """Per-band PSNR/SSIM of two 3-D tensors along ``spectral_mode``.

    ``peak`` defaults to the maximum of ``truth`` and is also used as the
    SSIM dynamic range.
    """
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape or truth.ndim != 3:
        raise ValueError(f"band_report needs two same-shaped 3-D tensors, got {estimate.shape} and {truth.shape}")
    peak = float(truth.max()) if peak is None else float(peak)
    p, s = [], []
    for b in range(truth.shape[spectral_mode]):
        e = np.take(estimate, b, axis=spectral_mode)
        t = np.take(truth, b, axis=spectral_mode)
        p.append(psnr(e, t, peak))
        s.append(ssim(e, t, peak))
    return BandReport(psnr=p, ssim=s)
