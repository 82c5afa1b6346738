"""Sub-pixel keypoint decoding from heatmaps.

Arrays are float32 of shape (N, H, W), C-contiguous. Coordinates are in
image pixels.
"""

import json

from . import _core

__all__ = ["decode_batch", "calibrate_batch", "read_hmz", "write_hmz"]


def decode_batch(heatmaps, *, stride, sigma, method="daec", delta=0, pattern="br", presmooth=None):
    """Decode every heatmap; returns an (N, 2) float64 array of (x, y).

    ``delta`` is an int or ``"auto-paper"``.
    """
    return _core.decode_batch(
        heatmaps, stride=stride, sigma=sigma, method=method, delta=delta, pattern=pattern, presmooth=presmooth
    )


def calibrate_batch(
    heatmaps,
    truths,
    *,
    stride,
    sigma,
    joints=1,
    norm_length=1.0,
    candidates=None,
    pattern="br",
    presmooth=None,
    objective="mean-error",
):
    """Grid-search the compensation factor.

    ``truths`` holds one (x, y) or (x, y, visible) row per heatmap. Returns the
    report as a dict with keys objective, pattern, presmooth, curve,
    delta_opt and samples; rejected curve points carry a None score.
    """
    text = _core.calibrate_batch(
        heatmaps,
        truths,
        stride=stride,
        sigma=sigma,
        joints=joints,
        norm_length=norm_length,
        candidates=candidates,
        pattern=pattern,
        presmooth=presmooth,
        objective=objective,
    )
    return json.loads(text)


def read_hmz(path):
    """Returns (heatmaps, stride, sigma)."""
    return _core.read_hmz(str(path))


def write_hmz(path, heatmaps, *, stride, sigma):
    _core.write_hmz(str(path), heatmaps, stride=stride, sigma=sigma)
