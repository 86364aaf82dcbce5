"""Vectorized numpy implementations of the decoder's hot kernels.

Shapes use B=batch, C=channels, T=input samples, K=temporal kernels,
W=temporal kernel width, L=T-W+1 valid positions, S=spatial kernels,
Q=pooled length.  All arrays are float64 and C-contiguous.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "numpy"


def temporal_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (B,C,T) * (K,W) -> (B,K,C,L): valid correlation along time, per channel
    win = sliding_window_view(x, w.shape[1], axis=2)  # (B,C,L,W)
    out = np.einsum("bclw,kw->bkcl", win, w, optimize=True)
    out += b[None, :, None, None]
    return np.ascontiguousarray(out)


def temporal_backward_input(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    # full correlation of the upstream gradient with the flipped kernel
    width = w.shape[1]
    gpad = np.pad(g, ((0, 0), (0, 0), (0, 0), (width - 1, width - 1)))
    win = sliding_window_view(gpad, width, axis=3)  # (B,K,C,T,W)
    dx = np.einsum("bkctw,kw->bct", win, w[:, ::-1], optimize=True)
    return np.ascontiguousarray(dx)


def temporal_backward_params(
    g: np.ndarray, x: np.ndarray, width: int
) -> tuple[np.ndarray, np.ndarray]:
    win = sliding_window_view(x, width, axis=2)  # (B,C,L,W)
    gw = np.einsum("bkcl,bclw->kw", g, win, optimize=True)
    gb = g.sum(axis=(0, 2, 3))
    return np.ascontiguousarray(gw), np.ascontiguousarray(gb)


def spatial_forward(a: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (B,K,C,L) * (S,K,C) -> (B,S,L): full-height mix across kernels and channels
    out = np.einsum("skc,bkcl->bsl", w, a, optimize=True)
    out += b[None, :, None]
    return np.ascontiguousarray(out)


def spatial_backward_input(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    da = np.einsum("bsl,skc->bkcl", g, w, optimize=True)
    return np.ascontiguousarray(da)


def spatial_backward_params(
    g: np.ndarray, a: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    gw = np.einsum("bsl,bkcl->skc", g, a, optimize=True)
    gb = g.sum(axis=(0, 2))
    return np.ascontiguousarray(gw), np.ascontiguousarray(gb)


def avgpool_forward(a: np.ndarray, width: int) -> np.ndarray:
    B, S, L = a.shape
    Q = L // width
    pooled = a[:, :, : Q * width].reshape(B, S, Q, width).mean(axis=3)
    return np.ascontiguousarray(pooled)


def avgpool_backward(g: np.ndarray, width: int, out_len: int) -> np.ndarray:
    B, S, Q = g.shape
    da = np.zeros((B, S, out_len), dtype=np.float64)
    da[:, :, : Q * width] = np.repeat(g / width, width, axis=2)
    return da
