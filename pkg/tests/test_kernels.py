"""Kernel backends against naive loop oracles and adjoint identities."""
import numpy as np
import pytest

from plugselect import kernels
from plugselect.errors import ConfigError

BACKENDS = kernels.available_backends()

rng = np.random.default_rng(42)


def _case(B=3, C=5, T=40, K=4, W=7, S=6, pool=4):
    x = rng.standard_normal((B, C, T))
    tw = rng.standard_normal((K, W))
    tb = rng.standard_normal(K)
    sw = rng.standard_normal((S, K, C))
    sb = rng.standard_normal(S)
    return x, tw, tb, sw, sb, pool


def oracle_temporal_forward(x, w, b):
    B, C, T = x.shape
    K, W = w.shape
    L = T - W + 1
    out = np.zeros((B, K, C, L))
    for bi in range(B):
        for k in range(K):
            for c in range(C):
                for pos in range(L):
                    out[bi, k, c, pos] = x[bi, c, pos : pos + W] @ w[k] + b[k]
    return out


def oracle_spatial_forward(a, w, b):
    B, K, C, L = a.shape
    S = w.shape[0]
    out = np.zeros((B, S, L))
    for bi in range(B):
        for s in range(S):
            for pos in range(L):
                out[bi, s, pos] = np.sum(w[s] * a[bi, :, :, pos]) + b[s]
    return out


def oracle_avgpool_forward(a, width):
    B, S, L = a.shape
    Q = L // width
    out = np.zeros((B, S, Q))
    for q in range(Q):
        out[:, :, q] = a[:, :, q * width : (q + 1) * width].mean(axis=2)
    return out


@pytest.mark.parametrize("name", BACKENDS)
def test_temporal_forward_matches_loop_oracle(name):
    mod = kernels.get_backend(name)
    x, tw, tb, *_ = _case()
    got = mod.temporal_forward(x, tw, tb)
    np.testing.assert_allclose(got, oracle_temporal_forward(x, tw, tb), atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_spatial_forward_matches_loop_oracle(name):
    mod = kernels.get_backend(name)
    x, tw, tb, sw, sb, _ = _case()
    a = mod.temporal_forward(x, tw, tb)
    got = mod.spatial_forward(a, sw, sb)
    np.testing.assert_allclose(got, oracle_spatial_forward(a, sw, sb), atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_avgpool_forward_matches_loop_oracle(name):
    mod = kernels.get_backend(name)
    a = rng.standard_normal((2, 3, 11))  # 11 = 2*4 + 3 trailing samples dropped
    got = mod.avgpool_forward(a, 4)
    assert got.shape == (2, 3, 2)
    np.testing.assert_allclose(got, oracle_avgpool_forward(a, 4), atol=1e-12)


# The forward maps are linear in their inputs and parameters, so each
# backward kernel must satisfy the adjoint identity <A x, g> = <x, A* g>.
@pytest.mark.parametrize("name", BACKENDS)
def test_temporal_backward_is_adjoint_of_forward(name):
    mod = kernels.get_backend(name)
    x, tw, tb, *_ = _case()
    out = mod.temporal_forward(x, tw, np.zeros_like(tb))
    g = rng.standard_normal(out.shape)
    lhs = np.sum(out * g)
    dx = mod.temporal_backward_input(g, tw)
    assert dx.shape == x.shape
    np.testing.assert_allclose(lhs, np.sum(x * dx), rtol=1e-12)
    gw, gb = mod.temporal_backward_params(g, x, tw.shape[1])
    np.testing.assert_allclose(lhs, np.sum(tw * gw), rtol=1e-12)
    # with the bias restored, the extra term is <b, sum of g over b,c,l>
    with_bias = mod.temporal_forward(x, tw, tb)
    np.testing.assert_allclose(
        np.sum(with_bias * g), lhs + np.sum(tb * gb), rtol=1e-12
    )


@pytest.mark.parametrize("name", BACKENDS)
def test_spatial_backward_is_adjoint_of_forward(name):
    mod = kernels.get_backend(name)
    x, tw, tb, sw, sb, _ = _case()
    a = mod.temporal_forward(x, tw, tb)
    out = mod.spatial_forward(a, sw, np.zeros_like(sb))
    g = rng.standard_normal(out.shape)
    lhs = np.sum(out * g)
    da = mod.spatial_backward_input(g, sw)
    assert da.shape == a.shape
    np.testing.assert_allclose(lhs, np.sum(a * da), rtol=1e-12)
    gw, gb = mod.spatial_backward_params(g, a)
    np.testing.assert_allclose(lhs, np.sum(sw * gw), rtol=1e-12)
    with_bias = mod.spatial_forward(a, sw, sb)
    np.testing.assert_allclose(
        np.sum(with_bias * g), lhs + np.sum(sb * gb), rtol=1e-12
    )


@pytest.mark.parametrize("name", BACKENDS)
def test_avgpool_backward_is_adjoint_of_forward(name):
    mod = kernels.get_backend(name)
    a = rng.standard_normal((2, 3, 11))
    pooled = mod.avgpool_forward(a, 4)
    g = rng.standard_normal(pooled.shape)
    da = mod.avgpool_backward(g, 4, a.shape[2])
    assert da.shape == a.shape
    np.testing.assert_allclose(np.sum(pooled * g), np.sum(a * da), rtol=1e-12)
    # positions past the last full pool window receive no gradient
    assert np.all(da[:, :, 8:] == 0.0)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="only one backend built")
def test_backends_agree():
    x, tw, tb, sw, sb, pool = _case(B=4, C=6, T=64, K=5, W=9, S=7)
    mods = [kernels.get_backend(n) for n in BACKENDS]
    results = []
    for mod in mods:
        a = mod.temporal_forward(x, tw, tb)
        z = mod.spatial_forward(a, sw, sb)
        p = mod.avgpool_forward(z, pool)
        g = np.ones_like(p)
        dz = mod.avgpool_backward(g, pool, z.shape[2])
        da = mod.spatial_backward_input(dz, sw)
        dsw, dsb = mod.spatial_backward_params(dz, a)
        dx = mod.temporal_backward_input(da, tw)
        dtw, dtb = mod.temporal_backward_params(da, x, tw.shape[1])
        results.append((a, z, p, dz, da, dsw, dsb, dx, dtw, dtb))
    for ref, other in zip(results[0], results[1]):
        np.testing.assert_allclose(other, ref, rtol=1e-12, atol=1e-12)


def test_backend_selection_roundtrip():
    original = kernels.backend_name()
    try:
        for name in BACKENDS:
            kernels.set_backend(name)
            assert kernels.backend_name() == name
        with pytest.raises(ConfigError):
            kernels.set_backend("fortran")
    finally:
        kernels.set_backend(original)


def test_unknown_backend_module_rejected():
    with pytest.raises(ConfigError):
        kernels.get_backend("fortran")


def test_wrapper_rejects_bad_shapes():
    x = rng.standard_normal((2, 3, 5))
    with pytest.raises(ConfigError):  # kernel wider than the signal
        kernels.temporal_forward(x, rng.standard_normal((2, 9)), np.zeros(2))
    with pytest.raises(ConfigError):  # bias count != kernel count
        kernels.temporal_forward(x, rng.standard_normal((2, 3)), np.zeros(4))
    a = rng.standard_normal((2, 4, 3, 6))
    with pytest.raises(ConfigError):  # spatial kernels sized for other (K, C)
        kernels.spatial_forward(a, rng.standard_normal((5, 4, 2)), np.zeros(5))
    z = rng.standard_normal((2, 5, 6))
    with pytest.raises(ConfigError):
        kernels.avgpool_forward(z, 0)
    with pytest.raises(ConfigError):
        kernels.avgpool_forward(z, 7)
    with pytest.raises(ConfigError):  # wrong rank
        kernels.temporal_forward(x[0], np.ones((1, 2)), np.zeros(1))
