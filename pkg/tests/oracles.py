"""Independent oracles the tests check the library against.

Everything here is deliberately written from first principles (explicit index
loops, quadratic formulas, SVD, dense quadrature, scipy integration) and never
calls back into the code paths it validates.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import gammainc


def poisson_tail(mean: float, k: int) -> float:
    """P(N >= k) for a Poisson law; the coherent tail mass beyond cutoff k."""
    return float(gammainc(k, mean))


def brute_partial_trace(mat: np.ndarray, dims: tuple[int, ...], keep) -> np.ndarray:
    """Partial trace by explicit index loops."""
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kdims = [dims[i] for i in keep]
    tdims = [dims[i] for i in traced]
    out = np.zeros((int(np.prod(kdims)), int(np.prod(kdims))), dtype=complex)
    full = mat.reshape(*dims, *dims)
    n = len(dims)
    for ki in np.ndindex(*kdims):
        for kj in np.ndindex(*kdims):
            acc = 0.0 + 0.0j
            for tt in np.ndindex(*tdims) if tdims else [()]:
                idx_i = [0] * n
                idx_j = [0] * n
                for pos, mode in enumerate(keep):
                    idx_i[mode] = ki[pos]
                    idx_j[mode] = kj[pos]
                for pos, mode in enumerate(traced):
                    idx_i[mode] = tt[pos]
                    idx_j[mode] = tt[pos]
                acc += full[tuple(idx_i) + tuple(idx_j)]
            out[np.ravel_multi_index(ki, kdims) if kdims else 0,
                np.ravel_multi_index(kj, kdims) if kdims else 0] = acc
    return out


def schmidt_negativity(psi: np.ndarray, d1: int, d2: int) -> float:
    """Negativity of a pure bipartite state: (sum of Schmidt values)^2 - 1."""
    s = np.linalg.svd(psi.reshape(d1, d2), compute_uv=False)
    return float(np.sum(s) ** 2 - 1.0)


def sym2x2_eigs(a: float, c: float, b: float) -> tuple[float, float]:
    """Quadratic-formula spectrum of [[a, c], [c, b]], ascending."""
    mid = (a + b) / 2.0
    rad = np.sqrt(((a - b) / 2.0) ** 2 + c * c)
    return (mid - rad, mid + rad)


def sphere_average(f, n_theta: int = 256, n_phi: int = 512) -> float:
    """High-resolution uniform Bloch-sphere average, built independently."""
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi  # midpoint rule on phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    vals = np.asarray(f(tt, pp), dtype=float)
    if vals.shape != tt.shape:
        vals = np.broadcast_to(vals, tt.shape)
    return float((w / 2.0) @ vals @ np.full(n_phi, 1.0 / n_phi))


def segment_average(f) -> float:
    """Average of f(p) with p = cos^2(theta/2) uniform on [0, 1] (scipy quad)."""
    val, err = quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    assert err < 1e-10
    return float(val)


def coherent_amps(amplitude: float, dim: int) -> np.ndarray:
    """Truncated coherent amplitudes from the factorial recurrence."""
    c = np.zeros(dim)
    c[0] = np.exp(-amplitude * amplitude / 2.0)
    for n in range(1, dim):
        c[n] = c[n - 1] * amplitude / np.sqrt(n)
    return c
