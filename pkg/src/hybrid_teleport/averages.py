"""Bloch-sphere averages: quadrature source of truth plus closed forms.

The closed forms reduce to four basic moments of the input distribution,
m_k(x) = <f_k / (1 + x u)> with u = sin(theta) cos(phi) and
f in {|a|^4, |a|^2 |b|^2, u, a^2 b*^2 + a*^2 b^2}, evaluated at the two decay
scales, plus the paired moments <f / ((1 + x u)(1 + y u))>. The paired moments
are divided differences of X(z) = z * m(z) and are computed with exact
divided-difference algebra (stable at any separation, including x = y) or a
power series when both arguments are small. Wherever a closed form and the
quadrature disagree beyond tolerance, the quadrature wins; `verify` enforces
this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ChannelParams
from .teleport import Direction, fidelity_kernel, success_kernel

_SERIES_RADIUS = 0.05
_SERIES_TERMS = 14
_MOMENT_SERIES_CUT = 1e-3  # moment_integral switches to its series below this


def _artanh(x: float) -> float:
    # stable for x in [0, 1): log1p keeps precision near both ends
    return 0.5 * (math.log1p(x) - math.log1p(-x))


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre nodes in cos(theta) times a uniform phi grid."""

    n_theta: int = 64
    n_phi: int = 128

    def __post_init__(self) -> None:
        if self.n_theta < 2 or self.n_phi < 2:
            raise ValueError("need at least 2 nodes per direction")


@lru_cache(maxsize=16)
def _nodes(n_theta: int, n_phi: int):
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    w_theta = w / 2.0
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    w_phi = np.full(n_phi, 1.0 / n_phi)
    return theta, w_theta, phi, w_phi


def bloch_average(f, spec: QuadratureSpec | None = None) -> float:
    """Uniform average of f(theta, phi) over the Bloch sphere.

    ``f`` must accept broadcast numpy arrays of angles. Deterministic for a
    fixed spec (fixed node order, numpy pairwise summation).
    """
    spec = spec or QuadratureSpec()
    theta, w_theta, phi, w_phi = _nodes(spec.n_theta, spec.n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    vals = np.asarray(f(tt, pp), dtype=float)
    if vals.shape != tt.shape:
        vals = np.broadcast_to(vals, tt.shape)
    return float(np.einsum("i,ij,j->", w_theta, vals, w_phi))


# ---------------------------------------------------------------------------
# basic moments m_k(x) = <f_k / (1 + x u)>


def _series_coeff(kind: int, k: int) -> float:
    # coefficient of z^(2k-1) in X_kind(z) = z * m_kind(z)  (k >= 1);
    # kind 3 is even: coefficient of z^(2k)
    if kind == 1:
        return 0.5 * (k + 1) / (4 * k * k - 1)
    if kind == 2:
        return 0.5 * k / (4 * k * k - 1)
    if kind == 3:
        return -1.0 / (2 * k + 1)
    if kind == 4:
        return (k - 1.0) / (4 * k * k - 1)
    raise ValueError("moment kind must be 1..4")


def _moment_series(kind: int, x: float) -> float:
    x2 = x * x
    total = 0.0
    power = 1.0  # x^(2(k-1)) for kinds 1,2,4; for kind 3 an extra factor x
    for k in range(1, _SERIES_TERMS + 1):
        c = _series_coeff(kind, k)
        total += c * (power * x if kind == 3 else power)
        power *= x2
    return total


def _moment_closed(kind: int, x: float) -> float:
    at = _artanh(x)
    if kind == 1:
        return (x + (3 * x * x - 1) * at) / (8 * x**3)
    if kind == 2:
        return (-x + (1 + x * x) * at) / (8 * x**3)
    if kind == 3:
        return 1.0 / x - at / (x * x)
    return (3 - x * x) * at / (4 * x**3) - 3.0 / (4 * x * x)


def moment_integral(kind: int, x: float) -> float:
    """Closed form of <f_kind / (1 + x u)> for 0 <= x < 1.

    Kinds: 1 -> |a|^4, 2 -> |a|^2|b|^2, 3 -> u, 4 -> a^2 b*^2 + a*^2 b^2.
    A series expansion takes over below x = 1e-3 where the closed forms
    cancel catastrophically.
    """
    if kind not in (1, 2, 3, 4):
        raise ValueError("moment kind must be 1..4")
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must be in [0, 1), got {x!r}")
    if x < _MOMENT_SERIES_CUT:
        return _moment_series(kind, x)
    return _moment_closed(kind, x)


def moment_integral_variant4(x: float) -> float:
    """Kind-4 closed-form variant with the wrong x -> 0 limit (-1/6, not 0).

    Retained for the verification audit; the default kind-4 form replaces it.
    """
    if not 0.0 < x < 1.0:
        raise ValueError(f"x must be in (0, 1), got {x!r}")
    at = _artanh(x)
    return (2 - x * x) * (2 * at) / (4 * x**3) - 1.0 / (x * x)


def _artanh_cofactor(kind: int, x: float) -> float:
    # h in the split m(x) = artanh(x) h(x) + p(x); h is regular at x = 1
    if kind == 1:
        return (3 * x * x - 1) / (8 * x**3)
    if kind == 2:
        return (1 + x * x) / (8 * x**3)
    if kind == 3:
        return -1.0 / (x * x)
    return (3 - x * x) / (4 * x**3)


def _regular_part(kind: int, x: float) -> float:
    if kind == 1:
        return 1.0 / (8 * x * x)
    if kind == 2:
        return -1.0 / (8 * x * x)
    if kind == 3:
        return 1.0 / x
    return -3.0 / (4 * x * x)


def g_functional(kind: int, params: ChannelParams) -> float:
    """Difference of a basic moment at the two decay scales.

    Evaluates moment_integral at x = coherence * overlap and at x = overlap
    and returns their difference. Kept exactly in this form for the audit;
    the default average assembly uses paired moments instead (see
    `avg_fidelity_variant_pc` in the verify report).

    Both arguments approach 1 as the amplitude vanishes and the individual
    moments diverge, but their difference stays finite (limit
    h(1) * log t); that regime is evaluated through a grouped form whose
    endpoint gaps 1 - x come from expm1.
    """
    t, alpha = params.t, params.alpha
    x = params.basis_overlap
    y = params.coherence_factor * x
    if x < 1.0 - 1e-6:
        return moment_integral(kind, y) - moment_integral(kind, x)
    gap_x = -math.expm1(-2.0 * (t * alpha) ** 2)  # 1 - x, exactly
    gap_y = -math.expm1(-2.0 * alpha * alpha)     # 1 - y
    at_x = float("inf") if gap_x == 0.0 else 0.5 * (math.log(2.0 - gap_x) - math.log(gap_x))
    if y <= 0.5:
        # widely separated scales: each moment is fine on its own stable path
        m_x = at_x * _artanh_cofactor(kind, x) + _regular_part(kind, x)
        return moment_integral(kind, y) - m_x
    log_gap_ratio = math.log(t * t) if alpha == 0.0 else math.log(gap_x / gap_y)
    d_artanh = 0.5 * (math.log1p(y) - math.log1p(x) + log_gap_ratio)
    dh = _artanh_cofactor(kind, y) - _artanh_cofactor(kind, x)
    first = 0.0 if dh == 0.0 else at_x * dh
    return (first + _artanh_cofactor(kind, y) * d_artanh
            + _regular_part(kind, y) - _regular_part(kind, x))


# ---------------------------------------------------------------------------
# paired moments <f_k / ((1 + x u)(1 + y u))> as divided differences


def _x_closed(kind: int, z: float) -> float:
    return z * _moment_closed(kind, z)


def _x_series(kind: int, z: float) -> float:
    z2 = z * z
    total = 0.0
    power = z  # z^(2k-1); kind 3 uses z^(2k)
    for k in range(1, _SERIES_TERMS + 1):
        total += _series_coeff(kind, k) * (power * z if kind == 3 else power)
        power *= z2
    return total


def _x_eval(kind: int, z: float) -> float:
    return _x_series(kind, z) if z < 0.03 else _x_closed(kind, z)


def _divdiff_artanh(x: float, y: float) -> float:
    # (artanh x - artanh y)/(x - y), exact at x == y
    w = (x - y) / (1.0 - x * y)
    if abs(w) < 1e-4:
        ratio = 1.0 + w * w / 3.0 + w**4 / 5.0
    else:
        ratio = math.atanh(w) / w
    return ratio / (1.0 - x * y)


def _divdiff_algebra(kind: int, x: float, y: float) -> float:
    # exact product-rule decomposition over {artanh, 1/z, 1/z^2}
    at_x = _artanh(x)
    d_at = _divdiff_artanh(x, y)
    d_inv = -1.0 / (x * y)
    d_inv2 = -(x + y) / (x * x * y * y)
    d_at_inv2 = at_x * d_inv2 + d_at / (y * y)
    if kind == 1:
        return 0.125 * d_inv + 0.375 * d_at - 0.125 * d_at_inv2
    if kind == 2:
        return -0.125 * d_inv + 0.125 * d_at + 0.125 * d_at_inv2
    if kind == 3:
        d_at_inv = at_x * d_inv + d_at / y
        return -d_at_inv
    return 0.75 * d_at_inv2 - 0.25 * d_at - 0.75 * d_inv


def _divdiff_series(kind: int, x: float, y: float) -> float:
    # divided difference of the X series; all terms share one sign, so the
    # symmetric power sums accumulate without cancellation
    total = 0.0
    for k in range(1, _SERIES_TERMS + 1):
        m = 2 * k if kind == 3 else 2 * k - 1
        # sum_{i<m} x^i y^(m-1-i)
        psum = 0.0
        for i in range(m):
            psum += x**i * y ** (m - 1 - i)
        total += _series_coeff(kind, k) * psum
    return total


def pair_moment(kind: int, x: float, y: float) -> float:
    """<f_kind / ((1 + x u)(1 + y u))> for 0 <= x, y < 1.

    Equal to the divided difference [X(x) - X(y)]/(x - y) of X(z) = z m(z);
    the implementation is exact at x == y.
    """
    if kind not in (1, 2, 3, 4):
        raise ValueError("moment kind must be 1..4")
    for v in (x, y):
        if not 0.0 <= v < 1.0:
            raise ValueError(f"arguments must be in [0, 1), got {v!r}")
    hi, lo = max(x, y), min(x, y)
    if hi <= _SERIES_RADIUS:
        return _divdiff_series(kind, x, y)
    if lo >= 0.5 * _SERIES_RADIUS:
        return _divdiff_algebra(kind, x, y)
    # mixed scales: the gap is at least _SERIES_RADIUS/2, direct quotient is safe
    return (_x_eval(kind, x) - _x_eval(kind, y)) / (x - y)


# ---------------------------------------------------------------------------
# averaged fidelities


def _pc_average(params: ChannelParams) -> float:
    s = params.basis_overlap
    if s >= 1.0:
        raise ValueError("teleporting onto a degenerate coherent basis; needs alpha > 0")
    q = params.coherence_factor
    y = q * s
    pm = {k: pair_moment(k, s, y) for k in (1, 2, 3, 4)}
    return (2.0 * pm[1] + (2.0 * s * s + 2.0 * q) * pm[2]
            + s * (1.0 + q) * pm[3] + q * s * s * pm[4])


def _success_weighted_moments(t: float) -> tuple[float, float, float]:
    """Averages of |a|^4, |b|^4, |a|^2|b|^2 against the s->p success weight.

    The weight is c1 |a|^2 + c2 |b|^2 with c1 = t^2, c2 = 2 - t^2; the log
    closed forms degenerate at c1 = c2 (t = 1) and switch to a series there.
    """
    c1 = t * t
    c2 = 2.0 - c1
    d = c1 - c2
    if abs(d) < 1e-4:
        ratio = -d / c2
        a1 = a2 = a3 = 0.0
        power = 1.0
        for j in range(0, 8):
            a1 += power / (j + 3)
            a2 += power * (1.0 / (j + 1) - 2.0 / (j + 2) + 1.0 / (j + 3))
            a3 += power * (1.0 / (j + 2) - 1.0 / (j + 3))
            power *= ratio
        return a1 / c2, a2 / c2, a3 / c2
    log_ratio = math.log(c1 / c2)
    den = 2.0 * d**3
    a1 = (c1 * c1 - 4 * c1 * c2 + 3 * c2 * c2 + 2 * c2 * c2 * log_ratio) / den
    a2 = (-3 * c1 * c1 + 4 * c1 * c2 - c2 * c2 + 2 * c1 * c1 * log_ratio) / den
    a3 = (c1 * c1 - c2 * c2 - 2 * c1 * c2 * log_ratio) / den
    return a1, a2, a3


def avg_fidelity(direction: Direction, params: ChannelParams,
                 postselected: bool = False) -> float:
    """Closed-form Bloch average of the per-input teleportation fidelity."""
    t = params.t
    if direction is Direction.P_TO_C:
        if postselected:
            raise ValueError("postselection applies to teleportation onto polarization")
        return _pc_average(params)
    if direction is Direction.C_TO_P:
        q = params.coherence_factor
        return (2.0 + q) / 3.0 if postselected else t * t * (2.0 + q) / 3.0
    if direction is Direction.P_TO_S:
        if postselected:
            raise ValueError("postselection applies to teleportation onto polarization")
        return (t * t + 2.0 * t + 3.0) / 6.0
    a1, a2, a3 = _success_weighted_moments(t)
    if postselected:
        return t * t * a1 + a2 + (1.0 + 2.0 * t - t * t) * a3
    return t**4 * a1 + t * t * a2 + t * t * (1.0 + 2.0 * t - t * t) * a3


def avg_fidelity_variant_pc(params: ChannelParams) -> float:
    """p->c average assembled through `g_functional` with a q/(q-1) prefactor.

    Audit-only: this combination is not the partial-fraction identity for
    1/((1+su)(1+q s u)) and disagrees with the quadrature by O(1); `verify`
    measures the deviation. Undefined at q = 1 (r = 0).
    """
    s = params.basis_overlap
    q = params.coherence_factor
    if abs(1.0 - q) < 1e-12:
        raise ValueError("variant assembly is singular at r = 0")
    g = {k: g_functional(k, params) for k in (1, 2, 3, 4)}
    return (q / (q - 1.0)) * (2.0 * g[1] + (2.0 * s * s + 2.0 * q) * g[2]
                              + s * (1.0 + q) * g[3] + q * s * s * g[4])


def avg_fidelity_quadrature(direction: Direction, params: ChannelParams,
                            spec: QuadratureSpec | None = None,
                            postselected: bool = False) -> float:
    """Quadrature of the per-input fidelity (the source of truth)."""
    return bloch_average(
        lambda th, ph: fidelity_kernel(direction, th, ph, params, postselected), spec
    )


# ---------------------------------------------------------------------------
# classical limits


def classical_limit(direction: Direction, params: ChannelParams) -> float:
    """Best average fidelity of a measure-and-prepare strategy (no entanglement).

    2/3 for orthogonal qubit targets; teleporting onto the overlapping
    coherent basis allows more, approaching 1 as the basis states merge.
    """
    if direction is not Direction.P_TO_C:
        return 2.0 / 3.0
    s = params.basis_overlap
    if s >= 1.0 - 1e-12:
        return 1.0
    return 1.0 - 2.0 * (1.0 - s * s) * moment_integral(2, s)


def classical_limit_variant(params: ChannelParams) -> float:
    """Literal alternative expression for the p->c classical limit.

    Audit-only: its small-overlap limit is not 2/3 (the bracketed polynomial
    sits entirely outside the inverse-hyperbolic factor); kept so `verify`
    can report the measured deviation against the quadrature.
    """
    s = params.basis_overlap
    if not 0.0 < s < 1.0:
        raise ValueError("variant needs overlap strictly inside (0, 1)")
    return ((s + 3 * s**3 - (s**4 - 1.0)) / (4 * s**3)) * math.asinh(s / math.sqrt(1 - s * s))


def classical_limit_quadrature(params: ChannelParams,
                               spec: QuadratureSpec | None = None) -> float:
    """Quadrature oracle of the classical strategy for p->c targets."""
    s = params.basis_overlap

    def per_input(theta, phi):
        a = np.cos(theta / 2) * np.exp(1j * phi / 2)
        b = np.sin(theta / 2) * np.exp(-1j * phi / 2)
        u = 2.0 * np.real(a * np.conj(b))
        num = np.abs(a) ** 2 * np.abs(a + b * s) ** 2 + np.abs(b) ** 2 * np.abs(a * s + b) ** 2
        return num / (1.0 + s * u)

    return bloch_average(per_input, spec)


# ---------------------------------------------------------------------------
# averaged success probabilities


def _overlap_success(s: float) -> float:
    # <(1 - s)/(1 + s u)> = (1 - s) artanh(s)/s, with removable endpoints
    if s <= 0.0:
        return 1.0
    if s >= 1.0:
        return 0.0
    if s < 1e-8:
        return (1.0 - s) * (1.0 + s * s / 3.0)
    if s > 1.0 - 1e-6:
        eps = 1.0 - s
        at = 0.5 * (math.log(2.0 - eps) - math.log(eps))
        return eps * at / (1.0 - eps)
    return (1.0 - s) * _artanh(s) / s


def avg_success_probability(direction: Direction, params: ChannelParams,
                            postselected: bool = False) -> float:
    """Closed-form Bloch average of the per-input success probability."""
    t = params.t
    if direction is Direction.P_TO_C:
        if postselected:
            raise ValueError("postselection applies to teleportation onto polarization")
        return t * t / 2.0
    if direction is Direction.P_TO_S:
        if postselected:
            raise ValueError("postselection applies to teleportation onto polarization")
        return t * t / 2.0
    if direction is Direction.C_TO_P:
        base = _overlap_success(params.basis_overlap)
    else:
        base = 0.5
    return base * t * t / 2.0 if postselected else base


def avg_success_quadrature(direction: Direction, params: ChannelParams,
                           spec: QuadratureSpec | None = None,
                           postselected: bool = False) -> float:
    return bloch_average(
        lambda th, ph: success_kernel(direction, th, ph, params, postselected), spec
    )


def fidelity_gap_large_alpha(params: ChannelParams) -> float:
    """Large-amplitude approximation of avg F(p->c) - avg F(c->p).

    The gap comes from the channel's vacuum admixture on the polarization
    output: (1 - t^2)(2 + coherence_factor)/3. Accurate once the coherent
    basis states are effectively orthogonal.
    """
    t2 = params.t * params.t
    return (1.0 - t2) * (2.0 + params.coherence_factor) / 3.0
