"""Hybrid entangled channels and their evolution under photon loss.

Two channels are modeled: a polarization qubit entangled with a coherent-state
qubit, and a polarization qubit entangled with a single-rail (vacuum/photon)
qubit. Loss acts at the same rate on every mode and is parameterized by the
amplitude-decay factor t in (0, 1]; the normalized time is r = sqrt(1 - t^2).
Each channel has two constructions that must agree: a Kraus map applied to the
initial pure state, and a direct closed-form density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    H_IDX,
    V_IDX,
    VAC_IDX,
    DensityOperator,
    ModeKind,
    StateVector,
    basis_ket,
    coherent_ket,
    default_fock_dim,
    fock_mode,
    layout_of,
    polarization_mode,
    qubit_mode,
    tensor,
)


@dataclass(frozen=True)
class ChannelParams:
    """Decoherence point: amplitude decay t in (0, 1] and coherent amplitude."""

    t: float
    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 < self.t <= 1.0:
            raise ValueError(f"t must be in (0, 1], got {self.t!r}")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")

    @classmethod
    def from_r(cls, r: float, alpha: float) -> "ChannelParams":
        if not 0.0 <= r < 1.0:
            raise ValueError(f"r must be in [0, 1), got {r!r}")
        return cls(t=math.sqrt(1.0 - r * r), alpha=alpha)

    @property
    def r(self) -> float:
        """Normalized time, r = sqrt(1 - t^2)."""
        return math.sqrt(max(0.0, 1.0 - self.t * self.t))

    @property
    def coherence_factor(self) -> float:
        """Suppression of the cross coherent dyadic: exp(-2 alpha^2 (1 - t^2))."""
        return math.exp(-2.0 * self.alpha**2 * (1.0 - self.t**2))

    @property
    def basis_overlap(self) -> float:
        """Overlap of the decayed basis states <t a|-t a> = exp(-2 t^2 alpha^2)."""
        return math.exp(-2.0 * (self.t * self.alpha) ** 2)


@dataclass(frozen=True)
class DecayFactors:
    """The two scalar factors every downstream closed form depends on."""

    coherence: float
    overlap: float

    @property
    def product(self) -> float:
        """coherence * overlap = exp(-2 alpha^2), independent of t."""
        return self.coherence * self.overlap


def decay_factors(params: ChannelParams) -> DecayFactors:
    return DecayFactors(params.coherence_factor, params.basis_overlap)


def damping_kraus(kind: ModeKind, t: float) -> list[np.ndarray]:
    """Kraus family of single-mode photon loss with amplitude decay t.

    Polarization: the photon survives with amplitude t or escapes to the
    vacuum level. Fock/qubit: the standard amplitude-damping ladder with
    transmission eta = t^2. The family is complete: sum K^dag K = identity.
    """
    if not 0.0 < t <= 1.0:
        raise ValueError(f"t must be in (0, 1], got {t!r}")
    if kind.label == "polarization":
        k0 = np.diag([t, t, 1.0]).astype(complex)
        k1 = np.zeros((3, 3), dtype=complex)
        k1[VAC_IDX, H_IDX] = math.sqrt(1.0 - t * t)
        k2 = np.zeros((3, 3), dtype=complex)
        k2[VAC_IDX, V_IDX] = math.sqrt(1.0 - t * t)
        ops = [k0, k1, k2]
    else:
        # fock and qubit modes share the bosonic ladder (a qubit is Fock(2))
        d = kind.dim
        eta = t * t
        ops = []
        for k in range(d):
            kk = np.zeros((d, d), dtype=complex)
            for n in range(k, d):
                kk[n - k, n] = math.sqrt(math.comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
            ops.append(kk)
    # at t = 1 every loss operator vanishes; keep the family minimal
    return [k for k in ops if np.any(k)]


def _embed(op: np.ndarray, dims: tuple[int, ...], mode: int) -> np.ndarray:
    left = np.eye(math.prod(dims[:mode]))
    right = np.eye(math.prod(dims[mode + 1:]))
    return np.kron(np.kron(left, op), right)


def evolve(rho: DensityOperator, t: float) -> DensityOperator:
    """Apply photon loss with decay t to every mode of a density operator."""
    mat = rho.matrix
    dims = rho.layout.dims
    for mode, kind in enumerate(rho.layout.modes):
        kraus = [_embed(k, dims, mode) for k in damping_kraus(kind, t)]
        mat = sum(k @ mat @ k.conj().T for k in kraus)
    return DensityOperator(rho.layout, mat)


def hybrid_pc_initial(alpha: float, dim: int | None = None) -> StateVector:
    """(|H>|a> + |V>|-a>)/sqrt(2) on polarization x Fock(dim)."""
    if dim is None:
        dim = default_fock_dim(alpha)
    ket_h = tensor(basis_ket(polarization_mode(), H_IDX), coherent_ket(alpha, dim))
    ket_v = tensor(basis_ket(polarization_mode(), V_IDX), coherent_ket(-alpha, dim))
    return StateVector(ket_h.layout, ket_h.amplitudes + ket_v.amplitudes).normalized()


def hybrid_ps_initial() -> StateVector:
    """(|H>|0> + |V>|1>)/sqrt(2) on polarization x qubit."""
    ket_h = tensor(basis_ket(polarization_mode(), H_IDX), basis_ket(qubit_mode(), 0))
    ket_v = tensor(basis_ket(polarization_mode(), V_IDX), basis_ket(qubit_mode(), 1))
    return StateVector(ket_h.layout, ket_h.amplitudes + ket_v.amplitudes).normalized()


def _pol_dyad(i: int, j: int) -> np.ndarray:
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


def rho_pc_analytic(params: ChannelParams, dim: int | None = None) -> DensityOperator:
    """Closed-form decohered polarization/coherent channel.

    The surviving polarization components ride on the decayed coherent
    dyadics |±t a><±t a|, the lost photon feeds the polarization vacuum, and
    the cross term is suppressed by t^2 * coherence_factor.
    """
    if dim is None:
        dim = default_fock_dim(params.alpha)
    t, alpha = params.t, params.alpha
    q = params.coherence_factor
    plus = coherent_ket(t * alpha, dim).amplitudes
    minus = coherent_ket(-t * alpha, dim).amplitudes
    dy_pp = np.outer(plus, plus.conj())
    dy_mm = np.outer(minus, minus.conj())
    dy_pm = np.outer(plus, minus.conj())
    t2 = t * t
    mat = 0.5 * (
        np.kron(t2 * _pol_dyad(H_IDX, H_IDX) + (1 - t2) * _pol_dyad(VAC_IDX, VAC_IDX), dy_pp)
        + np.kron(t2 * _pol_dyad(V_IDX, V_IDX) + (1 - t2) * _pol_dyad(VAC_IDX, VAC_IDX), dy_mm)
        + t2 * q * (np.kron(_pol_dyad(H_IDX, V_IDX), dy_pm)
                    + np.kron(_pol_dyad(V_IDX, H_IDX), dy_pm.conj().T))
    )
    return DensityOperator(layout_of(polarization_mode(), fock_mode(dim)), mat)


def rho_ps_analytic(params: ChannelParams) -> DensityOperator:
    """Closed-form decohered polarization/single-rail channel.

    Loss maps |1><1| of the single-rail qubit to the vacuum (a flip error)
    and the polarization photon to its vacuum level; the cross coherence
    carries a factor t^3.
    """
    t = params.t
    t2 = t * t
    dy0 = np.zeros((2, 2), dtype=complex)
    dy0[0, 0] = 1.0
    dy1 = np.zeros((2, 2), dtype=complex)
    dy1[1, 1] = 1.0
    dy01 = np.zeros((2, 2), dtype=complex)
    dy01[0, 1] = 1.0
    mat = 0.5 * (
        np.kron(t2 * _pol_dyad(H_IDX, H_IDX) + (1 - t2) * _pol_dyad(VAC_IDX, VAC_IDX), dy0)
        + np.kron(t2 * _pol_dyad(V_IDX, V_IDX) + (1 - t2) * _pol_dyad(VAC_IDX, VAC_IDX),
                  t2 * dy1 + (1 - t2) * dy0)
        + t ** 3 * (np.kron(_pol_dyad(H_IDX, V_IDX), dy01)
                    + np.kron(_pol_dyad(V_IDX, H_IDX), dy01.conj().T))
    )
    return DensityOperator(layout_of(polarization_mode(), qubit_mode()), mat)
