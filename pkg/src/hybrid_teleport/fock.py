"""Dense complex linear algebra over truncated Fock spaces and small optical modes.

States and operators are numpy arrays tagged with a :class:`ModeLayout` that
records the tensor factors, so multi-mode reshapes (partial trace, partial
transpose, mode permutation) stay explicit. Every value is immutable after
construction and every operation is a pure function, so everything here is
safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

# Basis order of the lossy polarization mode.
H_IDX, V_IDX, VAC_IDX = 0, 1, 2

COHERENT_TAIL_TOL = 1e-10
HERMITICITY_TOL = 1e-12
EIGENVALUE_TOL = 1e-10
TRACE_TOL = 1e-10


class TruncationError(ValueError):
    """Fock-space cutoff too small for the requested coherent amplitude."""


class LayoutError(ValueError):
    """Operands tagged with incompatible mode layouts."""


@dataclass(frozen=True)
class ModeKind:
    """One tensor factor of a composite Hilbert space.

    ``label`` is one of ``"polarization"`` (basis {|H>, |V>, |vac>}, always
    3-dimensional), ``"fock"`` (number basis |0>..|dim-1>) or ``"qubit"``
    (basis {|0>, |1>}, always 2-dimensional).
    """

    label: str
    dim: int

    def __post_init__(self) -> None:
        if self.label == "polarization":
            if self.dim != 3:
                raise ValueError("polarization mode is exactly 3-dimensional")
        elif self.label == "qubit":
            if self.dim != 2:
                raise ValueError("qubit mode is exactly 2-dimensional")
        elif self.label == "fock":
            if self.dim < 2:
                raise ValueError("fock mode needs dim >= 2")
        else:
            raise ValueError(f"unknown mode kind {self.label!r}")


def polarization_mode() -> ModeKind:
    return ModeKind("polarization", 3)


def fock_mode(dim: int) -> ModeKind:
    return ModeKind("fock", int(dim))


def qubit_mode() -> ModeKind:
    return ModeKind("qubit", 2)


@dataclass(frozen=True)
class ModeLayout:
    """Ordered tensor factors of a composite space."""

    modes: tuple[ModeKind, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("layout needs at least one mode")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m.dim for m in self.modes)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.modes)

    def select(self, indices) -> "ModeLayout":
        return ModeLayout(tuple(self.modes[i] for i in indices))


def layout_of(*modes: ModeKind) -> ModeLayout:
    return ModeLayout(tuple(modes))


def _check_same_layout(a, b) -> None:
    if a.layout != b.layout:
        raise LayoutError(f"layout mismatch: {a.layout} vs {b.layout}")


@dataclass(frozen=True)
class StateVector:
    """Pure state: complex amplitude vector tagged with its layout."""

    layout: ModeLayout
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.layout.total_dim,):
            raise LayoutError(
                f"amplitude length {amps.shape} does not match layout dim "
                f"{self.layout.total_dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n < 1e-150:
            raise ValueError("cannot normalize a (numerically) zero state")
        return StateVector(self.layout, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        _check_same_layout(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityOperator":
        return DensityOperator(
            self.layout, np.outer(self.amplitudes, self.amplitudes.conj())
        )


@dataclass(frozen=True)
class DensityOperator:
    """Dense Hermitian PSD operator tagged with its layout."""

    layout: ModeLayout
    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.layout.total_dim
        if mat.shape != (d, d):
            raise LayoutError(f"matrix shape {mat.shape} does not match layout dim {d}")
        object.__setattr__(self, "matrix", mat)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])

    def validate(self, normalized: bool = True) -> "DensityOperator":
        """Check Hermiticity, positivity and (optionally) unit trace; return self."""
        herm = self.hermiticity_defect()
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max |M - M^dag| = {herm:.3e}")
        lo = self.min_eigenvalue()
        if lo < -EIGENVALUE_TOL:
            raise ValueError(f"not PSD: min eigenvalue = {lo:.3e}")
        if normalized and abs(self.trace() - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {self.trace()!r} != 1")
        return self

    def normalized(self) -> "DensityOperator":
        tr = self.trace()
        if tr < 1e-150:
            raise ValueError("cannot normalize a zero-trace operator")
        return DensityOperator(self.layout, self.matrix / tr)


def basis_ket(kind: ModeKind, index: int) -> StateVector:
    """Single-mode computational basis vector |index>."""
    if not 0 <= index < kind.dim:
        raise ValueError(f"basis index {index} out of range for dim {kind.dim}")
    v = np.zeros(kind.dim, dtype=complex)
    v[index] = 1.0
    return StateVector(layout_of(kind), v)


def _coherent_amplitudes(amplitude: float, dim: int) -> np.ndarray:
    """Unnormalized truncated coherent amplitudes c_n = e^{-a^2/2} a^n / sqrt(n!)."""
    n = np.arange(dim)
    if amplitude == 0.0:
        c = np.zeros(dim)
        c[0] = 1.0
        return c
    log_c = -0.5 * amplitude * amplitude + n * np.log(abs(amplitude)) - 0.5 * gammaln(n + 1)
    c = np.exp(log_c)
    if amplitude < 0.0:
        c[1::2] *= -1.0
    return c


def coherent_tail_mass(amplitude: float, dim: int) -> float:
    """Probability weight of the coherent state beyond the truncation cut."""
    c = _coherent_amplitudes(amplitude, dim)
    return max(0.0, 1.0 - float(c @ c))


def coherent_ket(amplitude: float, dim: int) -> StateVector:
    """Truncated coherent state of real amplitude on a Fock(dim) mode.

    The amplitudes are renormalized after truncation; if the discarded tail
    mass exceeds ``COHERENT_TAIL_TOL`` the cutoff is too small and a
    :class:`TruncationError` is raised instead.
    """
    if dim < 2:
        raise ValueError("fock mode needs dim >= 2")
    c = _coherent_amplitudes(amplitude, dim)
    tail = 1.0 - float(c @ c)
    if tail > COHERENT_TAIL_TOL:
        raise TruncationError(
            f"coherent tail mass {tail:.3e} at dim={dim} exceeds {COHERENT_TAIL_TOL:g}; "
            f"increase the truncation for amplitude {amplitude!r}"
        )
    return StateVector(layout_of(fock_mode(dim)), c / np.linalg.norm(c))


def cat_ket(amplitude: float, sign: int, dim: int) -> StateVector:
    """Normalized even (sign=+1) or odd (sign=-1) superposition of |±amplitude>."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if sign == -1 and amplitude == 0.0:
        raise ValueError("odd superposition of |0> and |0> is the zero state")
    plus = _coherent_amplitudes(amplitude, dim)
    minus = _coherent_amplitudes(-amplitude, dim)
    for c in (plus, minus):
        tail = 1.0 - float(c @ c)
        if tail > COHERENT_TAIL_TOL:
            raise TruncationError(f"coherent tail mass {tail:.3e} at dim={dim}")
    v = plus + sign * minus
    return StateVector(layout_of(fock_mode(dim)), v.astype(complex)).normalized()


def default_fock_dim(alpha: float) -> int:
    """Truncation rule: even cutoff with coherent tail < 1e-10 up to sqrt(2)*alpha."""
    d = max(16, math.ceil(2 * alpha * alpha + 8 * alpha + 12))
    return d + (d % 2)


def tensor(a, b):
    """Kronecker product with concatenated layout (states or density operators)."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(
            ModeLayout(a.layout.modes + b.layout.modes),
            np.kron(a.amplitudes, b.amplitudes),
        )
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(
            ModeLayout(a.layout.modes + b.layout.modes),
            np.kron(a.matrix, b.matrix),
        )
    raise TypeError("tensor requires two StateVectors or two DensityOperators")


def permute_modes(obj, order):
    """Reorder tensor factors; ``order[i]`` is the old index of new mode i."""
    order = tuple(int(i) for i in order)
    n = len(obj.layout)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of 0..{n - 1}")
    dims = obj.layout.dims
    new_layout = obj.layout.select(order)
    if isinstance(obj, StateVector):
        arr = obj.amplitudes.reshape(dims).transpose(order).reshape(-1)
        return StateVector(new_layout, arr)
    if isinstance(obj, DensityOperator):
        full = obj.matrix.reshape(dims + dims)
        axes = list(order) + [n + i for i in order]
        d = obj.layout.total_dim
        return DensityOperator(new_layout, full.transpose(axes).reshape(d, d))
    raise TypeError("permute_modes requires a StateVector or DensityOperator")


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Trace out all modes not listed in ``keep`` (kept modes stay in order)."""
    n = len(rho.layout)
    keep = tuple(sorted({int(k) for k in keep}))
    if not keep:
        raise ValueError("keep must be a nonempty set of mode indices")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"mode index out of range in keep={keep}")
    dims = rho.layout.dims
    tensor_form = rho.matrix.reshape(dims + dims)
    ket = list(range(n))
    bra = [i if i not in keep else n + i for i in range(n)]
    out = list(keep) + [n + i for i in keep]
    reduced = np.einsum(tensor_form, ket + bra, out)
    d = math.prod(dims[k] for k in keep)
    return DensityOperator(rho.layout.select(keep), reduced.reshape(d, d))


def partial_transpose(rho: DensityOperator, mode: int) -> np.ndarray:
    """Transpose one tensor factor; returns a plain (Hermitian) matrix."""
    n = len(rho.layout)
    if not 0 <= mode < n:
        raise ValueError(f"mode index {mode} out of range")
    dims = rho.layout.dims
    full = rho.matrix.reshape(dims + dims)
    swapped = np.swapaxes(full, mode, n + mode)
    d = rho.layout.total_dim
    return np.ascontiguousarray(swapped.reshape(d, d))


def hermitian_eigenvalues(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Ascending real spectrum of the symmetrized (M + M^dag)/2."""
    m = np.asarray(m, dtype=complex)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > tol:
        raise ValueError(f"matrix not Hermitian within {tol:g}: defect {defect:.3e}")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


@lru_cache(maxsize=8)
def beam_splitter_50_50(dim: int) -> np.ndarray:
    """Balanced beam-splitter unitary on Fock(dim) x Fock(dim).

    Exponentiates (pi/4)(a1^dag a2 - a1 a2^dag) via an eigendecomposition of
    the Hermitian generator, so the result is unitary to roundoff. Coherent
    inputs transform as |g1, g2> -> |(g1+g2)/sqrt(2), (g2-g1)/sqrt(2)>; in
    particular |b, b> -> |sqrt(2) b, 0> and |b, -b> -> |0, -sqrt(2) b>.
    Exact on every photon-number sector below the truncation cut.
    """
    if dim < 2:
        raise ValueError("fock mode needs dim >= 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    generator = (np.pi / 4) * (np.kron(a.conj().T, a) - np.kron(a, a.conj().T))
    w, v = np.linalg.eigh(1j * generator)
    u = (v * np.exp(-1j * w)) @ v.conj().T
    u.setflags(write=False)
    return u


def parity_operator(dim: int) -> np.ndarray:
    """Photon-number parity (-1)^n; flips the sign of a coherent amplitude."""
    return np.diag((-1.0 + 0j) ** np.arange(dim))


def fidelity_pure(psi: StateVector, rho: DensityOperator) -> float:
    """Overlap <psi|rho|psi>, clamped to [0, 1] after a sanity check."""
    _check_same_layout(psi, rho)
    val = complex(psi.amplitudes.conj() @ rho.matrix @ psi.amplitudes)
    if abs(val.imag) > 1e-8 or val.real < -1e-8 or val.real > 1 + 1e-8:
        raise ValueError(f"fidelity {val!r} outside [0, 1] beyond tolerance")
    return float(min(1.0, max(0.0, val.real)))


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """(1/2) ||a - b||_1 for Hermitian a, b."""
    _check_same_layout(a, b)
    diff = a.matrix - b.matrix
    ev = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(0.5 * np.sum(np.abs(ev)))
