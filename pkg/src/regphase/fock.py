"""Truncated Fock space and the classical ladder operators.

Everything in this package lives on the span of the number states
|0>, ..., |M-1>.  Operators are honest dense M x M complex matrices;
identities that hold exactly on the infinite space acquire corner
artifacts at level M-1, so every identity test declares which subblock
it runs on.  The basic objects are

    E  = sum_n |n><n+1|          (lowering shift, a contraction)
    E+ = sum_n |n+1><n|          (raising shift, an isometry)
    N  = diag(0, 1, ..., M-1)
    A  = E sqrt(N),  A+ = sqrt(N) E+   (oscillator amplitude)

with E E+ = 1 - |M-1><M-1| and E+ E = 1 - |0><0| on the truncated space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TruncationOverflow

DROP_TOL = 1e-15  # coefficient magnitude below which a level counts as unoccupied


class Role(enum.Enum):
    """Semantic tag recording what an operator matrix represents."""

    LADDER = "ladder"
    NUMBER = "number"
    EXP_PHASE = "exp_phase"
    PHASE_OP = "phase_op"
    POVM_ELEMENT = "povm_element"
    PROJECTOR_FN = "projector_fn"
    GENERIC = "generic"


@dataclass(frozen=True)
class TruncatedSpace:
    """Fock space truncated to the lowest ``dim`` number states."""

    dim: int

    def __post_init__(self):
        if self.dim < 4:
            raise DomainError(f"need dim >= 4 for meaningful identity tests, got {self.dim}")

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def basis_vector(self, n: int) -> np.ndarray:
        if not 0 <= n < self.dim:
            raise DomainError(f"level {n} outside [0, {self.dim})")
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1.0
        return v

    def projector(self, n: int) -> np.ndarray:
        """Dyad |n><n| as a dense matrix."""
        v = self.basis_vector(n)
        return np.outer(v, v.conj())


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FockOperator:
    """Dense complex matrix on a TruncatedSpace with a semantic role tag."""

    space: TruncatedSpace
    entries: np.ndarray
    role: Role = Role.GENERIC

    def __post_init__(self):
        m = self.space.dim
        e = np.asarray(self.entries)
        if e.shape != (m, m):
            raise DomainError(f"entries shape {e.shape} does not match space dim {m}")
        object.__setattr__(self, "entries", _readonly(e))

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.space, self.entries.conj().T, self.role)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.entries @ other.entries)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.entries + other.entries)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.entries - other.entries)

    def __rmul__(self, scalar: complex) -> "FockOperator":
        return FockOperator(self.space, scalar * self.entries)

    def __neg__(self) -> "FockOperator":
        return FockOperator(self.space, -self.entries)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())


def commutator(x: FockOperator, y: FockOperator) -> FockOperator:
    return FockOperator(x.space, x.entries @ y.entries - y.entries @ x.entries)


def interior(entries: np.ndarray, margin: int) -> np.ndarray:
    """Leading subblock untouched by truncation for powers up to ``margin``.

    Rows/columns with index <= M-1-margin, the convention every identity
    test uses to state its truncation-safety precondition.
    """
    m = entries.shape[0] - margin
    if m < 1:
        raise DomainError(f"margin {margin} leaves no interior for dim {entries.shape[0]}")
    return entries[:m, :m]


@dataclass(frozen=True)
class FockState:
    """Unit-norm coefficient vector over the truncated number basis.

    Normalized on construction; ``support_cutoff`` is the largest level
    whose coefficient magnitude exceeds the drop tolerance, and drives
    the truncation-safety preconditions of the shift operations.
    """

    space: TruncatedSpace
    coeffs: np.ndarray
    support_cutoff: int = field(default=-1)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.space.dim,):
            raise DomainError(f"coefficient length {c.shape} does not match dim {self.space.dim}")
        nrm = np.linalg.norm(c)
        if nrm < DROP_TOL:
            raise DomainError("cannot normalize a (numerically) zero vector")
        c = c / nrm
        occupied = np.nonzero(np.abs(c) > DROP_TOL)[0]
        object.__setattr__(self, "coeffs", _readonly(c))
        object.__setattr__(self, "support_cutoff", int(occupied[-1]))

    @classmethod
    def number_state(cls, space: TruncatedSpace, n: int) -> "FockState":
        return cls(space, space.basis_vector(n))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def make_ladder(space: TruncatedSpace) -> tuple[FockOperator, FockOperator]:
    """Shift operators E (lowering) and E+ (raising).

    <n|E|n+1> = 1 for 0 <= n <= M-2.  On the truncated space
    E E+ = 1 - |M-1><M-1|; the corner projector is a truncation artifact
    with no infinite-space counterpart.
    """
    m = space.dim
    e = np.zeros((m, m), dtype=complex)
    idx = np.arange(m - 1)
    e[idx, idx + 1] = 1.0
    E = FockOperator(space, e, Role.LADDER)
    return E, E.adjoint()


def make_number(space: TruncatedSpace) -> FockOperator:
    """Number operator diag(0, 1, ..., M-1)."""
    return FockOperator(space, np.diag(np.arange(space.dim, dtype=float)).astype(complex), Role.NUMBER)


def make_amplitude(space: TruncatedSpace) -> tuple[FockOperator, FockOperator]:
    """Oscillator amplitude A = E sqrt(N) and its adjoint.

    <n|A|n+1> = sqrt(n+1); A+ A = N holds exactly on the full truncated
    space, while [A, A+] = 1 only on the subblock n <= M-2.
    """
    m = space.dim
    a = np.zeros((m, m), dtype=complex)
    idx = np.arange(m - 1)
    a[idx, idx + 1] = np.sqrt(idx + 1.0)
    A = FockOperator(space, a, Role.LADDER)
    return A, A.adjoint()


def apply_power_shift(op_kind: str, k: int, psi: FockState) -> np.ndarray:
    """Coefficients of E^k |psi> or (E+)^k |psi| on the truncated space.

    E^k moves c_{k+n} to level n (contraction: norm may shrink);
    (E+)^k moves c_n to level k+n and preserves the norm exactly,
    provided nothing spills past level M-1.

    Returns the raw (possibly unnormalized) coefficient vector.

    Raises:
        TruncationOverflow: for op_kind "Eplus" when
            support_cutoff + k > M-1 (amplitude would be lost).
        DomainError: unknown op_kind or negative k.
    """
    if k < 0:
        raise DomainError(f"power must be nonnegative, got {k}")
    m = psi.space.dim
    out = np.zeros(m, dtype=complex)
    if op_kind == "E":
        if k < m:
            out[: m - k] = psi.coeffs[k:]
    elif op_kind == "Eplus":
        if psi.support_cutoff + k > m - 1:
            raise TruncationOverflow(
                f"raising by {k} moves support {psi.support_cutoff} past level {m - 1}"
            )
        out[k : k + m - k] = psi.coeffs[: m - k]
    else:
        raise DomainError(f"op_kind must be 'E' or 'Eplus', got {op_kind!r}")
    return out


def coherent_state_coeffs(space: TruncatedSpace, alpha: complex) -> np.ndarray:
    """Truncated Glauber coherent-state coefficients exp(-|a|^2/2) a^n / sqrt(n!).

    Raw truncation of the infinite series: the vector norm falls short of
    one by the (usually negligible) tail mass.
    """
    from scipy.special import gammaln

    n = np.arange(space.dim)
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) + 1e-300) - 0.5 * gammaln(n + 1.0)
    phase = np.exp(1j * n * np.angle(alpha)) if alpha != 0 else np.ones(space.dim)
    out = np.exp(log_mag) * phase
    if alpha == 0:
        out = np.zeros(space.dim, dtype=complex)
        out[0] = 1.0
    return out
