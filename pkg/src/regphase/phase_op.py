"""Hermitian phase operator as a damped operator Fourier series.

The classical saw-tooth phase on (phi0, phi0+2pi] has the Fourier series
phi0 + pi + sum_k (i/k)(e^{ik(phi-phi0)} - c.c.).  Substituting the damped
shift F for e^{i phi} gives the phase operator

    Phi_K = (phi0 + pi) 1 + sum_{k=1}^{K} (i/k) [F^k e^{-ik phi0}
                                                 - (F+)^k e^{+ik phi0}],

Hermitian at every K, with certified residual norm series_tail(K) from the
weight decay bounds.  The undamped (nu -> 0) limit reproduces the
Garrison-Wong kernel i/(s-r), whose bilinear form is bounded only through
Hilbert's double-series inequality; both the limit and the inequality are
implemented here as executable checks, together with the classical partial
sums and Fejér means they quantize.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .fock import FockOperator, FockState, Role, TruncatedSpace
from .polar import BoundReport, PhaseParams, f_weight_log, fk_matrix


@dataclass(frozen=True)
class SeriesBudget:
    """Truncation order K with its guaranteed residual norm.

    ``tail_bound`` is the truncated-space residual certificate
    series_tail_on_space(K, dim): powers F^k vanish identically for
    k >= dim, so the bound reaches exactly zero at K = dim - 1 even when
    the infinite-series chain decays too slowly to certify small targets.
    """

    K: int
    tail_bound: float

    def __post_init__(self):
        if self.K < 1:
            raise DomainError(f"series order must be >= 1, got {self.K}")
        if self.tail_bound < 0:
            raise DomainError("tail bound cannot be negative")


def budget_for_k(space: TruncatedSpace, report: BoundReport, K: int) -> SeriesBudget:
    if K >= space.dim:
        raise DimensionError(f"series order {K} >= dim {space.dim}")
    return SeriesBudget(K=K, tail_bound=report.series_tail_on_space(K, space.dim))


def solve_series_budget(space: TruncatedSpace, report: BoundReport,
                        target_tail: float) -> SeriesBudget:
    """Smallest K whose certified residual meets ``target_tail``.

    Monotone bisection on the decreasing tail bound.  Because the bound is
    exactly zero at K = dim - 1, every positive target is reachable.
    """
    if not target_tail > 0:
        raise DomainError(f"target tail must be positive, got {target_tail}")
    lo, hi = 1, space.dim - 1
    if report.series_tail_on_space(lo, space.dim) <= target_tail:
        return budget_for_k(space, report, lo)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if report.series_tail_on_space(mid, space.dim) <= target_tail:
            hi = mid
        else:
            lo = mid
    return budget_for_k(space, report, hi)


def worst_case_budget(space: TruncatedSpace, params: PhaseParams,
                      target_tail: float) -> SeriesBudget:
    """Budget certified for every basis state of the space.

    Uses the top number state, which maximizes the nu-moment and therefore
    the bound constant.
    """
    from .polar import norm_bound_report

    top = FockState.number_state(space, space.dim - 1)
    return solve_series_budget(space, norm_bound_report(top, params), target_tail)


def make_Phi_series(space: TruncatedSpace, params: PhaseParams,
                    budget: SeriesBudget) -> FockOperator:
    """Phase operator truncated at budget.K.

    Hermitian by the term structure; every diagonal entry equals
    phi0 + pi at any K >= 1 because F^k has empty diagonal.  Entries with
    |r-s| <= K coincide with the closed-form matrix elements exactly; the
    dropped |r-s| > K entries are covered by budget.tail_bound.
    """
    if budget.K > space.dim - 1:
        raise DimensionError(f"series order {budget.K} exceeds dim-1 = {space.dim - 1}")
    phi0 = params.phi0
    out = (phi0 + np.pi) * np.eye(space.dim, dtype=complex)
    for k in range(1, budget.K + 1):
        fk = fk_matrix(space, params, k)
        out += (1j / k) * (fk * np.exp(-1j * k * phi0)
                           - fk.conj().T * np.exp(1j * k * phi0))
    return FockOperator(space, out, Role.PHASE_OP)


def phi_matrix_element(r: int, s: int, params: PhaseParams) -> complex:
    """Closed-form Fock matrix element of the phase operator.

    (phi0 + pi) on the diagonal, else
    i/(s-r) * f_{|r-s|}(min(r,s))^(1/2) * e^{i(r-s) phi0}.
    """
    if r < 0 or s < 0:
        raise DomainError("Fock indices must be nonnegative")
    if r == s:
        return complex(params.phi0 + np.pi)
    k = abs(r - s)
    half = np.exp(0.5 * f_weight_log(min(r, s), k, params.nu))
    return (1j / (s - r)) * half * np.exp(1j * (r - s) * params.phi0)


def phi_matrix_closed_form(space: TruncatedSpace, params: PhaseParams) -> np.ndarray:
    """Dense matrix of phi_matrix_element over the full truncated space."""
    m = space.dim
    r = np.arange(m)
    diff = r[None, :] - r[:, None]                      # s - r
    mn = np.minimum(r[:, None], r[None, :])
    half = np.exp(0.5 * f_weight_log(mn, np.abs(diff), params.nu))
    with np.errstate(divide="ignore", invalid="ignore"):
        off = (1j / diff.astype(complex)) * half * np.exp(-1j * diff * params.phi0)
    out = np.where(diff == 0, params.phi0 + np.pi, off)
    return out.astype(complex)


def phase_density_series(space: TruncatedSpace, params: PhaseParams,
                         K: int, phi: float) -> np.ndarray:
    """Raw matrix (1/2pi) sum_{|k|<=K} F_k e^{-ik phi} at absolute angle phi."""
    if K > space.dim - 1:
        raise DimensionError(f"series order {K} exceeds dim-1 = {space.dim - 1}")
    out = np.eye(space.dim, dtype=complex) / (2 * np.pi)
    for k in range(1, K + 1):
        fk = fk_matrix(space, params, k)
        out += (fk * np.exp(-1j * k * phi) + fk.conj().T * np.exp(1j * k * phi)) / (2 * np.pi)
    return out


def make_number_phase_commutator(space: TruncatedSpace, params: PhaseParams,
                                 budget: SeriesBudget) -> tuple[FockOperator, FockOperator]:
    """[N, Phi_K] together with the independently built density at phi0.

    The identity [N, Phi_K] = i 1 - 2 pi i P_{phi0,K} holds term by term
    at every finite K ([N, F^k] = -k F^k is exact even on the truncated
    matrices), so it is asserted entrywise at 1e-12 before returning.

    The infinite-series statement converges strongly only for nu > 2; for
    smaller nu a warning records that the finite-dimensional identity has
    no infinite-space counterpart with a state-uniform certificate.
    """
    if budget.K > space.dim - 1:
        raise DimensionError(f"series order {budget.K} exceeds dim-1 = {space.dim - 1}")
    if params.nu <= 2:
        warnings.warn(
            f"number-phase commutator series lacks a strong-convergence "
            f"certificate for nu={params.nu} <= 2 (finite truncation is still exact)",
            stacklevel=2,
        )
    from .fock import make_number, commutator

    phi_op = make_Phi_series(space, params, budget)
    p0 = FockOperator(space,
                      phase_density_series(space, params, budget.K, params.phi0),
                      Role.POVM_ELEMENT)
    comm = commutator(make_number(space), phi_op)
    ident = 1j * space.identity() - 2j * np.pi * p0.entries
    defect = np.abs(comm.entries - ident).max()
    assert defect <= 1e-12, f"number-phase commutator identity broke: {defect:.3e}"
    return comm, p0


class GWBase(enum.Enum):
    """Base interval convention for the undamped (Garrison-Wong) kernel."""

    SYMMETRIC = "symmetric"   # (-pi, pi)
    SHIFTED = "shifted"       # (0, 2pi)


def gw_matrix_element(r: int, s: int, base: GWBase) -> complex:
    """Matrix element of the undamped phase kernel in the Fock basis."""
    if r < 0 or s < 0:
        raise DomainError("Fock indices must be nonnegative")
    if base is GWBase.SYMMETRIC:
        if r == s:
            return 0j
        return 1j * (-1.0) ** (r - s) / (r - s)
    if base is GWBase.SHIFTED:
        if r == s:
            return complex(np.pi)
        return 1j / (s - r)
    raise DomainError(f"unknown base {base!r}")


def hilbert_bilinear_check(chi: FockState, psi: FockState, r_max: int) -> float:
    """Symmetric partial double sums of the undamped bilinear form.

    T_r = sum_{n,m < r, n != m} conj(chi_m) psi_n / (n - m), checked
    against Hilbert's inequality |T_r| <= pi ||chi|| ||psi|| for every
    r <= r_max.  Returns max_r |T_r|.
    """
    if chi.support_cutoff >= r_max or psi.support_cutoff >= r_max:
        raise DomainError("states must be supported within r_max")
    x = chi.coeffs[:r_max].conj()
    y = psi.coeffs[:r_max]
    bound = np.pi * chi.norm() * psi.norm()
    t = 0j
    worst = 0.0
    for r in range(2, r_max + 1):
        j = r - 1
        m = np.arange(j)
        # add row n = j and column m = j of the kernel 1/(n-m)
        t += np.sum(x[m] * y[j] / (j - m)) + np.sum(x[j] * y[m] / (m - j))
        worst = max(worst, abs(t))
        assert abs(t) <= bound + 1e-12, f"Hilbert bound violated at r={r}: {abs(t)}"
    return worst


class ClassicalMode(enum.Enum):
    PARTIAL_SUM = "partial_sum"
    FEJER_MEAN = "fejer_mean"


@dataclass(frozen=True)
class ClassicalPhaseSeries:
    """Truncated classical Fourier reconstruction of the saw-tooth phase."""

    n_terms: int
    mode: ClassicalMode

    def __post_init__(self):
        if self.n_terms < 1:
            raise DomainError(f"need at least one term, got {self.n_terms}")


def classical_phase(series: ClassicalPhaseSeries, phi):
    """Partial sum s_n or Fejér mean sigma_n of the saw-tooth series at phi.

    s_n(phi) = pi - 2 sum_{k=1}^{n} sin(k phi)/k  suffers Gibbs overshoot
    at the jumps; the Fejér mean
    sigma_n = pi - 2 sum_{k=1}^{n} ((n-k+1)/n) sin(k phi)/k
    stays within [0, 2pi] everywhere (positive summability kernel).
    """
    phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
    k = np.arange(1, series.n_terms + 1, dtype=float)
    if series.mode is ClassicalMode.PARTIAL_SUM:
        coeff = 1.0 / k
    else:
        coeff = (series.n_terms - k + 1.0) / (series.n_terms * k)
    out = np.pi - 2.0 * np.sin(np.outer(phi_arr, k)) @ coeff
    if np.isscalar(phi) or np.asarray(phi).ndim == 0:
        return float(out[0])
    return out


def sawtooth(phi):
    """Exact 2pi-periodic saw-tooth (the function the series reconstruct)."""
    phi_arr = np.asarray(phi, dtype=float)
    return phi_arr - 2 * np.pi * np.floor(phi_arr / (2 * np.pi))


def gibbs_overshoot(n_terms: int, grid_points: int = 100_000) -> float:
    """Max of s_n above the saw-tooth supremum 2pi, by dense scan on (0, 2pi)."""
    phi = np.linspace(1e-9, 2 * np.pi - 1e-9, grid_points)
    s = classical_phase(ClassicalPhaseSeries(n_terms, ClassicalMode.PARTIAL_SUM), phi)
    return float(s.max() - 2 * np.pi)
