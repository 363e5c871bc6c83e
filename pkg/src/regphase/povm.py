"""Positive operator family resolving the phase operator.

At every absolute angle phi the truncated Fourier sum

    P_phi = (1/2pi) sum_{|k| <= K} F_k e^{-ik phi},
    F_k = F^k (k >= 0),  (F+)^|k| (k < 0),

has unit-trace-density diagonal 1/2pi, integrates to the identity over any
2pi window, and recovers the phase operator through the first-moment
weights of the saw-tooth.  The running integral E_psi of the family plays
the role of a (non-orthogonal) spectral family: its derivative in psi is
P_psi, it vanishes at the window start and reaches the identity at the
window end.  Tracing against a density operator gives the phase
probability distribution G and density g; the same g comes out of a disk
integral of the Poisson kernel against the state's R-function, which this
module evaluates with the identical quadrature engine used for the
completeness proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionError, DomainError, GridUnderResolved,
                     InvalidDensity, QuadratureUnderResolved)
from .fock import FockOperator, Role, TruncatedSpace, _readonly
from .phase_op import SeriesBudget, phase_density_series
from .polar import PhaseParams, f_weight_log
from .su11 import DiskPoint, DiskQuadrature, log_cn, make_phase_state

_SUPPORT_TOL = 1e-14


@dataclass(frozen=True)
class PhaseGrid:
    """Strictly increasing angles in the half-open window (phi0, phi0+2pi]."""

    phi0: float
    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 1 or len(p) < 2:
            raise DomainError("grid needs at least two points")
        if np.any(np.diff(p) <= 0):
            raise DomainError("grid points must be strictly increasing")
        if p[0] <= self.phi0 - 1e-12 or not p[0] > self.phi0 or p[-1] > self.phi0 + 2 * np.pi + 1e-12:
            raise DomainError("grid points must lie in (phi0, phi0 + 2pi]")
        object.__setattr__(self, "points", _readonly(p).real)

    @classmethod
    def uniform(cls, phi0: float, n_points: int) -> "PhaseGrid":
        """n_points equally spaced angles ending exactly at phi0 + 2pi."""
        pts = phi0 + 2 * np.pi * np.arange(1, n_points + 1) / n_points
        return cls(phi0=phi0, points=pts)

    @property
    def spacing(self) -> float:
        d = np.diff(self.points)
        if not np.allclose(d, d[0], rtol=0, atol=1e-12):
            raise DomainError("spacing is only defined for uniform grids")
        return float(d[0])


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive-semidefinite, unit-trace matrix on the space."""

    space: TruncatedSpace
    entries: np.ndarray
    trace: float = field(default=1.0)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (self.space.dim, self.space.dim):
            raise InvalidDensity(f"shape {e.shape} does not match dim {self.space.dim}")
        if np.abs(e - e.conj().T).max() > 1e-12:
            raise InvalidDensity("matrix is not Hermitian to 1e-12")
        tr = float(np.real(np.trace(e)))
        if abs(tr - 1.0) > 1e-12:
            raise InvalidDensity(f"trace {tr} differs from 1 beyond 1e-12")
        if np.linalg.eigvalsh(e).min() < -1e-10:
            raise InvalidDensity("matrix has an eigenvalue below -1e-10")
        object.__setattr__(self, "entries", _readonly(e))
        object.__setattr__(self, "trace", tr)

    @classmethod
    def from_pure(cls, space: TruncatedSpace, coeffs) -> "DensityOperator":
        c = np.asarray(coeffs, dtype=complex)
        c = c / np.linalg.norm(c)
        return cls(space, np.outer(c, c.conj()))

    @classmethod
    def from_mixture(cls, space: TruncatedSpace, weighted_states) -> "DensityOperator":
        """Convex mixture of pure states given as (weight, coeffs) pairs."""
        out = np.zeros((space.dim, space.dim), dtype=complex)
        total = 0.0
        for w, coeffs in weighted_states:
            if w < 0:
                raise InvalidDensity("mixture weights must be nonnegative")
            c = np.asarray(coeffs, dtype=complex)
            c = c / np.linalg.norm(c)
            out += w * np.outer(c, c.conj())
            total += w
        return cls(space, out / total)

    @classmethod
    def number_state(cls, space: TruncatedSpace, n: int) -> "DensityOperator":
        return cls(space, space.projector(n))

    def support_cutoff(self) -> int:
        """Largest Fock index carrying any matrix element above tolerance."""
        mask = np.abs(self.entries) > _SUPPORT_TOL
        idx = np.nonzero(mask.any(axis=0) | mask.any(axis=1))[0]
        return int(idx[-1]) if len(idx) else 0


def make_P_phi(space: TruncatedSpace, params: PhaseParams, budget: SeriesBudget,
               phi: float) -> FockOperator:
    """Phase density operator at absolute angle phi, truncated at budget.K.

    Hermitian with constant diagonal 1/2pi; entries reproduce
    f_{|r-s|}(min)^(1/2) e^{i(r-s) phi} / 2pi for |r-s| <= K.  Finite-K
    positivity is approximate: the dropped band can push the lowest
    eigenvalue slightly below zero, within the dropped-band row-sum bound
    (exact positive semidefiniteness returns at K = dim - 1).
    """
    if budget.K > space.dim - 1:
        raise DimensionError(f"series order {budget.K} exceeds dim-1 = {space.dim - 1}")
    return FockOperator(space, phase_density_series(space, params, budget.K, phi),
                        Role.POVM_ELEMENT)


def dropped_band_psd_slack(space: TruncatedSpace, params: PhaseParams, K: int) -> float:
    """Rigorous floor on how negative the lowest eigenvalue of P_phi can go.

    The exact (K = dim-1) matrix is a principal corner of a positive
    operator, hence PSD; truncating at K drops the bands |r-s| > K whose
    operator norm is at most the worst row sum (1/pi) sum_{k>K} max_n
    f_k(n)^(1/2) over entries actually present.
    """
    m = space.dim
    total = 0.0
    for k in range(K + 1, m):
        total += float(np.exp(0.5 * f_weight_log(m - 1 - k, k, params.nu)))
    return total / np.pi


def poisson_kernel(point: DiskPoint, phi0: float, phi_prime: float) -> float:
    """(1/2pi) (1-rho^2) / (1 - 2 rho cos(theta-phi0-phi') + rho^2)."""
    d = point.theta - phi0 - phi_prime
    return float((1 - point.rho ** 2)
                 / (1 - 2 * point.rho * np.cos(d) + point.rho ** 2) / (2 * np.pi))


def poisson_kernel_series(point: DiskPoint, phi0: float, phi_prime: float,
                          n_terms: int) -> float:
    """Cosine-series form (1/2pi)[1 + 2 sum_k rho^k cos(k(theta-phi0-phi'))]."""
    d = point.theta - phi0 - phi_prime
    k = np.arange(1, n_terms + 1, dtype=float)
    return float((1.0 + 2.0 * np.sum(point.rho ** k * np.cos(k * d))) / (2 * np.pi))


def classical_projector(psi_cut: float, phi: float, phi0: float) -> int:
    """Indicator of the arc (phi0, psi_cut] on the circle, 2pi-periodic.

    Closed at the cut (value 1 exactly at phi = psi_cut), open at the
    window start (value 0 exactly at phi = phi0).  Idempotent, and nested:
    e_chi e_psi = e_chi whenever chi <= psi.
    """
    if not phi0 < psi_cut < phi0 + 2 * np.pi:
        raise DomainError(f"cut {psi_cut} outside (phi0, phi0 + 2pi)")
    rel = (phi - phi0) % (2 * np.pi)
    return int(0.0 < rel <= psi_cut - phi0)


def quantum_projector_kernel(point: DiskPoint, psi_cut: float, phi0: float,
                             n_terms: int) -> float:
    """Disk kernel whose boundary limit is the classical arc indicator.

    (1/2pi) { psi-phi0
              + sum_k (i/k)(e^{-ik(psi-phi0)} - 1)(z e^{-i phi0})^k
              - sum_k (i/k)(e^{+ik(psi-phi0)} - 1)(z* e^{+i phi0})^k }.
    The two truncated series are mutual negatives of conjugates, so the
    imaginary part must cancel; it is asserted below 1e-12.  Independent
    of nu.  At rho = 0 the value is (psi-phi0)/2pi; as rho -> 1 it tends
    to the classical indicator away from the jump points.
    """
    dpsi = psi_cut - phi0
    if not 0.0 <= dpsi <= 2 * np.pi + 1e-12:
        raise DomainError(f"cut {psi_cut} outside [phi0, phi0 + 2pi]")
    k = np.arange(1, n_terms + 1, dtype=float)
    w = point.z * np.exp(-1j * phi0)
    s_fwd = np.sum((1j / k) * (np.exp(-1j * k * dpsi) - 1.0) * w ** k)
    s_bwd = np.sum((1j / k) * (np.exp(+1j * k * dpsi) - 1.0) * np.conj(w) ** k)
    val = (dpsi + s_fwd - s_bwd) / (2 * np.pi)
    assert abs(val.imag) <= 1e-12, f"projector kernel picked up imag part {val.imag}"
    return float(val.real)


def make_E_psi(space: TruncatedSpace, params: PhaseParams, budget: SeriesBudget,
               psi_cut: float) -> FockOperator:
    """Running integral of the density family from phi0 up to psi_cut.

    E_psi = ((psi-phi0)/2pi) 1
            + (1/2pi) sum_{0<|k|<=K} (i/k)(e^{-ik(psi-phi0)} - 1) F_k e^{-ik phi0}.

    Hermitian; vanishes at psi = phi0 (limit convention for the open end)
    and equals the identity exactly at psi = phi0 + 2pi.  The derivative
    in psi is the density operator at the same angle.
    """
    if budget.K > space.dim - 1:
        raise DimensionError(f"series order {budget.K} exceeds dim-1 = {space.dim - 1}")
    dpsi = psi_cut - params.phi0
    if not -1e-12 <= dpsi <= 2 * np.pi + 1e-12:
        raise DomainError(f"cut {psi_cut} outside [phi0, phi0 + 2pi]")
    from .polar import fk_matrix

    out = (dpsi / (2 * np.pi)) * np.eye(space.dim, dtype=complex)
    for k in range(1, budget.K + 1):
        fk = fk_matrix(space, params, k)
        coeff = (1j / k) * (np.exp(-1j * k * dpsi) - 1.0) * np.exp(-1j * k * params.phi0)
        out += (coeff * fk + np.conj(coeff) * fk.conj().T) / (2 * np.pi)
    return FockOperator(space, out, Role.PROJECTOR_FN)


@dataclass(frozen=True)
class SpectralResolutionReport:
    """Residuals of the wide-sense spectral resolution on a uniform grid."""

    max_err_identity: float
    max_err_fk: float
    max_err_phi: float


def spectral_resolution_check(space: TruncatedSpace, params: PhaseParams,
                              budget: SeriesBudget, grid: PhaseGrid
                              ) -> SpectralResolutionReport:
    """Recover F_k and the phase operator from density samples on the grid.

    The rectangle rule on the uniform circle grid is exact for the
    trigonometric-polynomial integrands e^{ik phi} P_phi once the grid has
    more points than twice the series order, so each F_k is recovered at
    roundoff.  The phase operator itself carries the non-periodic
    saw-tooth factor, which the rectangle rule cannot integrate to
    roundoff; it is reconstructed from the recovered F_k with the exact
    first-moment coefficients (phi0 + pi at k = 0, (i/k) e^{-ik phi0}
    otherwise), an exact product rule for this integrand class.
    """
    K = budget.K
    n_phi = len(grid.points)
    if n_phi <= 2 * K:
        raise GridUnderResolved(f"need more than 2K = {2 * K} grid points, got {n_phi}")
    if abs(grid.phi0 - params.phi0) > 1e-12:
        raise DomainError("grid window must start at params.phi0")
    dphi = grid.spacing

    m = space.dim
    samples = np.empty((n_phi, m, m), dtype=complex)
    for j, phi in enumerate(grid.points):
        samples[j] = phase_density_series(space, params, K, phi)

    from .polar import fk_matrix

    err_id = np.abs(samples.sum(axis=0) * dphi - np.eye(m)).max()
    err_fk = 0.0
    recovered = {}
    for k in range(-K, K + 1):
        rec = np.tensordot(np.exp(1j * k * grid.points), samples, axes=(0, 0)) * dphi
        recovered[k] = rec
        err_fk = max(err_fk, np.abs(rec - fk_matrix(space, params, k)).max())

    phi0 = params.phi0
    phi_rec = (phi0 + np.pi) * recovered[0]
    for k in range(1, K + 1):
        phi_rec += (1j / k) * (recovered[k] * np.exp(-1j * k * phi0)
                               - recovered[-k] * np.exp(1j * k * phi0))
    from .phase_op import make_Phi_series

    phi_direct = make_Phi_series(space, params, budget).entries
    err_phi = np.abs(phi_rec - phi_direct).max()
    return SpectralResolutionReport(float(err_id), float(err_fk), float(err_phi))


def fk_trace(rho_op: DensityOperator, params: PhaseParams, k: int) -> complex:
    """Tr[rho F_k]; conjugate-symmetric in k for Hermitian rho."""
    m = rho_op.space.dim
    a = abs(k)
    if a >= m:
        return 0j
    if a == 0:
        return complex(rho_op.trace)
    s = np.arange(m - a)
    half = np.exp(0.5 * f_weight_log(s, a, params.nu))
    val = complex(np.sum(rho_op.entries[s + a, s] * half))
    return val if k >= 0 else np.conj(val)


def phase_distribution(rho_op: DensityOperator, params: PhaseParams,
                       budget: SeriesBudget, grid: PhaseGrid
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Distribution G(psi) = Tr[rho E_psi] and density g(psi) = Tr[rho P_psi].

    Evaluated through the harmonic traces tau_k = Tr[rho F_k], so the
    whole grid costs one pass over the density matrix bands.  G runs from
    ~0 to exactly 1 at the window end; g integrates to 1 over the window
    and can dip below zero only within the truncation slack.
    """
    if budget.K > rho_op.space.dim - 1:
        raise DimensionError("series order exceeds space")
    K = budget.K
    taus = np.array([fk_trace(rho_op, params, k) for k in range(K + 1)])
    psi = grid.points
    rel = psi - grid.phi0
    g = np.full(len(psi), float(np.real(taus[0])) / (2 * np.pi))
    G = rel / (2 * np.pi) * float(np.real(taus[0]))
    for k in range(1, K + 1):
        phase_k = taus[k] * np.exp(-1j * k * psi)
        g += 2.0 * np.real(phase_k) / (2 * np.pi)
        coeff = (1j / k) * (np.exp(-1j * k * rel) - 1.0) * np.exp(-1j * k * grid.phi0) * taus[k]
        G += 2.0 * np.real(coeff) / (2 * np.pi)
    return G, g


def _q_grid(rho_op: DensityOperator, params: PhaseParams, quad: DiskQuadrature,
            n_support: int) -> np.ndarray:
    """R-function over the quadrature grid, rescaled by (1-t)^-(nu+1).

    Q(t_i, theta_j) = sum_{r,s <= n_support} c_r c_s rho_i^{r+s}
                      e^{i(s-r) theta_j} rho[r, s]
    is a trigonometric polynomial of harmonic order <= n_support whose
    radial harmonics are integer powers of t, which keeps the Jacobi rule
    exact.
    """
    n = np.arange(n_support + 1)
    rho_r = np.sqrt(quad.radial_nodes)
    mono = np.exp(log_cn(n, params.nu))[None, :] * rho_r[:, None] ** n[None, :]
    ang = np.exp(1j * np.outer(quad.angular_nodes, n))          # (Nt, n)
    block = rho_op.entries[: n_support + 1, : n_support + 1]
    # amp[i, n, j] = c_n rho_i^n e^{i n theta_j}
    amp = mono[:, :, None] * ang.T[None, :, :]
    return np.einsum("inj,nm,imj->ij", amp.conj(), block, amp)


def phase_density_disk(rho_op: DensityOperator, params: PhaseParams,
                       quad: DiskQuadrature, grid: PhaseGrid) -> np.ndarray:
    """Density g by disk integration of the Poisson kernel against R.

    g(phi) = (nu/2pi) int dt (1-t)^(nu-1) int dtheta p_phi(z) Q(t, theta),
    with the two state normalization factors and the singular measure
    regrouped into the Jacobi weight.  The angular convolution with the
    Poisson kernel is done per harmonic (its Fourier coefficients are
    rho^|m|), which keeps every factor inside the quadrature's exactness
    class; plain pointwise sampling of the kernel would need an angular
    grid tens of thousands of points wide to reach comparable accuracy.
    """
    if quad.nu != params.nu:
        raise DomainError("quadrature was built for a different nu")
    ns = rho_op.support_cutoff()
    if quad.n_angular <= 2 * ns:
        raise QuadratureUnderResolved(
            f"angular rule needs N > 2 support = {2 * ns}, got {quad.n_angular}")
    if 2 * quad.n_radial - 1 < ns:
        raise QuadratureUnderResolved(
            f"radial rule needs 2 N_r - 1 >= support = {ns}, got N_r = {quad.n_radial}")
    q = _q_grid(rho_op, params, quad, ns)
    qhat = np.fft.fft(q, axis=1) / quad.n_angular     # coefficient of e^{+im theta}
    rho_r = np.sqrt(quad.radial_nodes)
    out = np.zeros(len(grid.points), dtype=complex)
    for mharm in range(-ns, ns + 1):
        radial = np.sum(quad.radial_weights * rho_r ** abs(mharm) * qhat[:, mharm % quad.n_angular])
        out += radial * np.exp(1j * mharm * grid.points)
    g = params.nu * out / (2 * np.pi)
    assert np.abs(g.imag).max() <= 1e-12, "disk-form density picked up imaginary part"
    return g.real


def r_function(rho_op: DensityOperator, params: PhaseParams, point: DiskPoint) -> float:
    """Diagonal matrix element <z|rho|z> in the phase-state family, in [0, 1]."""
    state = make_phase_state(rho_op.space, params, point)
    w = state.coeffs
    return float(np.real(np.vdot(w, rho_op.entries @ w)))


def r_function_normalization(rho_op: DensityOperator, params: PhaseParams,
                             quad: DiskQuadrature) -> float:
    """Disk average (nu/pi) int d^2mu(z) <z|rho|z>, equal to Tr rho = 1."""
    ns = rho_op.support_cutoff()
    if quad.n_angular <= 2 * ns:
        raise QuadratureUnderResolved("angular rule under-resolved for this state")
    if 2 * quad.n_radial - 1 < ns:
        raise QuadratureUnderResolved("radial rule under-resolved for this state")
    q = _q_grid(rho_op, params, quad, ns)
    val = params.nu * np.sum(quad.radial_weights[:, None] * q) / quad.n_angular
    return float(np.real(val))


def loudon_reference_density(rho_op: DensityOperator, phis: np.ndarray) -> np.ndarray:
    """Undamped-limit density (1/2pi) <phi|rho|phi> from the singular dyad.

    |phi> = sum_n e^{i n phi} |n> is not normalizable, but for a state
    with finite support the sum is finite and exact.
    """
    ns = rho_op.support_cutoff()
    n = np.arange(ns + 1)
    block = rho_op.entries[: ns + 1, : ns + 1]
    e = np.exp(1j * np.outer(np.asarray(phis, float), n))       # (P, n)
    vals = np.einsum("pr,rs,ps->p", e.conj(), block, e) / (2 * np.pi)
    return vals.real


@dataclass(frozen=True)
class LoudonLimitReport:
    """Sup-norm distance of the damped density to its undamped limit."""

    nus: tuple
    deviations: tuple

    @property
    def final_deviation(self) -> float:
        return self.deviations[-1]


def loudon_limit_check(rho_op: DensityOperator, grid: PhaseGrid,
                       nu_sequence) -> LoudonLimitReport:
    """max_phi |g_nu - g_0| along a decreasing nu sequence.

    g_0 is the exact finite sum from the singular phase-state dyad.  The
    deviations must decrease monotonically along the sequence (each weight
    f_k(n) increases toward 1 as nu drops).
    """
    nus = tuple(float(v) for v in nu_sequence)
    if any(b >= a for a, b in zip(nus, nus[1:])) or any(v <= 0 for v in nus):
        raise DomainError("nu sequence must be strictly decreasing and positive")
    g0 = loudon_reference_density(rho_op, grid.points)
    budget_k = rho_op.space.dim - 1
    devs = []
    for nu in nus:
        params = PhaseParams(nu=nu, phi0=grid.phi0)
        _, g = phase_distribution(rho_op, params,
                                  SeriesBudget(K=budget_k, tail_bound=0.0), grid)
        devs.append(float(np.abs(g - g0).max()))
    for a, b in zip(devs, devs[1:]):
        assert b < a, f"Loudon-limit deviation failed to decrease: {devs}"
    return LoudonLimitReport(nus=nus, deviations=tuple(devs))
