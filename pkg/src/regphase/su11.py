"""Eigenstates of the damped shift operator and their disk geometry.

For every z in the open unit disk, F has a normalized eigenstate

    |z> = (1-|z|^2)^((nu+1)/2) sum_n c_n z^n |n>,
    c_n = sqrt(G(nu+1+n) / (G(nu+1) n!)),

with negative-binomial number statistics.  These are discrete-series
su(1,1) coherent states in the one-oscillator (Holstein-Primakoff type)
realization

    K- = F (N+nu),  K+ = (N+nu) F+,  K0 = N + (nu+1)/2,

and they resolve the identity against the singular disk measure
(nu/pi) d^2z (1-|z|^2)^(-2).  In polar form the radial integral carries
the weight (1-t)^(nu-1) with t = rho^2, which a Gauss-Jacobi rule absorbs
exactly; the angular integral is a uniform grid.  The module also carries
the nu-independent scalar phase function whose disk average diagonalizes
the phase operator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from numpy.linalg import eigh

from .errors import DomainError, QuadratureUnderResolved, TailMassError
from .fock import FockOperator, Role, TruncatedSpace, _readonly
from .polar import PhaseParams, make_F

TAIL_WARN = 1e-10


@dataclass(frozen=True)
class DiskPoint:
    """Point rho e^{i theta} of the open unit disk, theta stored in [0, 2pi)."""

    rho: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise DomainError(f"need 0 <= rho < 1, got {self.rho}")
        object.__setattr__(self, "theta", float(self.theta) % (2 * np.pi))

    @property
    def z(self) -> complex:
        return self.rho * np.exp(1j * self.theta)


def log_cn(n, nu: float):
    """log of the discrete-series coefficient c_n."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (gammaln(nu + 1 + n) - gammaln(nu + 1.0) - gammaln(n + 1))


@dataclass(frozen=True)
class PhaseState:
    """Truncated eigenstate of F with analytically tracked tail mass.

    ``coeffs`` holds the exact infinite-space coefficients chopped at the
    space dimension; the state is deliberately NOT renormalized, so that
    sum |w_n|^2 + tail_mass = 1 and residual bounds stay honest.
    """

    space: TruncatedSpace
    params: PhaseParams
    point: DiskPoint
    coeffs: np.ndarray
    tail_mass: float

    def norm_squared(self) -> float:
        return float(np.real(np.vdot(self.coeffs, self.coeffs)))


def make_phase_state(space: TruncatedSpace, params: PhaseParams,
                     point: DiskPoint) -> PhaseState:
    """Eigenstate coefficients w_n = (1-rho^2)^((nu+1)/2) c_n rho^n e^{in theta}.

    The full-series normalization is the negative binomial identity
    sum_n ((nu+1)_n / n!) t^n = (1-t)^-(nu+1), so the truncation deficit
    (tail mass) is known without renormalizing.  A warning fires when the
    tail exceeds 1e-10: roughly, resolving radius rho needs
    M >> (nu+1) rho^2 / (1-rho^2).
    """
    m = space.dim
    nu = params.nu
    n = np.arange(m)
    if point.rho == 0.0:
        w = np.zeros(m, dtype=complex)
        w[0] = 1.0
        tail = 0.0
    else:
        log_mag = (0.5 * (nu + 1) * math.log1p(-point.rho ** 2)
                   + log_cn(n, nu) + n * math.log(point.rho))
        w = np.exp(log_mag) * np.exp(1j * n * point.theta)
        tail = max(0.0, 1.0 - float(np.sum(np.exp(2 * log_mag))))
    if tail > TAIL_WARN:
        warnings.warn(
            f"phase state tail mass {tail:.3e} at rho={point.rho}, M={m}; "
            f"need M well above (nu+1) rho^2/(1-rho^2) = "
            f"{(nu + 1) * point.rho ** 2 / (1 - point.rho ** 2):.1f}",
            stacklevel=2,
        )
    return PhaseState(space, params, point, _readonly(w), tail)


@dataclass(frozen=True)
class NumberStats:
    """Mean, variance and Mandel Q of a number distribution."""

    mean: float
    variance: float
    mandel_q: float


def number_stats(state: PhaseState) -> NumberStats:
    """Number statistics of a phase state, closed form cross-checked.

    Closed forms (negative binomial):  <N> = (1+nu) t/(1-t),
    Var N = (1+nu) t/(1-t)^2,  Q = t/(1-t) > 0,  with t = rho^2.
    The same moments are accumulated from the truncated coefficients and
    must agree to 1e-9 relative, else the truncation was too aggressive.
    """
    if state.tail_mass >= TAIL_WARN:
        raise TailMassError(
            f"tail mass {state.tail_mass:.3e} too large for moment formulas"
        )
    nu = state.params.nu
    t = state.point.rho ** 2
    mean = (1 + nu) * t / (1 - t)
    var = (1 + nu) * t / (1 - t) ** 2
    q = t / (1 - t)

    n = np.arange(state.space.dim)
    p = np.abs(state.coeffs) ** 2
    mean_d = float(np.sum(n * p))
    var_d = float(np.sum(n * n * p)) - mean_d ** 2
    assert np.isclose(mean, mean_d, rtol=1e-9, atol=1e-12), (mean, mean_d)
    assert np.isclose(var, var_d, rtol=1e-9, atol=1e-12), (var, var_d)
    return NumberStats(mean=mean, variance=var, mandel_q=q)


def make_su11_generators(space: TruncatedSpace, params: PhaseParams
                         ) -> tuple[FockOperator, FockOperator, FockOperator]:
    """Ladder pair K-, K+ and Cartan element K0 of the su(1,1) algebra.

    K- = F (N+nu) has entries sqrt((n+1)(n+1+nu)) on the superdiagonal;
    K0 = N + (nu+1)/2.  On the interior subblock the algebra closes as
    [K0, K+-] = +-K+-, [K-, K+] = 2 K0, with Casimir value
    kappa (kappa - 1), kappa = (nu+1)/2.
    """
    m = space.dim
    nu = params.nu
    km = np.zeros((m, m), dtype=complex)
    n = np.arange(m - 1)
    km[n, n + 1] = np.sqrt((n + 1.0) * (n + 1.0 + nu))
    kminus = FockOperator(space, km, Role.LADDER)
    k0 = FockOperator(space, np.diag(np.arange(m) + params.kappa).astype(complex), Role.NUMBER)
    return kminus, kminus.adjoint(), k0


def radial_rule(nu: float, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule on [0, 1] for the singular weight (1-t)^(nu-1).

    Golub-Welsch on the Jacobi recurrence with exponents (nu-1, 0): nodes
    are eigenvalues of the symmetrized three-term matrix, weights come
    from the first eigenvector components.  Integrates t^j (1-t)^(nu-1)
    exactly for j <= 2 n_nodes - 1; the closed-form values are Beta
    moments, which the test suite uses as the oracle.
    """
    if not nu > 0:
        raise DomainError(f"radial weight needs nu > 0, got {nu}")
    if n_nodes < 1:
        raise DomainError(f"need at least one node, got {n_nodes}")
    a, b = nu - 1.0, 0.0
    apb = a + b
    alpha = np.zeros(n_nodes)
    beta = np.zeros(n_nodes)
    alpha[0] = (b - a) / (apb + 2)
    beta[0] = math.exp((apb + 1) * math.log(2.0) + gammaln(a + 1) + gammaln(b + 1)
                       - gammaln(apb + 2))
    k = np.arange(1, n_nodes, dtype=float)
    alpha[1:] = (b * b - a * a) / ((2 * k + apb) * (2 * k + apb + 2))
    beta[1:] = (4 * k * (k + a) * (k + b) * (k + apb)
                / ((2 * k + apb) ** 2 * (2 * k + apb + 1) * (2 * k + apb - 1)))
    jac = np.diag(alpha) + np.diag(np.sqrt(beta[1:]), 1) + np.diag(np.sqrt(beta[1:]), -1)
    x, vecs = eigh(jac)
    w = beta[0] * vecs[0, :] ** 2
    # map [-1, 1] with weight (1-x)^a to [0, 1] with weight (1-t)^a
    return (x + 1.0) / 2.0, w * 2.0 ** (-nu)


@dataclass(frozen=True)
class DiskQuadrature:
    """Product rule for (nu/pi) integrals over the open unit disk.

    Radial: Gauss nodes/weights in t = rho^2 absorbing (1-t)^(nu-1).
    Angular: uniform grid on [0, 2pi), weight 1/N each for the normalized
    mean (1/2pi) d theta; exact for harmonics of order < N.
    """

    nu: float
    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_nodes: np.ndarray

    @property
    def n_radial(self) -> int:
        return len(self.radial_nodes)

    @property
    def n_angular(self) -> int:
        return len(self.angular_nodes)


def _readonly_real(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def disk_quadrature(params: PhaseParams, n_radial: int, n_angular: int) -> DiskQuadrature:
    if n_angular < 2 or n_angular % 2 != 0:
        raise DomainError(f"angular grid must be even and >= 2, got {n_angular}")
    t, w = radial_rule(params.nu, n_radial)
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    return DiskQuadrature(params.nu, _readonly_real(t), _readonly_real(w), _readonly_real(theta))


def completeness_residual(space: TruncatedSpace, params: PhaseParams,
                          quad: DiskQuadrature, n_max: int) -> float:
    """Max entrywise deviation of the disk average of |z><z| from identity.

    Assembles the (n_max+1)-square block of
    R = (nu/pi) int d^2mu(z) |z><z| using the exact coefficient series.
    Off-diagonals vanish by angular exactness; each diagonal entry is the
    Beta-moment identity nu c_n^2 B(nu, n+1) = 1, so the residual is pure
    roundoff when the exactness preconditions hold.
    """
    if quad.nu != params.nu:
        raise DomainError("quadrature was built for a different nu")
    if n_max > space.dim - 1:
        raise DomainError(f"n_max {n_max} exceeds dim-1 = {space.dim - 1}")
    if quad.n_angular <= 2 * n_max:
        raise QuadratureUnderResolved(
            f"angular rule needs N > 2 n_max = {2 * n_max}, got {quad.n_angular}"
        )
    if 2 * quad.n_radial - 1 < n_max:
        raise QuadratureUnderResolved(
            f"radial rule needs 2 N_r - 1 >= n_max = {n_max}, got N_r = {quad.n_radial}"
        )
    n = np.arange(n_max + 1)
    rho = np.sqrt(quad.radial_nodes)
    mono = np.exp(log_cn(n, params.nu))[None, :] * rho[:, None] ** n[None, :]
    radial = params.nu * (mono.T * quad.radial_weights) @ mono
    ang = np.exp(1j * np.outer(quad.angular_nodes, n))
    angular = (ang.conj().T @ ang) / quad.n_angular       # [r, s] -> delta_{r s}
    resid = radial * angular - np.eye(n_max + 1)
    return float(np.abs(resid).max())


def quantum_phase_function(params: PhaseParams, point: DiskPoint) -> float:
    """Scalar phase value attached to a disk point, independent of nu.

    phi0 + pi - 2 arctan[rho sin(theta-phi0) / (1 - rho cos(theta-phi0))],
    always strictly inside (phi0, phi0 + 2pi).  Reads only the reference
    phase; the damping parameter never enters.
    """
    d = point.theta - params.phi0
    return params.phi0 + np.pi - 2.0 * math.atan(
        point.rho * math.sin(d) / (1.0 - point.rho * math.cos(d))
    )


def quantum_phase_series(params: PhaseParams, point: DiskPoint, n_terms: int) -> float:
    """Fourier form phi0 + pi - 2 sum_k rho^k sin(k(theta-phi0))/k.

    Equivalent to the arctan form up to the geometric tail
    2 rho^(K+1) / ((K+1)(1-rho)).
    """
    k = np.arange(1, n_terms + 1, dtype=float)
    d = point.theta - params.phi0
    return params.phi0 + np.pi - 2.0 * float(np.sum(point.rho ** k * np.sin(k * d) / k))


def diagonal_phase_expectation(state: PhaseState, phi_op: FockOperator) -> float:
    """Rayleigh quotient <z|Phi|z> / <z|z> of the truncated state."""
    w = state.coeffs
    val = np.vdot(w, phi_op.entries @ w) / np.vdot(w, w)
    return float(np.real(val))


def aharonov_map(alpha: complex, k: float) -> tuple[DiskPoint, PhaseParams]:
    """Disk parameters of the generalized-annihilation eigenstate |alpha, k>.

    The eigenstate of sqrt(k+1) F with eigenvalue alpha is the phase state
    at z = alpha / sqrt(k+1) and nu = k; as k grows with alpha fixed these
    converge in norm to the Glauber coherent state |alpha>.
    """
    if not k > 0:
        raise DomainError(f"need k > 0, got {k}")
    if abs(alpha) >= math.sqrt(k + 1):
        raise DomainError(f"need |alpha| < sqrt(k+1), got |{alpha}| vs sqrt({k + 1})")
    z = alpha / math.sqrt(k + 1)
    return DiskPoint(rho=abs(z), theta=float(np.angle(z))), PhaseParams(nu=float(k))


def displacement_state_coeffs(space: TruncatedSpace, params: PhaseParams,
                              point: DiskPoint) -> np.ndarray:
    """Vacuum hit by exp(xi e^{i theta} K+ - xi e^{-i theta} K-), xi = atanh(rho).

    Matrix exponential (scaling and squaring) on the truncated generators;
    trustworthy only while the state support stays well inside the space,
    i.e. small rho and generous dim.
    """
    if point.rho >= 1.0:
        raise DomainError("rho must be < 1")
    kminus, kplus, _ = make_su11_generators(space, params)
    xi = math.atanh(point.rho)
    gen = xi * np.exp(1j * point.theta) * kplus.entries - xi * np.exp(-1j * point.theta) * kminus.entries
    from scipy.linalg import expm

    return expm(gen) @ space.basis_vector(0)
