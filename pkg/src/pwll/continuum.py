"""One-dimensional continuum verifier for the exploration/exploitation bounds.

Solves the interval problems tau*u - (rho^2 u')'/rho = 0 with Dirichlet data
by second-order finite differences, evaluates the constant-density closed
forms, and checks the transcendental exploration condition and the general
plateau-density bound inequalities on parameter sweeps.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .errors import AssumptionViolated, BetaOutOfRange, NonPositiveDensity

__all__ = ["OPPOSITE", "SAME", "IntervalProblem", "IntervalSolution",
           "TrapezoidDensity", "solve_bvp", "opposite_closed_form",
           "same_closed_form", "midpoint_acquisition_constant",
           "check_exploration_condition", "ExplorationCheck",
           "check_general_1d_bounds", "BoundsReport", "moat_midpoint_check"]

OPPOSITE = "opposite"
SAME = "same"


@dataclass(frozen=True)
class IntervalProblem:
    """Two-point boundary problem on [0, R] with grid-sampled density.

    `kind` selects the boundary data: OPPOSITE solves the pair u0 (1 -> 0)
    and u1 (0 -> 1); SAME solves v0 (1 -> 1). `rho` may be a callable or an
    array of m+1 samples on the uniform grid.
    """

    R: float
    rho: np.ndarray
    tau: float
    kind: str
    m: int = 1024

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("interval length must be positive")
        if self.m < 64:
            raise ValueError("grid size m must be at least 64")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.kind not in (OPPOSITE, SAME):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        x = self.grid()
        rho = self.rho(x) if callable(self.rho) else np.asarray(self.rho, dtype=np.float64)
        if rho.shape != x.shape:
            raise ValueError(f"need {self.m + 1} density samples")
        if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
            raise NonPositiveDensity("density must be strictly positive and finite")
        object.__setattr__(self, "rho", rho)

    def grid(self):
        return np.linspace(0.0, self.R, self.m + 1)


@dataclass(frozen=True)
class IntervalSolution:
    """Grid solution(s), the acquisition values, and their minimizer."""

    x: np.ndarray
    u: np.ndarray               # (m+1, 1) for SAME, (m+1, 2) for OPPOSITE
    acquisition: np.ndarray
    argmin_x: float
    min_value: float


def solve_bvp(problem):
    """Solve the interval problem by centered second-order finite differences.

    Half-point coefficients use arithmetic means of the density. The
    tridiagonal system (scaled by rho_i to stay symmetric) is factored
    directly, both boundary columns sharing the factorization.

    Returns
    -------
    solution : IntervalSolution
        For OPPOSITE, acquisition = sqrt(u0^2 + u1^2); for SAME it is v0.
    """
    m, h = problem.m, problem.R / problem.m
    x = problem.grid()
    rho = problem.rho
    rho_half = ((rho[:-1] + rho[1:]) / 2.0) ** 2      # rho^2 at half points

    if problem.kind == OPPOSITE:
        bc = np.array([[1.0, 0.0], [0.0, 1.0]])      # u0, u1 columns
    else:
        bc = np.array([[1.0], [1.0]])                # v0

    # interior rows i = 1..m-1: (tau*rho_i + (a_i + a_{i-1})/h^2) u_i
    #   - a_i/h^2 u_{i+1} - a_{i-1}/h^2 u_{i-1} = boundary terms
    a = rho_half / h ** 2
    diag = problem.tau * rho[1:-1] + a[1:] + a[:-1]
    off = -a[1:-1]
    rhs = np.zeros((m - 1, bc.shape[1]))
    rhs[0] += a[0] * bc[0]
    rhs[-1] += a[-1] * bc[1]

    ab = np.zeros((2, m - 1))
    ab[0, 1:] = off
    ab[1] = diag
    interior = solveh_banded(ab, rhs, lower=False)

    u = np.vstack([bc[0], interior, bc[1]])
    acq = np.linalg.norm(u, axis=1) if problem.kind == OPPOSITE else u[:, 0]
    i_min = int(np.argmin(acq))
    return IntervalSolution(x=x, u=u, acquisition=acq,
                            argmin_x=float(x[i_min]), min_value=float(acq[i_min]))


def opposite_closed_form(x, rho, tau, R):
    """Constant-density solutions of the oppositely labeled problem."""
    x = np.asarray(x, dtype=np.float64)
    if tau == 0.0:
        return (R - x) / R, x / R
    a = math.sqrt(tau / rho)
    return np.sinh(a * (R - x)) / np.sinh(a * R), np.sinh(a * x) / np.sinh(a * R)


def same_closed_form(x, rho, tau, R):
    """Constant-density solution of the similarly labeled problem."""
    x = np.asarray(x, dtype=np.float64)
    if tau == 0.0:
        return np.ones_like(x)
    a = math.sqrt(tau / rho)
    return np.cosh(a * (R / 2.0 - x)) / np.cosh(a * R / 2.0)


def midpoint_acquisition_constant(rho, tau, R, kind):
    """Minimum acquisition value at the interval midpoint, constant density.

    OPPOSITE: 1 / (sqrt(2) cosh(sqrt(tau/rho) R/2)), reducing to 1/sqrt(2)
    at tau = 0. SAME: 1 / cosh(sqrt(tau/rho) R/2), reducing to 1 at tau = 0.
    """
    if rho <= 0:
        raise NonPositiveDensity("density must be positive")
    if kind == OPPOSITE:
        if tau == 0.0:
            return 1.0 / math.sqrt(2.0)
        return 1.0 / (math.sqrt(2.0) * math.cosh(math.sqrt(tau / rho) * R / 2.0))
    if kind == SAME:
        if tau == 0.0:
            return 1.0
        return 1.0 / math.cosh(math.sqrt(tau / rho) * R / 2.0)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class ExplorationCheck:
    explores: bool
    t_star: float


def check_exploration_condition(rho, R_s, beta, tau, tol=1e-12):
    """Constant-density exploration test sqrt(tau)*R_s > 2*sqrt(rho)*t*.

    t* is the unique positive root of sqrt(2)*cosh(beta*t) = cosh(t), found
    by bisection; the function sqrt(2)cosh(beta t) - cosh(t) starts positive
    and is strictly decreasing past its root for beta <= 1/sqrt(2). When the
    returned predicate is true, the midpoint of the similarly labeled
    interval scores strictly below the oppositely labeled one.
    """
    if not 0.0 <= beta <= 1.0 / math.sqrt(2.0):
        raise BetaOutOfRange(f"beta={beta} outside [0, 1/sqrt(2)]")
    if rho <= 0:
        raise NonPositiveDensity("density must be positive")

    def f(t):
        return math.sqrt(2.0) * math.cosh(beta * t) - math.cosh(t)

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > 1e6:
            raise ArithmeticError("no sign change found for t*")
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t_star = (lo + hi) / 2.0
    return ExplorationCheck(explores=math.sqrt(tau) * R_s > 2.0 * math.sqrt(rho) * t_star,
                            t_star=t_star)


@dataclass(frozen=True)
class TrapezoidDensity:
    """Symmetric plateau density: shoulders at rho_max, a low flat middle.

    The middle fraction `plateau_fraction` of [0, R] sits at level `delta`;
    linear ramps connect it to rho_max at both endpoints. By construction
    the density is symmetric about R/2, has monotone ends, and its
    delta-sublevel set is one contiguous interval of the stated fraction.
    """

    delta: float
    plateau_fraction: float
    rho_max: float

    def __post_init__(self):
        if not 0.0 < self.delta < self.rho_max:
            raise ValueError("need 0 < delta < rho_max")
        if not 0.0 < self.plateau_fraction < 1.0:
            raise ValueError("plateau fraction must be in (0, 1)")

    def sample(self, x, R):
        x = np.asarray(x, dtype=np.float64)
        ramp = (1.0 - self.plateau_fraction) * R / 2.0
        left = np.minimum(x, R - x)
        rho = np.where(left >= ramp, self.delta,
                       self.rho_max + (self.delta - self.rho_max) * left / ramp)
        return rho


@dataclass(frozen=True)
class BoundsReport:
    """Measured minima vs the closed-form plateau bounds for one cell."""

    rho_opp: float
    delta: float
    R_s: float
    beta: float
    tau: float
    feasible: bool            # tau sits in the plateau feasibility window
    min_same: float           # measured midpoint value of the SAME problem
    min_opp: float            # measured minimum of the OPPOSITE problem
    upper_bound_same: float
    lower_bound_opp: float
    same_below_upper: bool
    opp_above_lower: bool
    explorative: bool         # min_same < min_opp


def _check_assumptions(rho_same, rho_opp, m):
    # symmetry of the similar-region density about the midpoint
    if not np.allclose(rho_same, rho_same[::-1], rtol=0, atol=1e-12):
        raise AssumptionViolated("similar-region density is not symmetric")
    # monotone ends for the opposite-region density
    eps_cells = max(m // 8, 1)
    d = np.diff(rho_opp)
    if np.any(d[:eps_cells] > 1e-12) or np.any(d[-eps_cells:] < -1e-12):
        raise AssumptionViolated("opposite-region density ends are not monotone")


def check_general_1d_bounds(rho_opp, R_s, beta, tau, rho_max=8.0,
                            plateau_fraction=0.75, delta=None, m=1024):
    """Solve the plateau-density problem pair and compare with the bounds.

    The similarly labeled interval [0, R_s] carries a symmetric trapezoid
    density with low plateau `delta` covering `plateau_fraction` of it; the
    oppositely labeled interval has length beta*R_s and constant density
    `rho_opp`. The report carries the measured minima, the closed-form upper
    bound exp(-sqrt(tau/delta) * alpha^2 R_s^2 / 16) for the similar problem
    (single low-density block) and lower bound
    (1/sqrt(2)) exp(-tau R_o^2 / (4 rho_min)) for the opposite problem, and
    whether tau falls in the feasibility window
    16*delta < tau < rho_opp^2/(16*delta) with beta <= 1/4 and
    R_s^2 >= 4 ln 2.

    Raises
    ------
    AssumptionViolated
        If the sampled densities fail the symmetry / monotone-ends checks.
    """
    if delta is None:
        delta = rho_opp / 32.0
    if beta <= 0:
        raise BetaOutOfRange("beta must be positive")
    R_o = beta * R_s
    trapezoid = TrapezoidDensity(delta=delta, plateau_fraction=plateau_fraction,
                                 rho_max=rho_max)

    same = IntervalProblem(R=R_s, rho=lambda x: trapezoid.sample(x, R_s),
                           tau=tau, kind=SAME, m=m)
    opp = IntervalProblem(R=R_o, rho=np.full(m + 1, rho_opp), tau=tau,
                          kind=OPPOSITE, m=m)
    _check_assumptions(same.rho, opp.rho, m)

    sol_same = solve_bvp(same)
    sol_opp = solve_bvp(opp)
    mid_same = float(sol_same.acquisition[m // 2])

    alpha = plateau_fraction
    upper_same = math.exp(-math.sqrt(tau / delta) * alpha ** 2 * R_s ** 2 / 16.0)
    lower_opp = math.exp(-tau * R_o ** 2 / (4.0 * rho_opp)) / math.sqrt(2.0)

    feasible = (16.0 * delta < tau < rho_opp ** 2 / (16.0 * delta)
                and beta <= 0.25
                and R_s ** 2 >= 4.0 * math.log(2.0)
                and rho_opp / 2.0 <= 16.0 * delta <= rho_opp)
    return BoundsReport(
        rho_opp=rho_opp, delta=delta, R_s=R_s, beta=beta, tau=tau,
        feasible=feasible, min_same=mid_same, min_opp=sol_opp.min_value,
        upper_bound_same=upper_same, lower_bound_opp=lower_opp,
        same_below_upper=mid_same <= upper_same * (1 + 1e-9),
        opp_above_lower=sol_opp.min_value >= lower_opp * (1 - 1e-9),
        explorative=mid_same < sol_opp.min_value)


def moat_midpoint_check(s, delta, tau, rho_max, R_s, m=1024):
    """Midpoint decay through a low-density moat of half-width s.

    Returns (midpoint acquisition, exp(-(s/4) sqrt(tau/delta)), condition),
    where the condition sqrt(tau/delta) >= 3/s is the flat-moat form of the
    smallness requirement under which the exponential bound applies.
    """
    if not 0 < 2 * s < R_s:
        raise ValueError("moat must fit inside the interval")
    trapezoid = TrapezoidDensity(delta=delta, plateau_fraction=2 * s / R_s,
                                 rho_max=rho_max)
    problem = IntervalProblem(R=R_s, rho=lambda x: trapezoid.sample(x, R_s),
                              tau=tau, kind=SAME, m=m)
    sol = solve_bvp(problem)
    mid = float(sol.acquisition[m // 2])
    bound = math.exp(-(s / 4.0) * math.sqrt(tau / delta))
    condition = math.sqrt(tau / delta) >= 3.0 / s
    return mid, bound, condition
