"""Variational gap bounds for the width-one spike at the critical point.

At s* = (sqrt(3)-1)/2 the spikeless Hamiltonian is minus a unit-magnitude
field, with exactly known eigenstates: the ground state has binomial-type
amplitudes sqrt(C(n,k)) (1/2)^k (sqrt(3)/2)^(n-k) and the first excited state
carries an extra factor (n-4k)/sqrt(3n), with its node exactly on the spike.

Two rigorous bounds are built from the one-parameter trial family
|psi_abs> + x |psi_0>, where |psi_abs> has the absolute values of the
first-excited amplitudes:

* lower bound: gap >= E_1 - Rayleigh quotient of any trial state;
* upper bound (alpha > 1): a ground-energy lower bound for stoquastic
  operators, min_k <k|H phi>/<k|phi> over any entrywise-positive phi,
  turns the same family into gap <= max-max expression over k.

All finite-n quantities are evaluated exactly in log domain; asymptotic
constants are only used as cross-checks in the test-suite.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._logdomain import log_binom
from .errors import ConfigurationError
from .model import AdiabaticPoint, SpikeCost, SpikeParams, build_hamiltonian, critical_point
from .spectrum import GapEstimate, GapMethod, golden_section_min, lowest_eigenvalues

__all__ = [
    "ClosedFormState",
    "BoundPair",
    "spikeless_energy",
    "overlap_abs_ground",
    "spike_expectation",
    "rayleigh_quotient",
    "lower_bound_gap",
    "upper_bound_gap",
    "bound_pair",
    "stoquastic_ground_lower_bound",
]

_COS_T = 0.5  # cos(theta) at the critical point


def spikeless_energy(n, t):
    """Level-t energy of the normalized spikeless Hamiltonian: -n/2 + t."""
    return -n / 2.0 + t


def _log_ground_sq(n, k):
    """log of C(n,k) (1/4)^k (3/4)^(n-k), the squared ground amplitude."""
    k = np.asarray(k, dtype=float)
    return log_binom(n, k) + k * math.log(0.25) + (n - k) * math.log(0.75)


@dataclass(frozen=True)
class ClosedFormState:
    """Spikeless eigenstate at s*: ground, first excited, or its modulus."""

    kind: str
    n: int

    _KINDS = ("ground", "first_excited", "abs_first_excited")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if self.n % 4 != 0:
            raise ValueError("n must be a multiple of 4")

    @cached_property
    def logmags(self):
        k = np.arange(self.n + 1, dtype=float)
        ground = 0.5 * _log_ground_sq(self.n, k)
        if self.kind == "ground":
            return ground
        factor = np.abs(self.n - 4.0 * k)
        with np.errstate(divide="ignore"):
            return ground + np.log(factor) - 0.5 * math.log(3.0 * self.n)

    @cached_property
    def signs(self):
        k = np.arange(self.n + 1)
        if self.kind == "first_excited":
            return np.sign(self.n - 4 * k).astype(np.int8)
        out = np.ones(self.n + 1, dtype=np.int8)
        if self.kind == "abs_first_excited":
            out[self.n // 4] = 0
        return out

    def amplitudes(self):
        with np.errstate(under="ignore"):
            return self.signs * np.exp(self.logmags)


def overlap_abs_ground(n):
    """Exact <psi_abs|psi_0> = (sqrt(3n)/2) C(n,n/4) (1/4)^(n/4) (3/4)^(3n/4).

    Tends to sqrt(2/pi) for large n.
    """
    if n % 4 != 0:
        raise ValueError("n must be a multiple of 4")
    log_peak = float(_log_ground_sq(n, n // 4))
    return math.exp(0.5 * math.log(3.0 * n) - math.log(2.0) + log_peak)


def spike_expectation(n, alpha):
    """Exact <psi_0|H_spike|psi_0> = (3/4) n^alpha <n/4|psi_0>^2 (width-one spike).

    Tends to sqrt(8/(3 pi)) n^(alpha - 1/2) for large n.
    """
    if n % 4 != 0:
        raise ValueError("n must be a multiple of 4")
    log_peak = float(_log_ground_sq(n, n // 4))
    return math.exp(math.log(0.75) + alpha * math.log(n) + log_peak)


def rayleigh_quotient(x, n, alpha):
    """<psi|H|psi>/<psi|psi> - E_1 for the trial state |psi_abs> + x |psi_0>.

    Closed form in the exact overlap v = <psi_abs|psi_0> and spike
    expectation w = <psi_0|H_spike|psi_0>:

        (-2 x v + x^2 (cos(theta) w - 1)) / (1 + 2 x v + x^2)
    """
    v = overlap_abs_ground(n)
    w = spike_expectation(n, alpha)
    return (-2.0 * x * v + x * x * (_COS_T * w - 1.0)) / (1.0 + 2.0 * x * v + x * x)


def ansatz_mixing(n, alpha):
    """The witness mixing x_0 = (sqrt(3)/2) n^(1/2 - alpha)."""
    return math.sqrt(3.0) / 2.0 * n ** (0.5 - alpha)


def _best_lower_bound(n, alpha):
    """Maximize the certified bound -RQ(x) over x > 0 (log-x golden search)."""
    x0 = ansatz_mixing(n, alpha)

    def neg_bound(t):
        return rayleigh_quotient(math.exp(t), n, alpha)

    t0 = math.log(x0)
    grid = np.linspace(t0 - 12.0, t0 + 12.0, 241)
    vals = [neg_bound(t) for t in grid]
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    t_best, f_best = golden_section_min(neg_bound, a, b, 1e-12)
    candidates = [(-rayleigh_quotient(x0, n, alpha), x0), (-f_best, math.exp(t_best))]
    return max(candidates, key=lambda c: c[0])


def lower_bound_gap(n, alpha):
    """Certified lower bound on the width-one spike gap at s*.

    gap >= E_1 - min over the trial family of the Rayleigh quotient; the
    bound is evaluated exactly at finite n, both at the witness mixing x_0
    and at the numerically optimal x, and the best certified value is
    returned.  A nonpositive bound is reported as 0 with flag "vacuous".
    """
    value, _ = _best_lower_bound(n, alpha)
    params = SpikeParams.width_one(n, alpha)
    if value <= 0.0:
        return GapEstimate(value=0.0, method=GapMethod.VARIATIONAL_LOWER,
                           s=critical_point(), params=params,
                           flags=frozenset({"vacuous"}))
    return GapEstimate(value=value, method=GapMethod.VARIATIONAL_LOWER,
                       s=critical_point(), params=params)


def _maxmax_upper(x, n, alpha):
    """max over k of E_1 - <k|H phi>/<k|phi> for phi = psi_abs + x psi_0.

    The maximum over k != n/4 is attained at the spike's neighbors,
    |n - 4k| = 4; the k = n/4 term is evaluated separately.
    """
    sqrt3n = math.sqrt(3.0 * n)
    off_spike = x / (4.0 / sqrt3n + x)
    at_spike = 1.0 - 0.375 * n**alpha + sqrt3n / (2.0 * x)
    return max(off_spike, at_spike)


def _best_upper_bound(n, alpha):
    """Minimize the max-max upper bound over x > 0 (log-x golden search)."""
    if 3.0 * n**alpha - 8.0 <= 0.0:
        raise ConfigurationError("3 n^alpha - 8 <= 0: witness mixing undefined")
    x_paper = 4.0 * math.sqrt(3.0 * n) / (3.0 * n**alpha - 8.0)

    def bound_at_logx(t):
        return _maxmax_upper(math.exp(t), n, alpha)

    t0 = math.log(x_paper)
    grid = np.linspace(t0 - 6.0, t0 + 6.0, 121)
    vals = [bound_at_logx(t) for t in grid]
    i = int(np.argmin(vals))
    t_best, f_best = golden_section_min(
        bound_at_logx, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)], 1e-12
    )
    candidates = [(_maxmax_upper(x_paper, n, alpha), x_paper), (f_best, math.exp(t_best))]
    value, x_used = min(candidates, key=lambda c: c[0])
    return max(value, 0.0), x_used


def _excited_level_flags(n, alpha):
    # the upper bound needs E'_1 = E_1: verify the spikeless first excited
    # level (node on the spike) survives unchanged in the spike spectrum
    params = SpikeParams.width_one(n, alpha)
    op = build_hamiltonian(SpikeCost(params), AdiabaticPoint.from_s(critical_point()))
    e1_spike = lowest_eigenvalues(op, 2)[1]
    if abs(e1_spike - spikeless_energy(n, 1)) > 1e-8 * n:
        return frozenset({"excited_level_assumption_failed"})
    return frozenset()


def upper_bound_gap(n, alpha, check_excited_level=True):
    """Certified upper bound on the width-one spike gap at s* (alpha > 1).

    Uses the stoquastic ground-energy bound with phi = psi_abs + x psi_0 and
    the fact that the spikeless first excited state (node on the spike) stays
    an eigenstate of the spike Hamiltonian.  Nontrivial only for alpha > 1;
    otherwise returns +inf flagged "trivial".
    """
    params = SpikeParams.width_one(n, alpha)
    if alpha <= 1.0:
        return GapEstimate(value=math.inf, method=GapMethod.STOQUASTIC_UPPER,
                           s=critical_point(), params=params,
                           flags=frozenset({"trivial"}))
    value, _ = _best_upper_bound(n, alpha)
    flags = _excited_level_flags(n, alpha) if check_excited_level else frozenset()
    return GapEstimate(value=value, method=GapMethod.STOQUASTIC_UPPER,
                       s=critical_point(), params=params, flags=flags)


@dataclass(frozen=True)
class BoundPair:
    """Certified lower/upper gap bounds with the trial mixings that won."""

    lower: float
    upper: float
    x_lower: float
    x_upper: float
    flags: frozenset = frozenset()

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper {self.upper}")


def bound_pair(n, alpha, check_excited_level=True):
    """Both bounds for the width-one spike at s*, as a BoundPair."""
    lo_value, x_lo = _best_lower_bound(n, alpha)
    flags = set()
    if lo_value <= 0.0:
        lo_value = 0.0
        flags.add("vacuous")
    if alpha > 1.0:
        hi_value, x_hi = _best_upper_bound(n, alpha)
        if check_excited_level:
            flags |= _excited_level_flags(n, alpha)
    else:
        hi_value, x_hi = math.inf, math.nan
        flags.add("trivial")
    return BoundPair(lower=lo_value, upper=hi_value, x_lower=x_lo, x_upper=x_hi,
                     flags=frozenset(flags))


def stoquastic_ground_lower_bound(op, log_phi):
    """min_k <k|H phi>/<k|phi> for an entrywise-positive phi in log form.

    Valid lower bound on the ground energy whenever every off-diagonal entry
    of ``op`` is nonpositive (stoquasticity) and phi > 0 entrywise.
    """
    log_phi = np.asarray(log_phi, dtype=float)
    if np.any(~np.isfinite(log_phi)):
        raise ValueError("phi must be strictly positive entrywise")
    if np.any(op.offdiag > 0.0):
        raise ValueError("operator is not stoquastic (positive off-diagonal entry)")
    d, e = op.diag, op.offdiag
    ratios = d.copy()
    ratios[1:] += e * np.exp(log_phi[:-1] - log_phi[1:])
    ratios[:-1] += e * np.exp(log_phi[1:] - log_phi[:-1])
    return float(np.min(ratios))
