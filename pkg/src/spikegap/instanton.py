"""Spin-coherent effective potential and the instanton tunneling action.

A bit-symmetric annealer behaves semiclassically like a spin J = n/2 particle
in the potential

    U(theta, s) = (n/2) C (1-s) (1 - sin theta) + W(theta, s),

where W is s times the coherent-state expectation of the cost and C is the
driver coefficient.  When U develops two degenerate minima theta_1 < theta_2,
the gap closes like exp(-S_I) with the Euclidean action of the dominant
tunneling path,

    S_I = (n/2) integral_{theta_1}^{theta_2}
          arccosh[1 + (U - U(theta_1)) / (J C (1-s) sin theta)] sin theta dtheta.

The arccosh argument dipping below 1 between the minima means the barrier has
collapsed into a pit and the formula does not apply (flagged region_II).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import NoDoubleWellError
from .model import critical_point
from .scaling import ScalingFit, fit as scaling_fit
from .spectrum import golden_section_min

__all__ = [
    "CoherentPotential",
    "InstantonResult",
    "potential",
    "coherent_energy",
    "find_local_minima",
    "find_degenerate_minima",
    "action",
    "action_scaling_sweep",
    "ActionSweepResult",
]

#: arg < 1 - REGION_II_TOL counts as a genuine pit, not degeneracy round-off
_REGION_II_TOL = 1e-6


class CoherentPotential:
    """Callable U(theta) = (n/2) C (1-s)(1 - sin theta) + W(theta, s)."""

    def __init__(self, cost_model, s):
        self.cost = cost_model
        self.s = float(s)
        self.n = cost_model.n
        self.driver_coeff = cost_model.driver_coeff

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        driver = (self.n / 2.0) * self.driver_coeff * (1.0 - self.s) * (1.0 - np.sin(theta))
        out = driver + self.cost.coherent_cost(theta, self.s)
        return out if out.ndim else float(out)

    @property
    def energy_scale(self):
        """Natural magnitude of U, used for degeneracy tolerances."""
        return self.n * max(1.0, self.driver_coeff)


def potential(cost_model, s, theta):
    """U(theta, s) for the given cost model (vectorized in theta)."""
    return CoherentPotential(cost_model, s)(theta)


def coherent_energy(cost_model, s, theta, cos_phi):
    """Full coherent energy E(theta, phi, s) given cos(phi) (or cosh for imaginary phi)."""
    n, c = cost_model.n, cost_model.driver_coeff
    driver = (n / 2.0) * c * (1.0 - s) * (1.0 - np.sin(theta) * np.asarray(cos_phi))
    return driver + cost_model.coherent_cost(theta, s)


def find_local_minima(cost_model, s, grid_size=4001):
    """All local minima of U(theta, s) on (0, pi) as (theta, U) pairs.

    Grid scan with golden-section refinement of each bracket.  The default
    grid resolves barrier features down to width ~1e-3 rad, well below the
    ~n^(-1/2) width of spike bumps at the n <= 3e4 scales targeted here.
    """
    u = CoherentPotential(cost_model, s)
    thetas = np.linspace(0.0, math.pi, grid_size)
    vals = u(thetas)
    minima = []
    for i in range(1, grid_size - 1):
        if vals[i] < vals[i - 1] and vals[i] <= vals[i + 1]:
            theta_min, u_min = golden_section_min(u, thetas[i - 1], thetas[i + 1], 1e-12)
            minima.append((theta_min, u_min))
    # drop duplicates from plateau-adjacent brackets
    dedup = []
    for theta_min, u_min in sorted(minima):
        if not dedup or theta_min - dedup[-1][0] > 2.0 * math.pi / grid_size:
            dedup.append((theta_min, u_min))
    return dedup


def _two_minima(cost_model, s, grid_size):
    m = find_local_minima(cost_model, s, grid_size)
    if len(m) < 2:
        return None
    # keep the two deepest wells if spurious shallow minima appear
    m = sorted(sorted(m, key=lambda p: p[1])[:2])
    return m


def _bisect_signed(f, s_a, d_a, s_b, xtol):
    """Bisection on a signed function that may return None near the edges.

    A None at the midpoint (a well vanishing mid-bracket) is resolved by
    probing the quarter points; if both fail too, the bracket is collapsed
    toward the left endpoint whose sign is known.
    """
    while s_b - s_a > xtol:
        candidates = (0.5, 0.25, 0.75)
        mid = d = None
        for frac in candidates:
            m = s_a + frac * (s_b - s_a)
            d = f(m)
            if d is not None:
                mid = m
                break
        if mid is None:
            return s_a
        if d == 0.0:
            return mid
        if (d > 0.0) == (d_a > 0.0):
            s_a, d_a = mid, d
        else:
            s_b = mid
    return 0.5 * (s_a + s_b)


def find_degenerate_minima(cost_model, s_hint, search_halfwidth=0.35, grid_size=4001,
                           max_refinements=7):
    """Locate s at which the two wells of U are exactly degenerate.

    Scans s around ``s_hint`` for a double-well window, refining the scan
    adaptively (weak barriers support two minima only on an s window of
    width ~n^(-1/2)), then root-finds the well-depth difference
    U(theta_1, s) - U(theta_2, s) by bisection.  Raises NoDoubleWellError
    when no s in the bracket supports two minima.
    """
    u_scale = CoherentPotential(cost_model, s_hint).energy_scale
    tol_deg = 1e-9 * u_scale

    def depth_diff(s):
        m = _two_minima(cost_model, s, grid_size)
        if m is None:
            return None
        return m[0][1] - m[1][1]

    lo = max(1e-3, s_hint - search_halfwidth)
    hi = min(1.0 - 1e-3, s_hint + search_halfwidth)
    bracket = None
    ever_valid = False
    for _ in range(max_refinements):
        scan = np.unique(np.concatenate([[s_hint], np.linspace(lo, hi, 31)])) \
            if lo <= s_hint <= hi else np.linspace(lo, hi, 31)
        step = (hi - lo) / 30.0
        pairs = [(s, depth_diff(s)) for s in scan]
        valid = [(s, d) for s, d in pairs if d is not None]
        if not valid:
            break
        ever_valid = True
        for (s_a, d_a), (s_b, d_b) in zip(valid, valid[1:]):
            if d_a == 0.0 or (d_a * d_b < 0.0 and s_b - s_a <= 1.5 * step):
                bracket = (s_a, s_b)
                break
        if bracket is not None:
            break
        # zoom into the double-well window (plus one step of margin)
        new_lo = max(lo, valid[0][0] - step)
        new_hi = min(hi, valid[-1][0] + step)
        if new_hi - new_lo >= hi - lo:
            break
        lo, hi = new_lo, new_hi
    if bracket is None:
        if not ever_valid:
            raise NoDoubleWellError(
                f"no double well for s near {s_hint:.3f} (cost {cost_model!r})"
            )
        raise NoDoubleWellError(
            "double well exists but never becomes degenerate in the bracket"
        )
    d_left = depth_diff(bracket[0])
    if bracket[0] == bracket[1] or d_left == 0.0:
        s_deg = bracket[0]
    else:
        s_deg = _bisect_signed(depth_diff, bracket[0], d_left, bracket[1], xtol=1e-14)
    m = _two_minima(cost_model, s_deg, grid_size)
    if m is None or abs(m[0][1] - m[1][1]) > tol_deg:
        raise NoDoubleWellError("degeneracy matching failed to converge")
    return s_deg, m[0][0], m[1][0]


@dataclass
class InstantonResult:
    """Tunneling action between degenerate wells, or the reason it is undefined."""

    theta1: float
    theta2: float
    s_star_used: float
    S_I: float | None
    applicability: str  # "ok" | "region_II"


def action(cost_model, s_deg, theta1, theta2, epsrel=1e-9):
    """Euclidean action of the tunneling path between degenerate minima.

    Adaptive quadrature with a sqrt change of variable at both endpoints
    (the integrand vanishes like sqrt(U - U_1) there).  Returns
    applicability "region_II" with no action when the arccosh argument
    drops below 1 inside the interval, i.e. the barrier has a pit deeper
    than the wells.
    """
    if not theta1 < theta2:
        raise ValueError("theta1 must be strictly below theta2")
    u = CoherentPotential(cost_model, s_deg)
    n, c = cost_model.n, cost_model.driver_coeff
    j = n / 2.0
    u1 = u(theta1)

    def arg(theta):
        theta = np.asarray(theta, dtype=float)
        denom = j * c * (1.0 - s_deg) * np.sin(theta)
        return 1.0 + (u(theta) - u1) / denom

    probe = np.linspace(theta1, theta2, 2001)
    a = arg(probe)
    if np.min(a) < 1.0 - _REGION_II_TOL:
        return InstantonResult(theta1=theta1, theta2=theta2, s_star_used=s_deg,
                               S_I=None, applicability="region_II")

    i_top = int(np.argmax(a))
    theta_mid = float(probe[i_top])
    if theta_mid <= theta1 or theta_mid >= theta2:
        theta_mid = 0.5 * (theta1 + theta2)

    def integrand(theta):
        return math.acosh(max(float(arg(theta)), 1.0)) * math.sin(theta)

    def left(t):  # theta = theta1 + t^2
        return integrand(theta1 + t * t) * 2.0 * t

    def right(t):  # theta = theta2 - t^2
        return integrand(theta2 - t * t) * 2.0 * t

    s_left, _ = quad(left, 0.0, math.sqrt(theta_mid - theta1), epsrel=epsrel, limit=200)
    s_right, _ = quad(right, 0.0, math.sqrt(theta2 - theta_mid), epsrel=epsrel, limit=200)
    return InstantonResult(theta1=theta1, theta2=theta2, s_star_used=s_deg,
                           S_I=j * (s_left + s_right), applicability="ok")


#: a sweep is a believable power law if its log-log residues stay below this
#: (log-units); the two reference regimes sit at ~0.02 and ~0.4
POWER_LAW_RESIDUE_TOL = 0.1


@dataclass
class ActionSweepResult:
    fit: ScalingFit | None
    actions: list
    excluded: list
    classification: str


def action_scaling_sweep(alpha, beta, n_list, s_hint=None, epsrel=1e-9):
    """Fit log S_I vs log n for a spike of the given exponents.

    Points where the method is inapplicable (no double well, pit between the
    wells) are excluded and listed; the fit requires at least 4 survivors.
    The classification mirrors the fit verdict: a concave-residue fit means
    the action is not a power law (the small-alpha/small-beta regime).
    """
    from .model import SpikeCost, SpikeParams

    if s_hint is None:
        s_hint = critical_point()
    actions, excluded = [], []
    hint, halfwidth = s_hint, 0.35
    for n in n_list:
        cost_model = SpikeCost(SpikeParams(int(n), alpha, beta))
        try:
            s_deg, t1, t2 = find_degenerate_minima(cost_model, hint,
                                                   search_halfwidth=halfwidth)
            hint, halfwidth = s_deg, 0.08  # the window drifts slowly with n
        except NoDoubleWellError as exc:
            excluded.append((int(n), f"no_double_well: {exc}"))
            continue
        res = action(cost_model, s_deg, t1, t2, epsrel=epsrel)
        if res.applicability != "ok" or res.S_I is None or res.S_I <= 0.0:
            excluded.append((int(n), res.applicability))
            continue
        actions.append((int(n), res.S_I))
    if len(actions) < 4:
        return ActionSweepResult(fit=None, actions=actions, excluded=excluded,
                                 classification="insufficient_data")
    f = scaling_fit(actions)
    # a clean power law here is about fit quality, not residue curvature:
    # even the power-law regime keeps a slightly concave residue, while the
    # breakdown regime shows residues an order of magnitude larger
    amplitude = float(np.max(np.abs(f.residues)))
    classification = ("power_law" if amplitude <= POWER_LAW_RESIDUE_TOL
                      else "not_power_law")
    return ActionSweepResult(fit=f, actions=actions, excluded=excluded,
                             classification=classification)
