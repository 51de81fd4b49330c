"""Discrete WKB gap estimate for the spike Hamiltonian at the critical point.

Works with the sign-flipped operator (whose two highest states carry the
gap): its three-term recursion p_j C_{j-1} + (w_j - E) C_j + p_{j+1} C_{j+1} = 0
defines band edges and the classically-allowed region through

    p(j) = (sin t / 2) sqrt(j (n+1-j)),
    w(j) = cos t (n/2 - j) - cos t (3/4) n^alpha [inside the spike window],
    U±(j) = w(j) ± 2 p(j + 1/2),       B(j, E) = (E - w(j)) / (2 p(j + 1/2)),

with sin t = sqrt(3)/2, cos t = 1/2 at the critical point.  The half-integer
argument of p makes the spikeless band top exactly (n+1)/2, so energies are
parametrized as E = (n+1)/2 - d.  The spike digs a classically forbidden
notch into the band top; matching the oscillatory solution (standard
connection formula at the smooth turning point j_1) against the decaying
solution at the abrupt spike edge j_2 via continuity of C and C' fixes d,
and the gap scales like n^(-alpha/2) exp(-2 * integral_{j_2}^{n/4} arccosh B).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConfigurationError, MethodInapplicableError, NoBarrierError
from .scaling import fit as scaling_fit

__all__ = [
    "WkbBands",
    "ConnectionSolution",
    "WkbGapEstimate",
    "solve_connection",
    "tunneling_integral",
    "wkb_gap",
    "tunneling_exponent",
]

_SIN_T = math.sqrt(3.0) / 2.0
_COS_T = 0.5


class WkbBands:
    """Band-edge geometry of the sign-flipped spike operator at s*."""

    def __init__(self, n, alpha, beta):
        if n <= 0 or n % 4 != 0:
            raise ValueError(f"n must be a positive multiple of 4, got {n}")
        self.n = n
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.shift = _COS_T * 0.75 * n**self.alpha
        self.j2 = n / 4.0 - n**self.beta / 2.0
        self.window = (self.j2, n / 4.0 + n**self.beta / 2.0)

    def in_window(self, j):
        lo, hi = self.window
        return (np.asarray(j) > lo) & (np.asarray(j) < hi)

    def p(self, j):
        j = np.asarray(j, dtype=float)
        return (_SIN_T / 2.0) * np.sqrt(j * (self.n + 1.0 - j))

    def two_p_half(self, j):
        """2 p(j + 1/2), the bandwidth term entering U± and B."""
        j = np.asarray(j, dtype=float)
        return _SIN_T * np.sqrt((j + 0.5) * (self.n + 0.5 - j))

    def w(self, j, inside=None):
        """Diagonal w(j); ``inside`` forces the spike branch at the edge."""
        j = np.asarray(j, dtype=float)
        base = _COS_T * (self.n / 2.0 - j)
        mask = self.in_window(j) if inside is None else inside
        return base - np.where(mask, self.shift, 0.0)

    def u_plus(self, j, inside=None):
        return self.w(j, inside) + self.two_p_half(j)

    def u_minus(self, j, inside=None):
        return self.w(j, inside) - self.two_p_half(j)

    def b(self, j, energy, inside=None):
        return (energy - self.w(j, inside)) / self.two_p_half(j)

    def v_abs(self, j, energy, inside=None):
        """|v| = sqrt(|U+ - E| (E - U-)); real in both regions."""
        up = self.u_plus(j, inside)
        um = self.u_minus(j, inside)
        return np.sqrt(np.abs(up - energy) * (energy - um))

    def dlog_v(self, j, energy, inside):
        """d log|v| / dj from the closed forms (w is locally linear)."""
        j = float(j)
        g_plus = self.u_plus(j, inside) - energy
        g_minus = energy - self.u_minus(j, inside)
        w_prime = -_COS_T
        p_prime = _SIN_T * (self.n - 2.0 * j) / (2.0 * math.sqrt((j + 0.5) * (self.n + 0.5 - j)))
        return 0.5 * ((w_prime + p_prime) / g_plus + (-w_prime + p_prime) / g_minus)

    def energy(self, d):
        return (self.n + 1.0) / 2.0 - d

    def j1(self, d):
        """Smooth turning point U+(j_1) = E, exact closed form."""
        n = self.n
        return n / 4.0 + d / 2.0 - 0.25 - 0.5 * math.sqrt(3.0 * d * (n + 1.0 - d))

    def phase_integral(self, d, epsrel=1e-10):
        """integral of arccos B over the allowed stretch [j_1, j_2].

        The integrand vanishes like sqrt(j - j_1) at the turning point; a
        sqrt substitution removes the derivative singularity.
        """
        e = self.energy(d)
        j1 = self.j1(d)
        if j1 >= self.j2:
            raise MethodInapplicableError(
                f"turning point j1={j1:.2f} not left of the spike edge j2={self.j2:.2f}"
            )

        def f(t):  # j = j1 + t^2
            j = j1 + t * t
            b = min(max(float(self.b(j, e, inside=False)), -1.0), 1.0)
            return 2.0 * t * math.acos(b)

        val, _ = quad(f, 0.0, math.sqrt(self.j2 - j1), epsrel=epsrel, limit=200)
        return val


@dataclass
class ConnectionSolution:
    """Energy offset d solving the matching at the spike edge."""

    d: float
    d_leading: float
    phase_integral: float

    def __float__(self):
        return self.d


def _connection_mismatch(bands, d):
    """LHS - RHS of the continuity condition at the spike edge."""
    e = bands.energy(d)
    j2 = bands.j2
    phase = bands.phase_integral(d)
    b_out = min(max(float(bands.b(j2, e, inside=False)), -1.0), 1.0)
    b_in = float(bands.b(j2, e, inside=True))
    if b_in <= 1.0:
        raise NoBarrierError(f"spike region not forbidding at d={d}: B={b_in:.6f}")
    lhs = (-0.5 * bands.dlog_v(j2, e, inside=False)
           - math.tan(phase - math.pi / 4.0) * math.acos(b_out))
    rhs = -0.5 * bands.dlog_v(j2, e, inside=True) - math.acosh(b_in)
    return lhs - rhs, phase


def solve_connection(n, alpha, beta, d_max=2.5):
    """Solve the edge-matching condition for the energy offset d.

    The search window (1/2, d_max) is clipped to where the method makes
    sense: below the barrier limit (the spike must stay classically
    forbidding at j_2, which caps d when the barrier is weak) and below the
    tangent pole of the connection formula.  Also reports the leading-order
    d from the reduced tangent relation
    tan(d pi/2 - pi/4) = arccosh B|in / arccos B|out, in which the phase
    integral is replaced by its d pi/2 approximation and the slowly-varying
    v' terms are dropped; that d is structurally confined to (1/2, 3/2).
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"the estimate assumes 0 < alpha < 1, got {alpha}")
    if not 0.0 < beta < 0.5:
        raise ConfigurationError(f"the estimate assumes 0 < beta < 1/2, got {beta}")
    bands = WkbBands(n, alpha, beta)
    d_lo = 0.5 + 1e-6
    # largest d with a forbidding spike edge: E = U+_in(j_2)
    d_barrier = (n + 1.0) / 2.0 - float(bands.u_plus(bands.j2, inside=True))
    d_hi = min(d_max, d_barrier - 1e-9)
    if d_hi <= d_lo:
        raise NoBarrierError(
            f"spike too weak: barrier requires d < {d_barrier:.4f}"
        )

    # clip at the tangent pole (phase integral = 3 pi / 4), where the
    # mismatch diverges; the physical root sits below it
    def pole_gap(d):
        return bands.phase_integral(d) - 0.75 * math.pi

    if pole_gap(d_lo) < 0.0 < pole_gap(d_hi):
        d_pole = brentq(pole_gap, d_lo, d_hi, xtol=1e-12)
        d_hi = d_pole - 1e-9

    def mismatch(d):
        try:
            return _connection_mismatch(bands, d)[0]
        except (NoBarrierError, MethodInapplicableError):
            return None

    grid = np.linspace(d_lo, d_hi, 81)
    vals = [mismatch(d) for d in grid]
    bracket = next(
        ((grid[i], grid[i + 1]) for i in range(len(grid) - 1)
         if vals[i] is not None and vals[i + 1] is not None
         and vals[i] * vals[i + 1] <= 0.0),
        None,
    )
    if bracket is None:
        raise MethodInapplicableError(
            f"no root of the connection condition for d in ({d_lo:.3f}, {d_hi:.3f})"
        )
    d = brentq(lambda dd: _connection_mismatch(bands, dd)[0],
               bracket[0], bracket[1], xtol=1e-12)
    _, phase = _connection_mismatch(bands, d)

    def reduced(dd):
        e = bands.energy(dd)
        b_out = min(max(float(bands.b(bands.j2, e, inside=False)), -1.0), 1.0)
        b_in = float(bands.b(bands.j2, e, inside=True))
        return math.tan(dd * math.pi / 2.0 - math.pi / 4.0) - math.acosh(b_in) / math.acos(b_out)

    lead_hi = min(1.5, d_barrier) - 1e-9
    d_leading = brentq(reduced, 0.5 + 1e-9, lead_hi, xtol=1e-12)
    return ConnectionSolution(d=d, d_leading=d_leading, phase_integral=phase)


def tunneling_integral(n, alpha, beta, d, epsrel=1e-10):
    """integral of arccosh B over the forbidden stretch [j_2, n/4].

    Uses the spike branch of w throughout; raises NoBarrierError if the
    region fails to be classically forbidden anywhere on the interval.
    """
    bands = WkbBands(n, alpha, beta)
    e = bands.energy(d)
    a, b = bands.j2, n / 4.0
    if a >= b:
        return 0.0
    probe = np.linspace(a, b, 513)
    b_vals = bands.b(probe, e, inside=True)
    if np.min(b_vals) <= 1.0:
        raise NoBarrierError(
            f"B drops to {float(np.min(b_vals)):.6f} <= 1 inside the spike window"
        )

    def f(j):
        return math.acosh(float(bands.b(j, e, inside=True)))

    val, _ = quad(f, a, b, epsrel=epsrel, limit=200)
    return val


@dataclass
class WkbGapEstimate:
    """Assembled WKB gap estimate (exponent only; the O(1) prefactor is unknown)."""

    n: int
    alpha: float
    beta: float
    d: float
    d_leading: float
    j1: float
    j2: float
    tunneling_integral: float
    log_gap_estimate: float
    superpolynomial: bool
    exponent_fit: float | None = None


def wkb_gap(n, alpha, beta):
    """WKB estimate log gap ~ -(alpha/2) log n - 2 * tunneling integral + O(1).

    The polynomial/superpolynomial classification is the method's threshold
    alpha + 2 beta > 1 (the tunneling integral grows like
    n^(alpha/2 + beta - 1/2)).
    """
    sol = solve_connection(n, alpha, beta)
    bands = WkbBands(n, alpha, beta)
    ti = tunneling_integral(n, alpha, beta, sol.d)
    log_gap = -(alpha / 2.0) * math.log(n) - 2.0 * ti
    return WkbGapEstimate(
        n=n, alpha=alpha, beta=beta, d=sol.d, d_leading=sol.d_leading,
        j1=bands.j1(sol.d), j2=bands.j2, tunneling_integral=ti,
        log_gap_estimate=log_gap, superpolynomial=alpha + 2.0 * beta > 1.0,
    )


def tunneling_exponent(alpha, beta, n_list):
    """Fitted slope of log tunneling-integral vs log n (compare alpha/2 + beta - 1/2)."""
    pts = []
    for n in n_list:
        sol = solve_connection(int(n), alpha, beta)
        pts.append((int(n), tunneling_integral(int(n), alpha, beta, sol.d)))
    return scaling_fit(pts).slope
