"""Spike cost functions and the symmetric-subspace annealing Hamiltonian.

The n-qubit transverse-field annealer with a bit-symmetric cost h(w) never
leaves the (n+1)-dimensional symmetric subspace spanned by the Hamming-weight
states |k>.  Everything here works in that basis, where the interpolating
Hamiltonian is a symmetric tridiagonal operator

    H(s) = -sin(theta) X - cos(theta) Z + cos(theta) H_spike,

with sin(theta) = (1-s)/sqrt(s^2+(1-s)^2), cos(theta) = s/sqrt(s^2+(1-s)^2).
The physical (unnormalized) interpolation has a gap equal to
sqrt(s^2+(1-s)^2) times the gap of H(s).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._logdomain import log_binom_pmf

__all__ = [
    "SpikeParams",
    "SpikeCost",
    "SpikelessCost",
    "CubicCost",
    "CustomCost",
    "AdiabaticPoint",
    "TridiagonalOperator",
    "build_hamiltonian",
    "critical_point",
    "spikeless_cost",
]

# Snap nearly-integer window boundaries before applying strict inequalities,
# so that e.g. n**0.5 computed as 31.999999999999996 still excludes k = 240.
_BOUNDARY_SNAP = 1e-9


def critical_point():
    """s at which the driver-state binomial peak sits on the barrier: (sqrt(3)-1)/2."""
    return (math.sqrt(3.0) - 1.0) / 2.0


def _snap(x):
    r = round(x)
    if abs(x - r) <= _BOUNDARY_SNAP * max(1.0, abs(x)):
        return float(r)
    return x


@dataclass(frozen=True)
class SpikeParams:
    """Problem instance: n qubits, barrier height (3/4) n^alpha, width n^beta.

    ``beta=None`` is the width-one sentinel: the barrier occupies exactly the
    single weight k = n/4.  For beta >= 0 the barrier region is the set of
    integers strictly inside (n/4 - n^beta/2, n/4 + n^beta/2).
    """

    n: int
    alpha: float
    beta: float | None = None

    def __post_init__(self):
        if self.n <= 0 or self.n % 4 != 0:
            raise ValueError(f"n must be a positive multiple of 4, got {self.n}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.beta is not None:
            if self.beta < 0:
                raise ValueError(f"beta must be >= 0 or None, got {self.beta}")
            half_width = self.n**self.beta / 2.0
            if self.n / 4 + half_width > self.n or self.n / 4 - half_width < 0:
                raise ValueError("spike region extends outside [0, n]")

    @classmethod
    def width_one(cls, n, alpha):
        return cls(n=n, alpha=alpha, beta=None)

    @property
    def width_is_one(self):
        return self.beta is None

    @property
    def surplus(self):
        """Barrier height added on the spike region: (3/4) n^alpha."""
        return 0.75 * self.n**self.alpha

    def spike_indices(self):
        """Integer weights inside the barrier, as an ascending array."""
        if self.beta is None:
            return np.array([self.n // 4])
        half_width = self.n**self.beta / 2.0
        lo = _snap(self.n / 4 - half_width)
        hi = _snap(self.n / 4 + half_width)
        k_min = int(math.floor(lo)) + 1  # strict lower bound
        k_max = int(math.ceil(hi)) - 1   # strict upper bound
        return np.arange(k_min, k_max + 1)

    def in_spike(self, w):
        """Vectorized strict-window membership test for integer weights."""
        w = np.asarray(w)
        if self.beta is None:
            return w == self.n // 4
        idx = self.spike_indices()
        return (w >= idx[0]) & (w <= idx[-1])


def cost(params, w):
    """Cost value h(w): Hamming weight plus the barrier surplus inside the window."""
    if np.any((np.asarray(w) < 0) | (np.asarray(w) > params.n)):
        raise ValueError(f"weight {w} outside [0, {params.n}]")
    w_arr = np.asarray(w, dtype=float)
    out = w_arr + np.where(params.in_spike(np.asarray(w)), params.surplus, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AdiabaticPoint:
    """Interpolation coordinate s with its angle parametrization.

    sin(theta) = (1-s)/r and cos(theta) = s/r with r = sqrt(s^2 + (1-s)^2);
    r is the factor relating the normalized-H gap back to the physical one.
    """

    s: float
    sin_theta: float
    cos_theta: float
    norm_factor: float

    @classmethod
    def from_s(cls, s):
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s must lie in [0, 1], got {s}")
        r = math.hypot(s, 1.0 - s)
        return cls(s=float(s), sin_theta=(1.0 - s) / r, cos_theta=s / r, norm_factor=r)

    @property
    def theta(self):
        return math.atan2(self.sin_theta, self.cos_theta)


class SpikeCost:
    """Hamming weight with a spike barrier; the driver coefficient is 1."""

    def __init__(self, params):
        self.params = params
        self.n = params.n
        self.driver_coeff = 1.0

    def h(self, w):
        return cost(self.params, w)

    def surplus_at(self, k):
        """Barrier surplus h(k) - k on the weight grid."""
        k = np.asarray(k)
        return np.where(self.params.in_spike(k), self.params.surplus, 0.0)

    def coherent_cost(self, theta, s):
        """W(theta, s) = s * E[h(k)] under k ~ Bin(n, sin^2(theta/2)).

        The mean weight contributes n sin^2(theta/2) exactly; the barrier
        contributes its height times the binomial mass on the spike window,
        evaluated by log-domain summation over the window.
        """
        theta = np.asarray(theta, dtype=float)
        p = np.sin(theta / 2.0) ** 2
        ks = self.params.spike_indices()
        logpmf = log_binom_pmf(self.n, ks[None, :], np.atleast_1d(p)[:, None])
        window_mass = np.exp(logsumexp(logpmf, axis=1))
        out = s * (self.n * p + self.params.surplus * window_mass.reshape(p.shape))
        return out if out.ndim else float(out)

    def tridiagonal_mp(self, s):
        """Tridiagonal entries of H(s) as exact mpmath values (caller sets precision)."""
        return _tridiagonal_mp_linear(self.n, s, self.params.spike_indices(),
                                      _mp_surplus(self.n, self.alpha))

    @property
    def alpha(self):
        return self.params.alpha

    def __repr__(self):
        return f"SpikeCost({self.params})"


class SpikelessCost:
    """Plain Hamming-weight cost h(w) = w (no barrier).

    Unlike the spike models, any positive n is allowed: nothing here is tied
    to the n/4 barrier location.
    """

    def __init__(self, n):
        if n <= 0:
            raise ValueError(f"n must be positive, got {n}")
        self.n = n
        self.driver_coeff = 1.0

    def h(self, w):
        return np.asarray(w, dtype=float)

    def surplus_at(self, k):
        return np.zeros_like(np.asarray(k, dtype=float))

    def coherent_cost(self, theta, s):
        p = np.sin(np.asarray(theta, dtype=float) / 2.0) ** 2
        return s * self.n * p

    def tridiagonal_mp(self, s):
        return _tridiagonal_mp_linear(self.n, s, np.array([], dtype=int), None)

    def __repr__(self):
        return f"SpikelessCost(n={self.n})"


def spikeless_cost(n):
    return SpikelessCost(n)


class CubicCost:
    """Cubic bit-symmetric cost with classical shape g(u) = 4qu(1-u)^2 + 4u^2(1-u) + 4u^3/3.

    The classical coherent energy is (n/2)^3 [2(1-s)(1-sin theta cos phi) + s g(u)]
    with u = sin^2(theta/2); the driver coefficient n^2/2 makes the generic
    driver term (n/2) C_n (1-s)(1 - sin theta cos phi) reproduce it exactly.
    """

    def __init__(self, n, q):
        if n <= 0 or n % 4 != 0:
            raise ValueError(f"n must be a positive multiple of 4, got {n}")
        self.n = n
        self.q = float(q)
        self.driver_coeff = n**2 / 2.0

    def g(self, u):
        u = np.asarray(u, dtype=float)
        return 4.0 * self.q * u * (1.0 - u) ** 2 + 4.0 * u**2 * (1.0 - u) + (4.0 / 3.0) * u**3

    def h(self, w):
        w = np.asarray(w, dtype=float)
        out = (self.n / 2.0) ** 3 * self.g(w / self.n)
        return out if out.ndim else float(out)

    def surplus_at(self, k):
        # Tridiagonal builds use h directly; there is no linear baseline to subtract.
        return self.h(k)

    def coherent_cost(self, theta, s):
        u = np.sin(np.asarray(theta, dtype=float) / 2.0) ** 2
        return s * (self.n / 2.0) ** 3 * self.g(u)

    def __repr__(self):
        return f"CubicCost(n={self.n}, q={self.q})"


class CustomCost:
    """Arbitrary bit-symmetric cost given as a table h(w), w = 0..n."""

    def __init__(self, n, values, driver_coeff=1.0):
        values = np.asarray(values, dtype=float)
        if values.shape != (n + 1,):
            raise ValueError(f"cost table must have n+1 = {n + 1} entries")
        if not np.all(np.isfinite(values)):
            raise ValueError("cost table must be finite")
        if driver_coeff <= 0:
            raise ValueError("driver coefficient must be positive")
        self.n = n
        self.values = values
        self.driver_coeff = float(driver_coeff)

    def h(self, w):
        out = self.values[np.asarray(w)]
        return out if np.ndim(out) else float(out)

    def surplus_at(self, k):
        return self.values[np.asarray(k)] - np.asarray(k, dtype=float)

    def coherent_cost(self, theta, s):
        theta = np.asarray(theta, dtype=float)
        p = np.atleast_1d(np.sin(theta / 2.0) ** 2)
        ks = np.arange(self.n + 1)
        pmf = np.exp(log_binom_pmf(self.n, ks[None, :], p[:, None]))
        out = s * (pmf @ self.values).reshape(np.shape(theta))
        return out if out.ndim else float(out)

    def __repr__(self):
        return f"CustomCost(n={self.n})"


@dataclass
class TridiagonalOperator:
    """Symmetric tridiagonal operator: diag[k], k=0..n and offdiag[k], k=1..n.

    offdiag[k] couples |k-1> and |k>; storing a single off-diagonal array keeps
    the operator symmetric by construction.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    norm_factor: float = 1.0

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.offdiag = np.asarray(self.offdiag, dtype=float)
        if self.offdiag.shape[0] != self.diag.shape[0] - 1:
            raise ValueError("offdiag must have one fewer entry than diag")

    @property
    def dim(self):
        return self.diag.shape[0]

    def gershgorin_radius(self):
        """Bound on the spectral radius from Gershgorin discs."""
        n = self.dim
        left = np.zeros(n)
        right = np.zeros(n)
        left[1:] = np.abs(self.offdiag)
        right[:-1] = np.abs(self.offdiag)
        return float(np.max(np.abs(self.diag) + left + right))

    def matvec(self, v):
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self):
        m = np.diag(self.diag)
        idx = np.arange(self.dim - 1)
        m[idx, idx + 1] = self.offdiag
        m[idx + 1, idx] = self.offdiag
        return m


def _mp_surplus(n, alpha):
    from mpmath import mp

    return mp.mpf(3) / 4 * mp.power(n, mp.mpf(alpha))


def _tridiagonal_mp_linear(n, s, spike_ks, surplus_mp):
    """mpmath entries for h(k) = k plus an optional constant barrier surplus."""
    from mpmath import mp

    s_mp = mp.mpf(float(s))
    r = mp.sqrt(s_mp**2 + (1 - s_mp) ** 2)
    sin_t = (1 - s_mp) / r
    cos_t = s_mp / r
    half_n = mp.mpf(n) / 2
    diag = [cos_t * (mp.mpf(k) - half_n) for k in range(n + 1)]
    if surplus_mp is not None:
        bump = cos_t * surplus_mp
        for k in spike_ks:
            diag[int(k)] += bump
    offdiag = [-(sin_t / 2) * mp.sqrt(mp.mpf(k * (n + 1 - k))) for k in range(1, n + 1)]
    return diag, offdiag, r


def build_hamiltonian(cost_model, point):
    """Tridiagonal H(s) in the weight basis for any bit-symmetric cost model.

    diag[k]    = cos(theta) (h(k) - n/2)
    offdiag[k] = -(sin(theta)/2) sqrt(k (n+1-k))

    For a unit driver coefficient the angle is the one carried by ``point``;
    a driver coefficient C != 1 rescales the normalization to
    r = sqrt(s^2 + (1-s)^2 C^2) with sin(theta) = (1-s)C/r, cos(theta) = s/r.
    The physical gap is r times the gap of the returned operator.
    """
    n = cost_model.n
    c = cost_model.driver_coeff
    s = point.s
    if c == 1.0:
        sin_t, cos_t, r = point.sin_theta, point.cos_theta, point.norm_factor
    else:
        r = math.hypot(s, (1.0 - s) * c)
        sin_t, cos_t = (1.0 - s) * c / r, s / r
    diag = cos_t * (np.asarray(cost_model.h(np.arange(n + 1)), dtype=float) - n / 2.0)
    k = np.arange(1, n + 1, dtype=float)
    offdiag = -(sin_t / 2.0) * np.sqrt(k * (n + 1.0 - k))
    return TridiagonalOperator(diag=diag, offdiag=offdiag, norm_factor=r)
