"""Eigenvalues, eigenvectors, and spectral-gap scans for tridiagonal operators.

Eigenvalues come from Sturm-sequence bisection: O(n) per step, robust for the
n <= 3e4 sizes this package targets, and available in two arithmetic backends
(float64 via numba, arbitrary precision via mpmath).  Precision escalates
automatically when a gap falls within 2^4 units in the last place of the
spectral-radius bound, because float64 silently returns noise there.

Eigenvectors are computed by a two-sided shooting recursion carried in
sign + log-magnitude form, which stays exact far into the tails where linear
float64 amplitudes underflow (binomial-type amplitudes die near n ~ 1500).
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from mpmath import mp

from . import _sturm
from ._logdomain import NEG_INF, normalize_logmags
from .errors import ConfigurationError, NearDegenerateError
from .model import AdiabaticPoint, build_hamiltonian

__all__ = [
    "GapMethod",
    "EigenPair",
    "GapEstimate",
    "sturm_count",
    "lowest_eigenvalues",
    "eigenvector",
    "gap",
    "min_gap_scan",
    "golden_section_min",
]

DEFAULT_PRECISION_BITS = 53
MAX_PRECISION_BITS = 4096
#: a bracketed gap is trusted only if it exceeds 2**(GUARD_BITS - prec) * radius
GUARD_BITS = 4


class GapMethod(Enum):
    EXACT = "exact"
    VARIATIONAL_LOWER = "variational_lower"
    STOQUASTIC_UPPER = "stoquastic_upper"
    INSTANTON_EXPONENT = "instanton_exponent"
    WKB = "wkb"


@dataclass
class EigenPair:
    """Eigenvalue with its eigenvector stored as sign + log magnitude."""

    value: float
    signs: np.ndarray
    logmags: np.ndarray
    precision_bits: int = DEFAULT_PRECISION_BITS

    def amplitudes(self):
        """Linear amplitudes; underflows to 0.0 where logmag < float64 range."""
        with np.errstate(under="ignore"):
            return self.signs * np.exp(self.logmags)

    def residual(self, op):
        """Relative residual ||H v - lambda v|| / (||H|| ||v||).

        Evaluated with the vector rescaled to unit max amplitude, so entries
        more than ~700 log units below the peak contribute zero; they are
        irrelevant to the residual at float64 resolution anyway.
        """
        shift = np.max(self.logmags[np.isfinite(self.logmags)])
        with np.errstate(under="ignore"):
            v = self.signs * np.exp(self.logmags - shift)
        r = op.matvec(v) - self.value * v
        return float(np.linalg.norm(r) / (op.gershgorin_radius() * np.linalg.norm(v)))


@dataclass
class GapEstimate:
    """A gap value (or log-gap) tagged with method and precision metadata."""

    value: float | None
    method: GapMethod
    s: float | None = None
    params: object = None
    log_value: float | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS
    flags: frozenset = frozenset()

    def __post_init__(self):
        if self.value is not None and self.value < 0:
            raise ValueError(f"gap value must be >= 0, got {self.value}")
        if self.value is not None and self.log_value is None and self.value > 0:
            self.log_value = math.log(self.value)


def sturm_count(op, lam):
    """Number of eigenvalues of ``op`` strictly below ``lam`` (float64 backend)."""
    e2 = op.offdiag**2
    return int(_sturm.count_below_f64(op.diag, e2, float(lam), _sturm.pivot_floor(e2)))


def _validate_precision(precision_bits):
    if not 1 <= precision_bits <= MAX_PRECISION_BITS:
        raise ConfigurationError(
            f"precision_bits must lie in [1, {MAX_PRECISION_BITS}], got {precision_bits}"
        )


def lowest_eigenvalues(op, count, precision_bits=DEFAULT_PRECISION_BITS):
    """The ``count`` smallest eigenvalues in ascending order.

    Each eigenvalue is bracketed by bisection to absolute width
    2**(-precision_bits) times the Gershgorin radius of the operator.  For
    precision_bits > 53 the entries are promoted to mpmath (exactly — they
    are dyadic) and the float64 result seeds the high-precision brackets.
    """
    _validate_precision(precision_bits)
    if not 1 <= count <= op.dim:
        raise ValueError(f"count must lie in [1, {op.dim}], got {count}")
    radius = op.gershgorin_radius()
    vals = _lowest_f64(op.diag, op.offdiag**2, count, radius, min(precision_bits, 53))
    if precision_bits <= 53:
        return vals
    with mp.workprec(precision_bits + 30):
        d_mp = [mp.mpf(x) for x in op.diag]
        e2_mp = [mp.mpf(x) ** 2 for x in op.offdiag]
    return _lowest_mp(d_mp, e2_mp, count, radius, precision_bits, seeds=vals)


def _lowest_f64(d, e2, count, radius, precision_bits):
    pivmin = _sturm.pivot_floor(e2)
    tol = 2.0 ** (-precision_bits) * radius
    lo0 = -radius * (1.0 + 1e-12) - pivmin
    hi0 = radius * (1.0 + 1e-12) + pivmin
    out = np.empty(count)
    for i in range(count):
        lo, hi = _sturm.bisect_index_f64(d, e2, i, lo0, hi0, tol, pivmin)
        out[i] = 0.5 * (lo + hi)
        lo0 = lo  # eigenvalues are requested in ascending order
    return out


def _lowest_mp(d_mp, e2_mp, count, radius, precision_bits, seeds=None):
    with mp.workprec(precision_bits + 30):
        rad = mp.mpf(radius)
        pivmin = mp.mpf(2) ** (-(2 * precision_bits + 100)) * max(mp.mpf(1), max(e2_mp))
        tol = mp.mpf(2) ** (-precision_bits) * rad
        seed_halfwidth = mp.mpf(2) ** (-40) * rad
        out = []
        for i in range(count):
            lo_full, hi_full = -rad - 1, rad + 1
            lo, hi = lo_full, hi_full
            if seeds is not None:
                slo = mp.mpf(float(seeds[i])) - seed_halfwidth
                shi = mp.mpf(float(seeds[i])) + seed_halfwidth
                if (
                    _sturm.count_below_mp(d_mp, e2_mp, slo, pivmin) <= i
                    and _sturm.count_below_mp(d_mp, e2_mp, shi, pivmin) >= i + 1
                ):
                    lo, hi = slo, shi
            lo, hi = _sturm.bisect_index_mp(d_mp, e2_mp, i, lo, hi, tol, pivmin)
            out.append((lo + hi) / 2)
    return out


def _shoot_log(d, e, lam):
    """One-directional three-term recursions in log space, both directions.

    Returns (signs_fwd, logs_fwd, signs_bwd, logs_bwd): the forward solution
    seeded at k=0 and the backward solution seeded at k=n, each satisfying
    every row of (T - lam) v = 0 except the seed's opposite end.
    """
    dim = d.shape[0]

    def sweep(forward):
        logs = np.full(dim, NEG_INF)
        sgn = np.zeros(dim, dtype=np.int8)
        idx = range(dim) if forward else range(dim - 1, -1, -1)
        first = 0 if forward else dim - 1
        logs[first] = 0.0
        sgn[first] = 1
        v_prev, v = 0.0, 1.0
        offset = 0.0
        for k in idx:
            if k == first:
                continue
            if forward:
                km = k - 1
                if km == 0:
                    v_next = (lam - d[0]) * v / e[0]
                else:
                    v_next = ((lam - d[km]) * v - e[km - 1] * v_prev) / e[km]
            else:
                kp = k + 1
                if kp == dim - 1:
                    v_next = (lam - d[dim - 1]) * v / e[dim - 2]
                else:
                    v_next = ((lam - d[kp]) * v - e[kp] * v_prev) / e[kp - 1]
            v_prev, v = v, v_next
            if v != 0.0:
                logs[k] = math.log(abs(v)) + offset
                sgn[k] = 1 if v > 0.0 else -1
            m = max(abs(v_prev), abs(v))
            if m > 1e120 or (0.0 < m < 1e-120):
                v_prev /= m
                v /= m
                offset += math.log(m)
        return sgn, logs

    sf, lf = sweep(True)
    sb, lb = sweep(False)
    return sf, lf, sb, lb


def _assemble_shot(d, e, lam, sf, lf, sb, lb):
    dim = d.shape[0]
    score = lf + lb
    score[(sf == 0) | (sb == 0)] = NEG_INF
    m = int(np.argmax(score))
    if not np.isfinite(score[m]):
        raise ValueError("shooting recursions vanished everywhere; bad eigenvalue?")
    logs = np.empty(dim)
    signs = np.empty(dim, dtype=np.int8)
    logs[: m + 1] = lf[: m + 1] - lf[m]
    signs[: m + 1] = sf[: m + 1]
    flip = int(sf[m]) * int(sb[m])
    logs[m + 1 :] = lb[m + 1 :] - lb[m]
    signs[m + 1 :] = sb[m + 1 :] * flip
    # row-m defect: the only equation the stitched vector does not enforce
    with np.errstate(under="ignore"):
        vm1 = signs[m - 1] * math.exp(logs[m - 1]) if m >= 1 else 0.0
        vm = float(signs[m])
        vp1 = signs[m + 1] * math.exp(logs[m + 1]) if m + 1 < dim else 0.0
    defect = (d[m] - lam) * vm
    scale = abs((d[m] - lam) * vm)
    if m >= 1:
        defect += e[m - 1] * vm1
        scale += abs(e[m - 1] * vm1)
    if m + 1 < dim:
        defect += e[m] * vp1
        scale += abs(e[m] * vp1)
    return signs, logs, defect, max(scale, 1e-300)


def eigenvector(op, eigenvalue, isolation_ulps=64):
    """Normalized eigenvector of ``op`` at ``eigenvalue`` as an EigenPair.

    Uses the two-sided shooting recursion stitched at the amplitude peak,
    with a secant polish of the eigenvalue on the stitch defect when needed.
    Refuses eigenvalues that are not isolated from their neighbors by more
    than the solver tolerance.
    """
    d, e = op.diag, op.offdiag
    radius = op.gershgorin_radius()
    iso = isolation_ulps * 2.0**-53 * radius
    n_in_window = sturm_count(op, eigenvalue + iso) - sturm_count(op, eigenvalue - iso)
    if n_in_window > 1:
        raise NearDegenerateError(eigenvalue, 2.0 * iso)

    lam = float(eigenvalue)
    sf, lf, sb, lb = _shoot_log(d, e, lam)
    signs, logs, defect, scale = _assemble_shot(d, e, lam, sf, lf, sb, lb)
    if abs(defect) > 1e-12 * scale:
        # secant on the stitch defect as a function of lambda
        best = (abs(defect) / scale, lam, signs, logs)
        lam_a, f_a = lam, defect
        lam_b = lam + max(abs(lam), radius) * 2.0**-48
        for _ in range(6):
            sf, lf, sb, lb = _shoot_log(d, e, lam_b)
            signs_b, logs_b, f_b, scale_b = _assemble_shot(d, e, lam_b, sf, lf, sb, lb)
            if abs(f_b) / scale_b < best[0]:
                best = (abs(f_b) / scale_b, lam_b, signs_b, logs_b)
            if abs(f_b) <= 1e-14 * scale_b or f_b == f_a:
                break
            lam_next = lam_b - f_b * (lam_b - lam_a) / (f_b - f_a)
            lam_a, f_a = lam_b, f_b
            lam_b = lam_next
        _, lam, signs, logs = best
    return EigenPair(value=lam, signs=signs, logmags=normalize_logmags(logs))


def _resolution_threshold(precision_bits, radius):
    return 2.0 ** (GUARD_BITS - precision_bits) * radius


def _mp_entries(cost_model, s):
    """mpmath tridiagonal entries; exact for models that support it."""
    if hasattr(cost_model, "tridiagonal_mp"):
        return cost_model.tridiagonal_mp(s)
    op = build_hamiltonian(cost_model, AdiabaticPoint.from_s(s))
    return (
        [mp.mpf(x) for x in op.diag],
        [mp.mpf(x) for x in op.offdiag],
        mp.mpf(op.norm_factor),
    )


def gap(cost_model, s, precision_bits=DEFAULT_PRECISION_BITS, physical=False,
        max_precision_bits=1024):
    """Exact spectral gap E'_1 - E'_0 of H(s) for the given cost model.

    Retries at doubled precision whenever the bracketed gap is within 2^4
    units in the last place of the spectral-radius bound; returns a flagged
    "unresolved" estimate (value None) if the cap is reached first.
    ``physical=True`` rescales by sqrt(s^2 + (1-s)^2) to the gap of the
    unnormalized interpolating Hamiltonian.
    """
    _validate_precision(precision_bits)
    op = build_hamiltonian(cost_model, AdiabaticPoint.from_s(s))
    radius = op.gershgorin_radius()
    pb = precision_bits
    while True:
        if pb <= 53:
            e0, e1 = lowest_eigenvalues(op, 2, precision_bits=pb)
            value = float(e1 - e0)
            log_value = math.log(value) if value > 0 else None
            norm = op.norm_factor
        else:
            with mp.workprec(pb + 30):
                d_mp, e_mp, norm_mp = _mp_entries(cost_model, s)
                e2_mp = [x * x for x in e_mp]
                seeds = _lowest_f64(op.diag, op.offdiag**2, 2, radius, 53)
                e0, e1 = _lowest_mp(d_mp, e2_mp, 2, radius, pb, seeds=seeds)
                gap_mp = e1 - e0
                if physical:
                    gap_mp *= norm_mp
                value = float(gap_mp) if gap_mp > 0 else 0.0
                log_value = float(mp.log(gap_mp)) if gap_mp > 0 else None
                norm = 1.0  # already applied
        resolved = value is not None and value > _resolution_threshold(pb, radius)
        if resolved or pb >= max_precision_bits:
            break
        pb = min(2 * pb, max_precision_bits)
    if not resolved:
        return GapEstimate(value=None, method=GapMethod.EXACT, s=s,
                           params=cost_model, precision_bits=pb,
                           flags=frozenset({"unresolved"}))
    if physical and pb <= 53:
        value *= norm
        log_value = math.log(value) if value > 0 else None
    flags = frozenset({"physical"}) if physical else frozenset()
    return GapEstimate(value=value, log_value=log_value, method=GapMethod.EXACT,
                       s=s, params=cost_model, precision_bits=pb, flags=flags)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, a, b, tol):
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    c = b - (b - a) * _INVPHI
    d = a + (b - a) * _INVPHI
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INVPHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INVPHI
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def min_gap_scan(cost_model, s_grid=(0.02, 0.98, 97), refine_tol=1e-6,
                 precision_bits=DEFAULT_PRECISION_BITS):
    """Locate the minimum of the gap curve over s.

    Coarse grid scan followed by golden-section refinement of the minimizing
    s to width ``refine_tol``.  A flat curve (no isolated minimum) and a
    multimodal grid profile are reported via flags on the returned estimate,
    in which case the best grid point is returned unrefined.
    """
    if isinstance(s_grid, tuple) and len(s_grid) == 3:
        grid = np.linspace(*s_grid)
    else:
        grid = np.asarray(s_grid, dtype=float)
    if grid.size < 5 or grid.min() <= 0.0 or grid.max() >= 1.0:
        raise ValueError("s grid must have >= 5 points strictly inside (0, 1)")

    def gap_at(s):
        est = gap(cost_model, s, precision_bits=precision_bits)
        return math.inf if est.value is None else est.value

    values = np.array([gap_at(s) for s in grid])
    i_best = int(np.argmin(values))
    spread = values.max() - values.min()
    if spread <= 1e-10 * (abs(values.max()) + 1e-30):
        est = gap(cost_model, grid[i_best], precision_bits=precision_bits)
        est.flags = est.flags | {"flat"}
        return float(grid[i_best]), est

    # a dip must clear float jitter on flat stretches to count as a minimum
    prominence = max(1e-9 * spread, 1e-12 * float(np.max(np.abs(values))))
    interior_minima = [
        i for i in range(1, grid.size - 1)
        if values[i] < min(values[i - 1], values[i + 1]) - prominence
    ]
    if len(interior_minima) > 1:
        est = gap(cost_model, grid[i_best], precision_bits=precision_bits)
        est.flags = est.flags | {"multimodal"}
        return float(grid[i_best]), est
    if i_best in (0, grid.size - 1):
        est = gap(cost_model, grid[i_best], precision_bits=precision_bits)
        est.flags = est.flags | {"edge"}
        return float(grid[i_best]), est

    a, b = grid[i_best - 1], grid[i_best + 1]
    s_min, _ = golden_section_min(gap_at, a, b, refine_tol)
    return float(s_min), gap(cost_model, s_min, precision_bits=precision_bits)
