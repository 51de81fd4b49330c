"""Sign + log-magnitude arithmetic for amplitudes that underflow float64.

Binomial-type amplitudes like sqrt(C(n,k)) p^k q^(n-k) drop below the float64
range near n ~ 1500, so wavefunctions are carried as (sign, log|amplitude|)
pairs.  Exact zeros are encoded as sign 0 with log magnitude -inf.
"""

import numpy as np
from scipy.special import gammaln, logsumexp

NEG_INF = -np.inf


def log_binom(n, k):
    """log C(n, k), vectorized; exact -inf outside 0 <= k <= n."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    out = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    return np.where((k < 0) | (k > n), NEG_INF, out)


def log_binom_pmf(n, k, p):
    """log of the binomial pmf C(n,k) p^k (1-p)^(n-k), safe at p = 0 and 1."""
    k = np.asarray(k, dtype=float)
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        core = log_binom(n, k) + k * np.log(p) + (n - k) * np.log1p(-p)
    core = np.where(p <= 0.0, np.where(k == 0, 0.0, NEG_INF), core)
    core = np.where(p >= 1.0, np.where(k == n, 0.0, NEG_INF), core)
    return core


def signed_logsumexp(signs, logmags):
    """Sum of sign_i * exp(logmag_i), returned as (sign, logmag)."""
    signs = np.asarray(signs, dtype=float)
    logmags = np.asarray(logmags, dtype=float)
    mask = (signs != 0) & np.isfinite(logmags)
    if not mask.any():
        return 0, NEG_INF
    val, sgn = logsumexp(logmags[mask], b=signs[mask], return_sign=True)
    if sgn == 0:
        return 0, NEG_INF
    return int(sgn), float(val)


def normalize_logmags(logmags):
    """Shift log magnitudes so that sum of exp(2*logmag) equals 1."""
    logmags = np.asarray(logmags, dtype=float)
    log_norm_sq = logsumexp(2.0 * logmags[np.isfinite(logmags)])
    return logmags - 0.5 * log_norm_sq


def log_dot(signs_a, logmags_a, signs_b, logmags_b):
    """Inner product of two sign/log-magnitude vectors as (sign, logmag)."""
    return signed_logsumexp(
        np.asarray(signs_a, float) * np.asarray(signs_b, float),
        np.asarray(logmags_a, float) + np.asarray(logmags_b, float),
    )
