import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spikegap._logdomain import (
    log_binom,
    log_binom_pmf,
    log_dot,
    normalize_logmags,
    signed_logsumexp,
)


@given(st.integers(0, 60), st.integers(0, 60))
def test_log_binom_matches_comb(n, k):
    if k > n:
        assert log_binom(n, k) == -np.inf
    else:
        assert math.isclose(float(log_binom(n, k)), math.log(math.comb(n, k)),
                            rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("p", [0.0, 1e-3, 0.25, 0.5, 0.9, 1.0])
def test_pmf_sums_to_one(p):
    n = 37
    ks = np.arange(n + 1)
    total = np.exp(log_binom_pmf(n, ks, p)).sum()
    assert math.isclose(total, 1.0, rel_tol=1e-12)


def test_signed_logsumexp_cancellation():
    sign, logmag = signed_logsumexp([1, -1], [0.0, 0.0])
    assert sign == 0 and logmag == -np.inf
    sign, logmag = signed_logsumexp([1, -1, 1], [2.0, 1.0, -1.0])
    expected = math.exp(2.0) - math.exp(1.0) + math.exp(-1.0)
    assert sign == 1
    assert math.isclose(math.exp(logmag), expected, rel_tol=1e-12)


def test_normalize_logmags():
    logs = np.array([-1000.0, -1001.0, -1002.0])
    out = normalize_logmags(logs)
    assert math.isclose(np.exp(2 * out).sum(), 1.0, rel_tol=1e-12)


def test_log_dot_orthogonal():
    sign, logmag = log_dot([1, -1], [0.0, 0.0], [1, 1], [0.0, 0.0])
    assert sign == 0 and logmag == -np.inf
