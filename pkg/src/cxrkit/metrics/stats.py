"""Statistical procedures: paired t-test, Mann-Whitney U, ICC, agreement ratio.

Distribution functions are implemented directly (Lanczos log-gamma, Lentz
continued-fraction incomplete beta, erf-based normal CDF) so no statistics
package is required at runtime.
"""

from __future__ import annotations

import math
from itertools import combinations

LIKERT_VALUES = (-10, -5, 0, 5, 10)

_LANCZOS = (
    76.18009172947146,
    -86.50532032941677,
    24.01409824083091,
    -1.231739572450155,
    0.1208650973866179e-2,
    -0.5395239384953e-5,
)


def _ln_gamma(x: float) -> float:
    y = x
    tmp = x + 5.5
    tmp -= (x + 0.5) * math.log(tmp)
    ser = 1.000000000190015
    for c in _LANCZOS:
        y += 1.0
        ser += c / y
    return -tmp + math.log(2.5066282746310005 * ser / x)


def _betacf(a: float, b: float, x: float) -> float:
    # Lentz's continued fraction for the incomplete beta function
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    return h


def _betai(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = _ln_gamma(a + b) - _ln_gamma(a) - _ln_gamma(b) + a * math.log(x) + b * math.log(1.0 - x)
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _t_two_sided_p(t: float, df: int) -> float:
    return _betai(df / 2.0, 0.5, df / (df + t * t))


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def paired_t(a, b) -> float:
    """Two-sided p of the classic paired t-test, df = n - 1."""
    a, b = list(a), list(b)
    if len(a) != len(b) or len(a) < 2:
        raise ValueError("paired_t requires equal-length samples of size >= 2")
    diffs = [x - y for x, y in zip(a, b)]
    n = len(diffs)
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        raise ValueError("degenerate: zero-variance differences")
    t = mean / math.sqrt(var / n)
    return _t_two_sided_p(abs(t), n - 1)


def _u_statistic(a, b) -> float:
    u = 0.0
    for x in a:
        for y in b:
            if x > y:
                u += 1.0
            elif x == y:
                u += 0.5
    return u


def mann_whitney(a, b) -> float:
    """Two-sided Mann-Whitney U p-value.

    Exact enumeration for n1 + n2 <= 12 without ties; otherwise normal
    approximation with tie and continuity corrections.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("mann_whitney requires two non-empty samples")
    n1, n2 = len(a), len(b)
    pooled = a + b
    has_ties = len(set(pooled)) != len(pooled)
    u1 = _u_statistic(a, b)

    if n1 + n2 <= 12 and not has_ties:
        total = 0
        le = 0
        ge = 0
        indices = range(n1 + n2)
        for combo in combinations(indices, n1):
            chosen = set(combo)
            ga = [pooled[i] for i in indices if i in chosen]
            gb = [pooled[i] for i in indices if i not in chosen]
            u = _u_statistic(ga, gb)
            total += 1
            if u <= u1:
                le += 1
            if u >= u1:
                ge += 1
        return min(1.0, 2.0 * min(le / total, ge / total))

    mu = n1 * n2 / 2.0
    n = n1 + n2
    tie_term = 0.0
    seen = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_term += count**3 - count
    sigma_sq = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if sigma_sq <= 0:
        return 1.0
    z = (abs(u1 - mu) - 0.5) / math.sqrt(sigma_sq)
    if z < 0:
        z = 0.0
    return min(1.0, 2.0 * _normal_sf(z))


def icc(ratings) -> float:
    """ICC(2,1): two-way random effects, absolute agreement, single rater."""
    rows = [list(r) for r in ratings]
    n = len(rows)
    if n < 2:
        raise ValueError("icc requires >= 2 cases")
    k = len(rows[0])
    if k < 2 or any(len(r) != k for r in rows):
        raise ValueError("icc requires >= 2 raters and a complete matrix")
    grand = sum(sum(r) for r in rows) / (n * k)
    sst = sum((x - grand) ** 2 for r in rows for x in r)
    if sst == 0.0:
        raise ValueError("degenerate: zero total variance")
    row_means = [sum(r) / k for r in rows]
    col_means = [sum(rows[i][j] for i in range(n)) / n for j in range(k)]
    ssr = k * sum((m - grand) ** 2 for m in row_means)
    ssc = n * sum((m - grand) ** 2 for m in col_means)
    sse = sst - ssr - ssc
    msr = ssr / (n - 1)
    msc = ssc / (k - 1)
    mse = sse / ((n - 1) * (k - 1))
    denom = msr + (k - 1) * mse + k * (msc - mse) / n
    if denom == 0.0:
        raise ValueError("degenerate: zero denominator")
    return (msr - mse) / denom


def agreement_ratio(likert_values) -> float:
    """Fraction of ratings at agree (5) or strongly agree (10)."""
    values = list(likert_values)
    if not values:
        raise ValueError("agreement_ratio: empty input")
    for v in values:
        if v not in LIKERT_VALUES:
            raise ValueError(f"likert value {v!r} not in {LIKERT_VALUES}")
    return sum(1 for v in values if v >= 5) / len(values)
