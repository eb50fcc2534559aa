"""Independent high-precision oracles and finite-difference helpers.

These deliberately avoid the library's own code paths: the confluent
series is summed directly in 50-digit arithmetic, and derivatives of the
closed-form seed branches are assembled by the product rule from
contiguous relations, so the residual checks falsify the ODE-closure
jets rather than restate them.
"""

import mpmath as mp

mp.mp.dps = 50


def mp_hyp1f1(a, b, x, max_terms=300):
    """Direct Taylor summation of 1F1 in 50-digit arithmetic."""
    a, b, x = mp.mpc(a), mp.mpc(b), mp.mpc(x)
    term = mp.mpc(1)
    total = mp.mpc(1)
    for k in range(max_terms):
        term = term * (a + k) * x / ((b + k) * (k + 1))
        total += term
        if abs(term) < mp.mpf(10) ** (-45) * max(abs(total), 1):
            break
    return total


def mp_bessel_i(mu, x, max_terms=300):
    """Ascending modified-Bessel series in 50-digit arithmetic."""
    mu, x = mp.mpf(mu), mp.mpc(x)
    half = x / 2
    term = half**mu / mp.gamma(mu + 1)
    total = term
    q = half * half
    for k in range(max_terms):
        term = term * q / ((k + 1) * (mu + k + 1))
        total += term
        if abs(term) < mp.mpf(10) ** (-45) * max(abs(total), 1):
            break
    return total


def fd4_first(f, x, h):
    """Fourth-order central first derivative."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def fd4_second(f, x, h):
    """Fourth-order central second derivative."""
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h)
            - f(x + 2 * h)) / (12 * h * h)


def seed_branch_jet2(ell, eps, x):
    """(value, u', u'') of the two seed branches by direct differentiation.

    Uses d/dy 1F1(a,b;y) = (a/b) 1F1(a+1,b+1;y) twice plus the product
    rule on the closed-form prefactors; no Schrodinger closure involved.
    """
    ell, eps, x = mp.mpf(ell), mp.mpc(eps), mp.mpf(x)
    y = x * x / 2
    out = []
    for branch in (1, 2):
        if branch == 1:
            a = (1 - 2 * ell - 4 * eps) / 4
            b = (1 - 2 * ell) / 2
            p = -ell
        else:
            a = (3 + 2 * ell - 4 * eps) / 4
            b = (3 + 2 * ell) / 2
            p = ell + 1
        m0 = mp_hyp1f1(a, b, y)
        m1 = a / b * mp_hyp1f1(a + 1, b + 1, y)
        m2 = a * (a + 1) / (b * (b + 1)) * mp_hyp1f1(a + 2, b + 2, y)
        scale = mp.mpf(2) ** (-ell - mp.mpf(1) / 2) if branch == 2 else mp.mpf(1)
        pref = scale * x**p * mp.exp(-x * x / 4)
        dlog = p / x - x / 2
        u = pref * m0
        du = pref * (dlog * m0 + x * m1)
        # d2: differentiate du = pref*(dlog*m0 + x*m1)
        dpref = pref * dlog
        ddlog = -p / (x * x) - mp.mpf(1) / 2
        d2 = (dpref * (dlog * m0 + x * m1)
              + pref * (ddlog * m0 + dlog * x * m1 + m1 + x * x * m2))
        out.append((u, du, d2))
    return out
