"""Independent reference implementations used by the tests.

Nothing here imports the package under test.
"""
import math

import mpmath as mp


def wright_bruteforce(a1, alpha1, a2, alpha2, b1, beta1, z, terms=1000, dps=64, start=0):
    """Direct extended-precision sum of the 2Psi1 series."""
    with mp.workdps(dps):
        # slopes enter as exact binary values so products with k are not rounded
        a1, alpha1, a2, alpha2, b1, beta1 = (mp.mpf(v) for v in (a1, alpha1, a2, alpha2, b1, beta1))
        z = mp.mpf(z)
        acc = mp.mpf(0)
        for k in range(start, terms):
            num = mp.gamma(a1 + alpha1 * k) * mp.gamma(a2 + alpha2 * k)
            acc += num * mp.rgamma(b1 + beta1 * k) * z**k / mp.factorial(k)
        return float(acc)


def sfnb_pmf_bruteforce(n, pt, beta, lam, alpha, terms=1000, dps=64):
    with mp.workdps(dps):
        beta = mp.mpf(beta)
        x = mp.mpf(lam) ** beta / alpha
        acc = mp.mpf(0)
        for k in range(terms):
            acc += mp.gamma(1 + beta * k) * mp.gamma(pt + k) * mp.rgamma(1 - n + beta * k) * (-x) ** k / mp.factorial(k)
        return float((-1) ** n * acc / (mp.factorial(n) * mp.gamma(pt)))


def poisson_pmf(n, mu):
    return math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))


def nb_closed(n, shape, eta):
    return math.exp(math.lgamma(n + shape) - math.lgamma(shape) - math.lgamma(n + 1) + n * math.log(eta) + shape * math.log1p(-eta))


def levy_nb(k, p, lam, alpha):
    return p / k * (lam / (alpha + lam)) ** k


def multi_nb_closed(nvec, t, alpha, lambdas):
    """Joint pmf of the d-dimensional NB process by direct substitution."""
    s, sl = sum(nvec), sum(lambdas)
    log_binom = math.lgamma(s + t) - math.lgamma(t) - math.lgamma(s + 1)
    out = math.exp(t * math.log(alpha) + math.lgamma(s + 1) - (s + t) * math.log(alpha + sl) + log_binom)
    for ni, li in zip(nvec, lambdas):
        out *= li**ni / math.factorial(ni)
    return out
