"""Independent brute-force oracles used to freeze regression fixtures.

Each oracle states the defining inequalities directly in multiplicative
form with 50-digit mpmath arithmetic and searches upward for the smallest
admissible integer.  None of them shares code with the package.
"""

import mpmath

mp = mpmath.mp.clone()
mp.dps = 50


def tail(epsilon, k):
    return mp.mpf(epsilon) * mp.mpf(2) ** (-k)


def term(epsilon, j):
    return mp.mpf(epsilon) * mp.mpf(2) ** (-j)


def finite_schedule(supports, norms, norm_S, epsilon, K):
    """Smallest alpha with ||S||^{alpha(j)} ||f_j|| <= eps_j, alpha(1) >= N(1), and
    increments >= max(log term, N(k-1), N(k), 1)."""
    S = mp.mpf(norm_S)
    alphas = []
    for k in range(1, K + 1):
        f = mp.mpf(norms[k - 1])
        if k == 1:
            a = 0
            while not (S ** a * f <= term(epsilon, 1) and a >= supports[0]):
                a += 1
        else:
            prev = alphas[-1]
            a = prev + 1
            while not (S ** (a - prev) * f <= term(epsilon, k)
                       and a - prev >= supports[k - 2] and a - prev >= supports[k - 1]):
                a += 1
        alphas.append(a)
    return tuple(alphas)


def localized_schedule(C, beta, lam, norm_S, B, norms, xd_norm, epsilon, K, include_n0=True):
    lam, beta, S = mp.mpf(lam), mp.mpf(beta), mp.mpf(norm_S)
    alphas = [0]
    for k in range(2, K + 1):
        prev = alphas[-1]
        inner = mp.mpf(1) if include_n0 else mp.mpf(0)
        for n in range(1, k):
            inner += (lam * mp.exp(-beta)) ** (-alphas[n - 1]) * mp.exp(beta * n)
        rhs = (mp.log(tail(epsilon, k)) - mp.log(xd_norm) - mp.log(inner)
               - mp.log(2 * mp.mpf(B) * mp.mpf(C))) / (mp.log(lam) - beta)
        a = prev + 1
        while not (S ** (a - prev) * mp.mpf(norms[k - 1]) <= term(epsilon, k) / 2
                   and a >= prev + k - 2 and a > rhs):
            a += 1
        alphas.append(a)
    return tuple(alphas)


def function_schedule(norms, norm_S, lam, norm_Tm1, mu, a_ks, C_ks, epsilon, K):
    S = mp.mpf(norm_S)
    rho = mp.mpf(mu) / (mp.mpf(lam) * mp.mpf(norm_Tm1))
    alphas = [0]
    for k in range(2, K + 1):
        prev = alphas[-1]
        inner = sum(mp.mpf(C_ks[n - 1]) * rho ** alphas[n - 1] for n in range(1, k))
        rhs = (mp.log(2) + mp.log(inner) - mp.log(tail(epsilon, k))) / mp.log(rho)
        a = prev + 1
        while not (S ** (a - prev) * mp.mpf(norms[k - 1]) < term(epsilon, k) / 2
                   and a - prev >= a_ks[k - 2] and a >= rhs):
            a += 1
        alphas.append(a)
    return tuple(alphas)


def lp_geometric_norm(beta, p, terms=4000):
    """||{exp(-beta j)}_{j>=1}||_p by direct partial summation."""
    return mp.nsum(lambda j: mp.exp(-mp.mpf(beta) * p * j), [1, mp.inf]) ** (mp.mpf(1) / p)
