"""Reference computations that share no code with the package."""
from fractions import Fraction
from itertools import product
from math import comb

import mpmath

mpmath.mp.dps = 40


def nb_pmf_exact(p, r, k):
    """Pr[W_r = k] as an exact rational of a rational p."""
    p = Fraction(p)
    return comb(r + k - 1, k) * p**r * (1 - p) ** k


def nb_pmf_generalized(p, r, k):
    """The signed expansion coefficient C(-r, k) p^r (-q)^k, in exact rationals."""
    p = Fraction(p)
    coeff = Fraction(1)
    for i in range(k):
        coeff *= Fraction(-r - i, i + 1)
    return coeff * p**r * (-(1 - p)) ** k


def nb_tail_mp(p, r, b):
    """Pr[W_r > b] via the regularized incomplete beta function at 40 digits."""
    p = mpmath.mpf(p)
    return 1 - mpmath.betainc(r, b + 1, 0, p, regularized=True)


def phi_mp(x):
    return mpmath.ncdf(mpmath.mpf(x))


def race_success_by_enumeration(m, p):
    """Probability that positives reach 2m+1 first, summing over all length-(4m+1)
    sequences with the game stopped at the first threshold crossing.

    Each full sequence carries its own probability; sequences that share a
    decided prefix are grouped, so summing full-length sequences where the
    positives hit h first is exact.
    """
    h = 2 * m + 1
    p = Fraction(p)
    q = 1 - p
    total = Fraction(0)
    for seq in product((True, False), repeat=4 * m + 1):
        a = b = 0
        winner = None
        for obs in seq:
            if obs:
                a += 1
            else:
                b += 1
            if a == h:
                winner = "A"
                break
            if b == h:
                winner = "B"
                break
        assert winner is not None
        if winner == "A":
            n_pos = sum(seq)
            total += p**n_pos * q ** (len(seq) - n_pos)
    return total


def race_paths(m):
    """Distinct stopped paths (tuples of bools) of the race with threshold 2m+1."""
    h = 2 * m + 1
    out = []

    def walk(prefix, a, b):
        if a == h or b == h:
            out.append(tuple(prefix))
            return
        walk(prefix + [True], a + 1, b)
        walk(prefix + [False], a, b + 1)

    walk([], 0, 0)
    return out
