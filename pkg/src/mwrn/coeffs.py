"""Exact rational Q-function expansions for the two-hop network-coded PAM chain.

Hop 1 (pair -> relay): with equal effective amplitudes the received signal is
a uniform superimposed constellation {0, +-2, ..., +-(2 sqrt(M)-2)} whose
point k in [0, 2 sqrt(M)-2] occurs with pair-count weight sqrt(M)-|k-(sqrt(M)-1)|
and carries the NC residue k mod sqrt(M).  Nearest-point decision boundaries
sit at odd integers, so every residue-transition probability c[p][q](g) is an
integer/rational combination of Q(u*sqrt(g)) with odd u.

Hop 2 (relay -> user): a plain sqrt(M)-PAM transmission of the residue, giving
transition probabilities d[p'][q'](g) as combinations of Q(v*sqrt(g)).

The stored ``b`` coefficients carry a 1/sqrt(M) class-prior fold (the
convention of the 16-QAM reference table); ``build_prob_matrices`` undoes it,
so both C and D are exactly row-stochastic at every SNR.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import erfc


def qfunc(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


@dataclass(frozen=True)
class CoeffTables:
    """Rational coefficients of the Q-function expansions for one sqrt(M).

    ``a[p][q]`` maps odd distance u -> coefficient of Q(u*sqrt(gamma_r)) in
    c[p][q]; the diagonal additionally carries a constant 1.  ``b`` is the
    same for the second hop, stored with the 1/sqrt(M) fold.
    """

    sqrt_m: int
    u_values: tuple[int, ...]
    v_values: tuple[int, ...]
    a: tuple[tuple[dict, ...], ...]
    b: tuple[tuple[dict, ...], ...]

    def a_tensor(self) -> np.ndarray:
        """Float array A[p, q, i] with i indexing ``u_values``."""
        return _dense(self.a, self.u_values)

    def b_tensor(self) -> np.ndarray:
        return _dense(self.b, self.v_values)


def _dense(table, dists) -> np.ndarray:
    n = len(table)
    out = np.zeros((n, n, len(dists)))
    index = {u: i for i, u in enumerate(dists)}
    for p in range(n):
        for q in range(n):
            for u, coeff in table[p][q].items():
                out[p, q, index[u]] = float(coeff)
    return out


def _q_terms(distance: int):
    """(constant, {u: coeff}) decomposition of Q(distance * sqrt(g)).

    Negative distances use Q(-x) = 1 - Q(x); a zero distance cannot occur
    because boundaries are odd and constellation points even.
    """
    if distance > 0:
        return Fraction(0), {distance: Fraction(1)}
    if distance < 0:
        return Fraction(1), {-distance: Fraction(-1)}
    raise ValueError("decision boundaries never coincide with constellation points")


def _region_probability(mean: int, lo: int | None, hi: int | None):
    """P(mean + noise in (lo, hi)) as (constant, {u: coeff}) with Q(u*sqrt(g)) terms.

    Computed as Q(lo - mean) - Q(hi - mean); ``None`` bounds are infinite
    (Q(-inf) = 1, Q(+inf) = 0).
    """
    c_lo, t_lo = (Fraction(1), {}) if lo is None else _q_terms(lo - mean)
    c_hi, t_hi = (Fraction(0), {}) if hi is None else _q_terms(hi - mean)
    const = c_lo - c_hi
    terms: dict[int, Fraction] = dict(t_lo)
    for u, coeff in t_hi.items():
        terms[u] = terms.get(u, Fraction(0)) - coeff
    return const, {u: c for u, c in terms.items() if c != 0}


def _accumulate(table, p, q, weight, const, terms, expect_const):
    cell = table[p][q]
    for u, coeff in terms.items():
        cell[u] = cell.get(u, Fraction(0)) + weight * coeff
        if cell[u] == 0:
            del cell[u]
    expect_const[p][q] += weight * const


@lru_cache(maxsize=None)
def derive_coeff_tables(sqrt_m: int) -> CoeffTables:
    """Derive the full rational coefficient tables for one constellation size."""
    if sqrt_m < 2:
        raise ValueError("sqrt(M) must be an integer >= 2")
    n_sum = 2 * sqrt_m - 1

    # Hop 1: superimposed constellation.
    a = tuple(tuple({} for _ in range(sqrt_m)) for _ in range(sqrt_m))
    const_a = [[Fraction(0)] * sqrt_m for _ in range(sqrt_m)]
    points = np.arange(n_sum)
    sigma = 2 * points - (n_sum - 1)  # even integers
    counts = sqrt_m - np.abs(points - (sqrt_m - 1))
    classes = points % sqrt_m
    for k in range(n_sum):
        p = int(classes[k])
        weight = Fraction(int(counts[k]), sqrt_m)  # P(sum point | class p)
        for k_hat in range(n_sum):
            lo = None if k_hat == 0 else int(sigma[k_hat]) - 1
            hi = None if k_hat == n_sum - 1 else int(sigma[k_hat]) + 1
            const, terms = _region_probability(int(sigma[k]), lo, hi)
            _accumulate(a, p, int(classes[k_hat]), weight, const, terms, const_a)

    # Hop 2: plain sqrt(M)-PAM, folded by the 1/sqrt(M) class prior.
    b = tuple(tuple({} for _ in range(sqrt_m)) for _ in range(sqrt_m))
    const_b = [[Fraction(0)] * sqrt_m for _ in range(sqrt_m)]
    fold = Fraction(1, sqrt_m)
    for p in range(sqrt_m):
        level = 2 * p - (sqrt_m - 1)
        for q in range(sqrt_m):
            level_q = 2 * q - (sqrt_m - 1)
            lo = None if q == 0 else level_q - 1
            hi = None if q == sqrt_m - 1 else level_q + 1
            const, terms = _region_probability(level, lo, hi)
            _accumulate(b, p, q, fold, const, terms, const_b)

    for p in range(sqrt_m):
        for q in range(sqrt_m):
            if const_a[p][q] != (1 if p == q else 0):
                raise AssertionError("hop-1 constant term must be the identity")
            if const_b[p][q] != fold * (1 if p == q else 0):
                raise AssertionError("hop-2 constant term must be the identity")

    u_values = tuple(range(1, 2 * (2 * sqrt_m - 2), 2))
    v_values = tuple(range(1, 2 * (sqrt_m - 1), 2))
    return CoeffTables(sqrt_m=sqrt_m, u_values=u_values, v_values=v_values, a=a, b=b)


@dataclass(frozen=True, eq=False)
class ProbMatrices:
    """Residue-transition matrices of the two hops at given SNRs."""

    C: np.ndarray  # C[p, q] = P(relay residue q | true residue p)
    D: np.ndarray  # D[p', q'] = P(user residue q' | relay residue p')


def _hop_matrix(tensor: np.ndarray, dists, gamma, unfold: float) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    q = qfunc(np.sqrt(gamma)[..., None] * np.asarray(dists))  # (..., n_dists)
    m = unfold * np.einsum("pqi,...i->...pq", tensor, q)
    n = tensor.shape[0]
    return m + np.eye(n)


def build_prob_matrices(gamma_r, gamma_user, tables: CoeffTables) -> ProbMatrices:
    """Evaluate C and D at scalar or array SNRs (must be strictly positive)."""
    if np.any(np.asarray(gamma_r) <= 0) or np.any(np.asarray(gamma_user) <= 0):
        raise ValueError("SNRs must be strictly positive")
    C = _hop_matrix(tables.a_tensor(), tables.u_values, gamma_r, 1.0)
    D = _hop_matrix(tables.b_tensor(), tables.v_values, gamma_user, float(tables.sqrt_m))
    return ProbMatrices(C=C, D=D)


def table_rows(tables: CoeffTables):
    """Flatten both coefficient tables to (table, p, q, u, num, den) rows."""
    rows = []
    for name, tab, dists in (("a", tables.a, tables.u_values), ("b", tables.b, tables.v_values)):
        for p in range(tables.sqrt_m):
            for q in range(tables.sqrt_m):
                for u in dists:
                    coeff = tab[p][q].get(u, Fraction(0))
                    rows.append((name, p, q, u, coeff.numerator, coeff.denominator))
    return rows
