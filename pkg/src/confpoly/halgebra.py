"""Combinatorics and binary-form algebra.

Subsets are 1-based tuples of strictly increasing labels.  A binary form of
degree ``k`` is stored as ``k + 1`` complex coefficients ``c[i]`` of
``u**(k-i) * v**i``.  Homogeneous polynomials of degree ``d`` in ``k + 1``
variables are stored densely, one coefficient per exponent tuple, with the
exponent tuples in descending lexicographic order (``z0**d`` first).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

__all__ = [
    "BinaryPoly",
    "MultiPoly",
    "enumerate_subsets",
    "subset_position",
    "complement",
    "subset_to_monomial",
    "monomials",
    "monomial_position",
    "pairing",
    "reproduce_eval",
    "horner_eval",
    "lambda_form",
    "lambda_weights",
    "product_linear_forms",
    "batch_product_linear_forms",
    "binary_product",
    "linear_factor",
    "binary_power",
    "pairing_matrix",
]


@dataclass(frozen=True)
class BinaryPoly:
    """Binary form ``sum_i coeffs[i] * u**(k-i) * v**i``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("BinaryPoly needs a non-empty 1-d coefficient vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, u, v):
        return horner_eval(self, u, v)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


@dataclass(frozen=True)
class MultiPoly:
    """Homogeneous polynomial of degree ``degree`` in ``nvars`` variables.

    ``coeffs[r]`` multiplies the monomial ``monomials(nvars, degree)[r]``.
    """

    nvars: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        expected = comb(self.nvars + self.degree - 1, self.degree)
        if c.shape != (expected,):
            raise ValueError(
                f"expected {expected} coefficients for degree {self.degree} "
                f"in {self.nvars} variables, got shape {c.shape}"
            )
        object.__setattr__(self, "coeffs", c)

    def coefficient(self, exponents) -> complex:
        return complex(self.coeffs[monomial_position(tuple(exponents))])

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {
            m: complex(c)
            for m, c in zip(monomials(self.nvars, self.degree), self.coeffs)
            if c != 0
        }

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


# ---------------------------------------------------------------------------
# subsets and multi-indices


def _check_nd(n: int, d: int) -> None:
    if not (isinstance(n, (int, np.integer)) and isinstance(d, (int, np.integer))):
        raise TypeError("n and d must be integers")
    if n < 2 or not 1 <= d <= n - 1:
        raise ValueError(f"need n >= 2 and 1 <= d <= n-1, got n={n}, d={d}")


@lru_cache(maxsize=None)
def enumerate_subsets(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """All ``d``-subsets of ``{1..n}`` in lexicographic order."""
    _check_nd(n, d)
    return tuple(itertools.combinations(range(1, n + 1), d))


@lru_cache(maxsize=None)
def _subset_positions(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {s: r for r, s in enumerate(enumerate_subsets(n, d))}


def subset_position(subset, n: int) -> int:
    """Index of ``subset`` within ``enumerate_subsets(n, len(subset))``."""
    return _subset_positions(n, len(subset))[tuple(subset)]


def complement(subset, n: int) -> tuple[int, ...]:
    """Sorted complement of ``subset`` in ``{1..n}``."""
    members = set(subset)
    if len(members) != len(subset) or not members <= set(range(1, n + 1)):
        raise ValueError(f"{subset!r} is not a subset of 1..{n}")
    return tuple(i for i in range(1, n + 1) if i not in members)


def subset_to_monomial(subset, n: int) -> tuple[int, ...]:
    """Exponents of the basis monomial attached to ``subset``.

    With ``J = (j_1 < ... < j_k)`` the complement, exponent ``l`` is the gap
    ``j_{l+1} - j_l - 1`` (with ``j_0 = 0`` and ``j_{k+1} = n + 1``), i.e. the
    number of members of ``subset`` lying between consecutive complement
    labels.
    """
    stars = (0,) + complement(subset, n) + (n + 1,)
    return tuple(b - a - 1 for a, b in zip(stars[:-1], stars[1:]))


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """Exponent tuples of total ``degree`` in descending lexicographic order."""
    if nvars < 1 or degree < 0:
        raise ValueError("need nvars >= 1 and degree >= 0")
    if nvars == 1:
        return ((degree,),)
    out = []
    for first in range(degree, -1, -1):
        out.extend((first,) + rest for rest in monomials(nvars - 1, degree - first))
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_positions(nvars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {m: r for r, m in enumerate(monomials(nvars, degree))}


def monomial_position(exponents: tuple[int, ...]) -> int:
    return _monomial_positions(len(exponents), sum(exponents))[tuple(exponents)]


# ---------------------------------------------------------------------------
# binary forms


@lru_cache(maxsize=None)
def _binomials(k: int) -> np.ndarray:
    # exact integers first, then a single conversion
    return np.array([float(comb(k, i)) for i in range(k + 1)])


def _as_binary(q) -> BinaryPoly:
    return q if isinstance(q, BinaryPoly) else BinaryPoly(q)


def pairing(q, r) -> complex:
    """Apolar pairing ``sum_i (-1)**i c_i d_{k-i} / C(k, i)``.

    Bilinear and ``(-1)**k``-symmetric.  Both arguments must have the same
    degree.
    """
    q, r = _as_binary(q), _as_binary(r)
    k = q.degree
    if r.degree != k:
        raise ValueError(f"degree mismatch: {k} vs {r.degree}")
    signs = (-1.0) ** np.arange(k + 1)
    return complex(np.sum(signs * q.coeffs * r.coeffs[::-1] / _binomials(k)))


def linear_factor(u0: complex, v0: complex) -> BinaryPoly:
    """The linear form ``u0 * v - v0 * u``."""
    return BinaryPoly([-v0, u0])


def binary_power(q, power: int) -> BinaryPoly:
    q = _as_binary(q)
    out = np.array([1.0 + 0j])
    for _ in range(power):
        out = np.convolve(out, q.coeffs)
    return BinaryPoly(out)


def horner_eval(q, u0: complex, v0: complex) -> complex:
    """Evaluate ``q(u0, v0)`` directly (homogeneous Horner scheme)."""
    q = _as_binary(q)
    acc = 0j
    vpow = 1.0 + 0j
    # after step i, acc = sum_{m<=i} c_m v0^m u0^(i-m)
    for c in q.coeffs:
        acc = acc * u0 + c * vpow
        vpow *= v0
    return complex(acc)


def reproduce_eval(q, u0: complex, v0: complex) -> complex:
    """``pairing(q, (u0 v - v0 u)**k)``, which equals ``q(u0, v0)``."""
    q = _as_binary(q)
    return pairing(q, binary_power(linear_factor(u0, v0), q.degree))


@lru_cache(maxsize=None)
def lambda_weights(k: int) -> np.ndarray:
    """Weights ``(-1)**(k-m) / C(k, m)`` used by :func:`lambda_form`."""
    m = np.arange(k + 1)
    return (-1.0) ** (k - m) / _binomials(k)


def lambda_form(q) -> np.ndarray:
    """Coefficients of the linear functional ``p -> pairing(q, p)``.

    The result ``lam`` satisfies ``lam @ p.coeffs == pairing(q, p)``; read as a
    linear form ``sum_m lam[m] * z_m`` in the dual coordinates.
    """
    q = _as_binary(q)
    return q.coeffs[::-1] * lambda_weights(q.degree)


def binary_product(factors) -> BinaryPoly:
    """Product of degree-1 binary forms by coefficient convolution."""
    factors = [_as_binary(f) for f in factors]
    if not factors:
        raise ValueError("binary_product needs at least one factor")
    out = np.array([1.0 + 0j])
    for f in factors:
        if f.degree != 1:
            raise ValueError("binary_product expects linear factors")
        out = np.convolve(out, f.coeffs)
    return BinaryPoly(out)


# ---------------------------------------------------------------------------
# products of linear forms in k+1 variables


@lru_cache(maxsize=None)
def _raise_matrix(nvars: int, degree: int) -> np.ndarray:
    """0/1 matrix sending ``(monomial r, variable l)`` to monomial ``r + e_l``.

    Rows are indexed by ``r * nvars + l`` over :func:`monomials` ``(nvars, degree)``.
    """
    pos = _monomial_positions(nvars, degree + 1)
    src = monomials(nvars, degree)
    out = np.zeros((len(src) * nvars, len(pos)))
    for r, m in enumerate(src):
        for l in range(nvars):
            bumped = list(m)
            bumped[l] += 1
            out[r * nvars + l, pos[tuple(bumped)]] = 1.0
    return out


def batch_product_linear_forms(forms: np.ndarray) -> np.ndarray:
    """Expand many products of linear forms at once.

    ``forms`` has shape ``(batch, d, nvars)``; the result has shape
    ``(batch, C(nvars + d - 1, d))`` in :func:`monomials` order.
    """
    forms = np.asarray(forms, dtype=complex)
    if forms.ndim != 3 or forms.shape[1] == 0:
        raise ValueError("forms must have shape (batch, d >= 1, nvars)")
    batch, d, nvars = forms.shape
    poly = forms[:, 0, :]
    for t in range(1, d):
        # every (term, variable) product lands on exactly one monomial
        terms = (poly[:, :, None] * forms[:, t, None, :]).reshape(batch, -1)
        poly = terms @ _raise_matrix(nvars, t)
    return poly


def product_linear_forms(forms) -> MultiPoly:
    """Expand ``prod_a (sum_m forms[a][m] z_m)``; plain product, no ``1/d!``."""
    forms = np.asarray(forms, dtype=complex)
    if forms.ndim != 2 or forms.shape[0] == 0:
        raise ValueError("need a non-empty sequence of equal-length linear forms")
    d, nvars = forms.shape
    return MultiPoly(nvars, d, batch_product_linear_forms(forms[None])[0])


def pairing_matrix(Q: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``out[a, b] = pairing(Q[a], R[b])`` for stacks of degree-k coefficient rows."""
    Q = np.asarray(Q, dtype=complex)
    R = np.asarray(R, dtype=complex)
    k = Q.shape[-1] - 1
    if R.shape[-1] != k + 1:
        raise ValueError("degree mismatch")
    w = (-1.0) ** np.arange(k + 1) / _binomials(k)
    return (Q * w) @ R[:, ::-1].T
