"""Observer- and star-based polynomial families and the normalized determinant.

For a configuration of ``n`` points and ``1 <= d <= n - 1`` (``k = n - d``):

* observer mode: columns are indexed by ``d``-subsets ``I``; each observer
  ``i`` in ``I`` contributes the binary form ``prod_{j not in I} L_ij`` and
  ``p_I`` is the product of the ``d`` functionals ``Lambda`` of these forms;
* star mode: columns are indexed by ``k``-subsets ``I``; each star ``j`` not in
  ``I`` contributes ``prod_{i in I} L_ij``.

Here ``L_ij(u, v) = u_ij v - v_ij u`` is built from the Hopf lift of ``t_ij``.
On the Riemann sphere the pairwise lift is replaced by the lift of the point
itself, which gives the two ``cp1`` constructions.

The raw determinant of the coefficient matrix depends on the conventions used
for the symmetric product and the monomial basis only through a constant
factor.  :func:`normalized_determinant` divides that factor out by fixing
``D = 1`` on collinear configurations, which for ``d = 1`` reproduces the
classical Atiyah-Sutcliffe normalization.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from . import halgebra as ha
from .geom import (
    Configuration,
    HopfLiftTable,
    build_lift_table,
    gauge_perturb,
)

MODES = ("observer", "star")


@dataclass(frozen=True, eq=False)
class PolyFamily:
    """The ``C(n, d)`` polynomials ``p_I`` of one construction.

    ``coeffs[c]`` holds the coefficients of ``p_{subsets[c]}`` in
    :func:`confpoly.halgebra.monomials` order (degree ``d`` in ``k + 1``
    variables).
    """

    n: int
    d: int
    mode: str
    space: str
    subsets: tuple
    coeffs: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.n - self.d

    @property
    def members(self) -> dict:
        return {
            s: ha.MultiPoly(self.k + 1, self.d, c)
            for s, c in zip(self.subsets, self.coeffs)
        }


@dataclass
class DeterminantReport:
    value: complex
    abs: float
    n: int
    d: int
    mode: str
    space: str
    log_abs: float
    phase: complex
    gauge_spread: float | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["value"] = [self.value.real, self.value.imag]
        out["phase"] = [self.phase.real, self.phase.imag]
        return out


def _check_mode(mode: str) -> str:
    mode = mode.replace("cp1_", "")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@lru_cache(maxsize=None)
def _index_arrays(n: int, size: int):
    subsets = ha.enumerate_subsets(n, size)
    chosen = np.array(subsets, dtype=np.intp) - 1
    rest = np.array([ha.complement(s, n) for s in subsets], dtype=np.intp) - 1
    return subsets, chosen, rest


def _family_kernel(U, V, owners, others, owner_first: bool, k: int) -> np.ndarray:
    """Expand ``prod_owner Lambda(prod_other L)`` for every column at once.

    ``owners`` is ``(C, d)`` and ``others`` is ``(C, k)``; the pair used for
    ``L`` is ``(owner, other)`` when ``owner_first`` else ``(other, owner)``.
    """
    C, d = owners.shape
    q = np.ones((C, d, 1), dtype=complex)
    for b in range(k):
        x = others[:, b][:, None]
        if owner_first:
            lu, lv = U[owners, x], V[owners, x]
        else:
            lu, lv = U[x, owners], V[x, owners]
        nxt = np.zeros((C, d, b + 2), dtype=complex)
        nxt[..., :-1] = q * (-lv)[..., None]
        nxt[..., 1:] += q * lu[..., None]
        q = nxt
    lam = q[..., ::-1] * ha.lambda_weights(k)
    return ha.batch_product_linear_forms(lam)


def _pair_arrays(table: HopfLiftTable):
    if table.per_point:
        # L_ij -> L_j: every row sees the lift of the second index
        n = table.n
        return (np.broadcast_to(table.u, (n, n)), np.broadcast_to(table.v, (n, n)))
    return table.u, table.v


def _build(cfg, d, table, mode, space_ok):
    if cfg.space not in space_ok:
        raise ValueError(f"construction not defined for space {cfg.space!r}")
    n = cfg.n
    ha.enumerate_subsets(n, d)  # validates d
    if table is None:
        table = build_lift_table(cfg)
    if table.n != n or table.per_point != (cfg.space == "cp1"):
        raise ValueError("lift table does not match the configuration")
    U, V = _pair_arrays(table)
    k = n - d
    if mode == "observer":
        subsets, chosen, rest = _index_arrays(n, d)
        coeffs = _family_kernel(U, V, chosen, rest, True, k)
    else:
        subsets, chosen, rest = _index_arrays(n, k)
        coeffs = _family_kernel(U, V, rest, chosen, False, k)
    return PolyFamily(n, d, mode, cfg.space, subsets, coeffs)


def observer_family(cfg: Configuration, d: int, table: HopfLiftTable | None = None) -> PolyFamily:
    """``p_I = prod_{i in I} Lambda(prod_{j not in I} L_ij)`` over ``d``-subsets ``I``."""
    return _build(cfg, d, table, "observer", ("euclidean", "hyperbolic"))


def star_family(cfg: Configuration, d: int, table: HopfLiftTable | None = None) -> PolyFamily:
    """``p_I = prod_{j not in I} Lambda(prod_{i in I} L_ij)`` over ``k``-subsets ``I``."""
    return _build(cfg, d, table, "star", ("euclidean", "hyperbolic"))


def cp1_observer_family(cfg: Configuration, d: int, table: HopfLiftTable | None = None) -> PolyFamily:
    """``p_I = Lambda(q_I)**d`` with ``q_I = prod_{j not in I} L_j``."""
    return _build(cfg, d, table, "observer", ("cp1",))


def cp1_star_family(cfg: Configuration, d: int, table: HopfLiftTable | None = None) -> PolyFamily:
    """``p_I = prod_{j not in I} Lambda(L_j**k)`` over ``k``-subsets ``I``."""
    return _build(cfg, d, table, "star", ("cp1",))


def family(cfg: Configuration, d: int, mode: str = "observer",
           table: HopfLiftTable | None = None) -> PolyFamily:
    mode = _check_mode(mode)
    if cfg.space == "cp1":
        build = cp1_observer_family if mode == "observer" else cp1_star_family
    else:
        build = observer_family if mode == "observer" else star_family
    return build(cfg, d, table)


@lru_cache(maxsize=None)
def _row_order(n: int, d: int) -> np.ndarray:
    # position of the basis monomial of each d-subset; this turns out to be
    # the identity for the descending-lex monomial order, but it is not assumed
    return np.array(
        [ha.monomial_position(ha.subset_to_monomial(s, n)) for s in ha.enumerate_subsets(n, d)],
        dtype=np.intp,
    )


def assemble_matrix(fam: PolyFamily) -> np.ndarray:
    """Square matrix with column ``I`` = coefficients of ``p_I`` in the subset basis.

    Row ``I'`` holds the coefficient of the monomial attached to the
    ``d``-subset ``I'``; rows and columns both follow lexicographic subset order.
    """
    return fam.coeffs[:, _row_order(fam.n, fam.d)].T


def log_determinant(M: np.ndarray) -> tuple[complex, float]:
    """``(phase, log|det M|)`` from an LU factorization with partial pivoting."""
    phase, logabs = np.linalg.slogdet(M)
    return complex(phase), float(logabs)


@lru_cache(maxsize=None)
def collinear_reference(n: int, d: int, mode: str) -> tuple[complex, float]:
    """``(phase, log|det|)`` of the raw matrix for points on a common line."""
    mode = _check_mode(mode)
    cfg = Configuration("euclidean", np.column_stack([np.zeros(n), np.zeros(n), np.arange(n)]))
    return log_determinant(assemble_matrix(family(cfg, d, mode)))


def _cp1_gauge_log(table: HopfLiftTable, n: int, d: int, mode: str) -> tuple[complex, float]:
    """``prod_{a<b} (u_b v_a - v_b u_a)**e`` as (phase, log-magnitude).

    This is the column scaling picked up when the pairwise lifts of a
    hyperbolic configuration degenerate to per-point lifts on the boundary.
    """
    e = comb(n - 2, (d if mode == "observer" else n - d) - 1)
    ia, ib = np.triu_indices(n, 1)
    s = table.u[ib] * table.v[ia] - table.v[ib] * table.u[ia]
    phase = complex(np.prod((s / np.abs(s)) ** e))
    return phase, float(e * np.sum(np.log(np.abs(s))))


def _normalized(cfg, d, mode, table) -> tuple[complex, float]:
    if table is None:
        table = build_lift_table(cfg)
    phase, logabs = log_determinant(assemble_matrix(family(cfg, d, mode, table)))
    ref_phase, ref_log = collinear_reference(cfg.n, d, mode)
    phase, logabs = phase / ref_phase, logabs - ref_log
    if cfg.space == "cp1":
        g_phase, g_log = _cp1_gauge_log(table, cfg.n, d, mode)
        phase, logabs = phase / g_phase, logabs - g_log
    return phase, logabs


def _compose(phase: complex, logabs: float) -> complex:
    if logabs == -math.inf:
        return 0j
    if logabs > 709.0:
        # past double range; log_abs stays exact, the value saturates
        return complex(math.copysign(math.inf, phase.real) if phase.real else 0.0,
                       math.copysign(math.inf, phase.imag) if phase.imag else 0.0)
    return phase * math.exp(logabs)


def determinant(cfg: Configuration, d: int, mode: str = "observer",
                table: HopfLiftTable | None = None) -> complex:
    """Normalized determinant ``D`` as a complex number (0 when singular)."""
    return _compose(*_normalized(cfg, d, _check_mode(mode), table))


def normalized_determinant(cfg: Configuration, d: int, mode: str = "observer",
                           seed: int = 0, gauge_draws: int = 0) -> DeterminantReport:
    """Evaluate ``D`` and, if ``gauge_draws > 0``, its spread over random gauges.

    ``gauge_spread`` is ``max |D_gauge / D - 1|`` over the draws; gauge seeds
    are ``(seed, draw)``.  A singular matrix is reported as ``value = 0``.
    """
    mode = _check_mode(mode)
    start = time.perf_counter()
    table = build_lift_table(cfg)
    phase, logabs = _normalized(cfg, d, mode, table)
    value = _compose(phase, logabs)
    spread = None
    if gauge_draws:
        spread = 0.0
        for draw in range(gauge_draws):
            g_phase, g_log = _normalized(cfg, d, mode, gauge_perturb(table, (seed, draw)))
            spread = max(spread, abs(g_phase * math.exp(g_log - logabs) - phase))
    return DeterminantReport(
        value=complex(value),
        abs=abs(value),
        n=cfg.n,
        d=d,
        mode=mode,
        space=cfg.space,
        log_abs=logabs,
        phase=phase,
        gauge_spread=spread,
        wall_time=time.perf_counter() - start,
    )


def cp1_pairing_matrix(cfg: Configuration, d: int, mode: str = "observer",
                       table: HopfLiftTable | None = None) -> np.ndarray:
    """Pairings ``P[I, I'] = p_I(g_{I'})`` of the ``cp1`` family with its dual points.

    Observer mode: ``g_{I'}`` is the symmetric product of ``L_i**k`` over
    ``i in I'``, so ``P[I, I'] = prod_{i in I'} pairing(q_I, L_i**k)``.
    Star mode: ``g_{I'} = h_{I'}**d`` with ``h_{I'} = prod_{i in I'} L_i``, so
    ``P[I, I'] = prod_{j not in I} pairing(L_j**k, h_{I'})``.  The dual points
    are never expanded as tensors.
    """
    if cfg.space != "cp1":
        raise ValueError("cp1_pairing_matrix needs a cp1 configuration")
    mode = _check_mode(mode)
    if table is None:
        table = build_lift_table(cfg)
    n = cfg.n
    k = n - d
    lin = np.stack([-table.v, table.u], axis=1)  # L_i coefficient rows
    powers = np.array([ha.binary_power(row, k).coeffs for row in lin])
    size = d if mode == "observer" else k
    subsets, chosen, rest = _index_arrays(n, size)
    # h_S = prod_{i in S} L_i for the k-element sets S attached to the columns
    if mode == "observer":
        forms = [ha.binary_product([lin[j] for j in row]).coeffs for row in rest]
        G = ha.pairing_matrix(np.array(forms), powers)  # G[I, i] = (q_I, L_i^k)
        return np.prod(G[:, chosen], axis=-1)
    forms = [ha.binary_product([lin[i] for i in row]).coeffs for row in chosen]
    G = ha.pairing_matrix(powers, np.array(forms))  # G[j, I'] = (L_j^k, h_I')
    return np.prod(G[rest, :], axis=1)
