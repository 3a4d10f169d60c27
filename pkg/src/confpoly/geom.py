"""Point configurations, sphere directions and Hopf lifts.

Three spaces are supported: ``"euclidean"`` (points of R^3), ``"hyperbolic"``
(points of the open Poincare ball) and ``"cp1"`` (points of the Riemann
sphere, with ``inf`` allowed).  A point of S^2 is written ``(w, h)`` with
``w = x + iy`` and ``h = z``.

Point indices in this module are 0-based array positions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

SPACES = ("euclidean", "hyperbolic", "cp1")

MIN_SEPARATION = 1e-9
BOUNDARY_EPS = 1e-9
POLE_EPS = 1e-6
UNIT_TOL = 1e-9


class ConfigurationError(ValueError):
    """Malformed configuration (bad shape, unknown space, point off the ball)."""


class DegenerateConfigurationError(ValueError):
    """Two points closer than the minimum separation."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


class SpherePoint(NamedTuple):
    w: complex
    h: float


class HopfLift(NamedTuple):
    u: complex
    v: complex


@dataclass(frozen=True, eq=False)
class Configuration:
    """``n`` labelled, pairwise distinct points in one of :data:`SPACES`.

    ``points`` is an ``(n, 3)`` float array for the 3-space cases and an
    ``(n,)`` complex array for ``cp1``, where an infinite entry stands for the
    point at infinity.
    """

    space: str
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.space not in SPACES:
            raise ConfigurationError(f"unknown space {self.space!r}")
        if self.space == "cp1":
            pts = np.asarray(self.points, dtype=complex).reshape(-1)
            inf = np.isinf(pts.real) | np.isinf(pts.imag)
            if np.any(np.isnan(pts[~inf])):
                raise ConfigurationError("cp1 points must be finite numbers or inf")
            pts = np.where(inf, complex(math.inf, 0.0), pts)
        else:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 3:
                raise ConfigurationError(
                    f"{self.space} points must be an (n, 3) array, got {pts.shape}"
                )
            if not np.all(np.isfinite(pts)):
                raise ConfigurationError("point coordinates must be finite")
        if len(pts) < 2:
            raise ConfigurationError("a configuration needs at least two points")
        if self.space == "hyperbolic":
            norms = np.linalg.norm(pts, axis=1)
            bad = np.flatnonzero(norms >= 1.0 - BOUNDARY_EPS)
            if bad.size:
                raise ConfigurationError(
                    f"points/{int(bad[0])}: norm {norms[bad[0]]:.17g} is not inside the unit ball"
                )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        _check_separation(self)

    @property
    def n(self) -> int:
        return len(self.points)

    def permuted(self, perm) -> "Configuration":
        """Configuration whose point ``a`` is this configuration's ``perm[a]``."""
        return Configuration(self.space, np.asarray(self.points)[np.asarray(perm)])

    def to_document(self) -> dict:
        if self.space == "cp1":
            pts = ["inf" if np.isinf(z.real) else [float(z.real), float(z.imag)]
                   for z in self.points]
        else:
            pts = [[float(c) for c in p] for p in self.points]
        return {"space": self.space, "points": pts}

    @classmethod
    def from_document(cls, doc) -> "Configuration":
        """Parse the ``{"space": ..., "points": [...]}`` document form."""
        if not isinstance(doc, dict):
            raise ConfigurationError("configuration document must be an object")
        space = doc.get("space")
        if space not in SPACES:
            raise ConfigurationError(f"space: expected one of {SPACES}, got {space!r}")
        raw = doc.get("points")
        if not isinstance(raw, list):
            raise ConfigurationError("points: expected an array")
        if space == "cp1":
            pts = []
            for a, p in enumerate(raw):
                if isinstance(p, str) and p.lower() in ("inf", "infinity"):
                    pts.append(complex(math.inf, 0.0))
                elif (isinstance(p, list) and len(p) == 2
                      and all(_is_number(c) for c in p)):
                    pts.append(complex(p[0], p[1]))
                else:
                    raise ConfigurationError(f"points/{a}: expected [re, im] or \"inf\"")
            return cls(space, np.array(pts, dtype=complex))
        for a, p in enumerate(raw):
            if not (isinstance(p, list) and len(p) == 3 and all(_is_number(c) for c in p)):
                raise ConfigurationError(f"points/{a}: expected [x, y, z]")
        return cls(space, np.array(raw, dtype=float).reshape(-1, 3))


def _is_number(c) -> bool:
    return isinstance(c, (int, float)) and not isinstance(c, bool)


def _check_separation(cfg: Configuration) -> None:
    if cfg.space == "cp1":
        emb = np.array([_sphere_xyz(cp1_to_sphere(z)) for z in cfg.points])
    else:
        emb = cfg.points
    diff = np.linalg.norm(emb[:, None, :] - emb[None, :, :], axis=-1)
    diff[np.diag_indices(cfg.n)] = np.inf
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    if diff[i, j] < MIN_SEPARATION:
        i, j = sorted((int(i), int(j)))
        raise DegenerateConfigurationError(
            f"points {i} and {j} collide (separation {diff[i, j]:.3g})", (i, j)
        )


def _sphere_xyz(t: SpherePoint) -> np.ndarray:
    return np.array([t.w.real, t.w.imag, t.h])


# ---------------------------------------------------------------------------
# directions on S^2


def euclidean_direction(cfg: Configuration, i: int, j: int) -> SpherePoint:
    """Unit vector from point ``i`` towards point ``j``."""
    if cfg.space != "euclidean":
        raise ValueError("euclidean_direction needs a euclidean configuration")
    if i == j:
        raise ValueError("i and j must differ")
    delta = cfg.points[j] - cfg.points[i]
    r = np.linalg.norm(delta)
    if r < MIN_SEPARATION:
        raise DegenerateConfigurationError(f"points {i} and {j} collide", (i, j))
    t = delta / r
    return SpherePoint(complex(t[0], t[1]), float(t[2]))


def _hyperboloid(p: np.ndarray) -> np.ndarray:
    s = np.sum(p * p, axis=-1, keepdims=True)
    return np.concatenate([2 * p, 1 + s], axis=-1) / (1 - s)


def _ideal_endpoints(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Boundary points of the rays ``p -> q`` (broadcast over leading axes)."""
    Xp, Xq = _hyperboloid(p), _hyperboloid(q)
    sp = np.sum(p * p, axis=-1)
    sq = np.sum(q * q, axis=-1)
    # c - 1 from the distance formula; -<Xp, Xq> - 1 loses digits for close points
    cm1 = 2 * np.sum((p - q) ** 2, axis=-1) / ((1 - sp) * (1 - sq))
    if np.any(cm1 <= 0):
        raise DegenerateConfigurationError("coincident points in hyperbolic ray")
    c = 1 + cm1
    tangent = (Xq - Xp - cm1[..., None] * Xp) / np.sqrt(cm1 * (c + 1))[..., None]
    null = Xp + tangent
    with np.errstate(divide="ignore", invalid="ignore"):
        e = null[..., :3] / null[..., 3:]
        e = e / np.linalg.norm(e, axis=-1, keepdims=True)
    if not np.all(np.isfinite(e)):
        # only reachable for points pressed against the boundary
        raise DegenerateConfigurationError("ideal endpoint lost to rounding near the boundary")
    return e


def hyperbolic_ideal_endpoint(cfg: Configuration, i: int, j: int) -> SpherePoint:
    """Endpoint at infinity of the geodesic ray from point ``i`` through ``j``.

    Uses the hyperboloid model: with ``c = cosh(dist)``, the unit tangent at
    ``X_i`` towards ``X_j`` is ``(X_j - c X_i) / sqrt(c^2 - 1)`` and
    ``X_i + tangent`` is a null vector pointing at the endpoint.
    """
    if cfg.space != "hyperbolic":
        raise ValueError("hyperbolic_ideal_endpoint needs a hyperbolic configuration")
    if i == j:
        raise ValueError("i and j must differ")
    e = _ideal_endpoints(cfg.points[i], cfg.points[j])
    return SpherePoint(complex(e[0], e[1]), float(e[2]))


def cp1_to_sphere(z) -> SpherePoint:
    """Inverse stereographic projection from the north pole; ``inf`` is the north pole."""
    z = complex(z)
    if cmath.isinf(z):
        return SpherePoint(0j, 1.0)
    r2 = abs(z) ** 2
    return SpherePoint(2 * z / (r2 + 1), (r2 - 1) / (r2 + 1))


def sphere_to_cp1(t: SpherePoint) -> complex:
    if 1 - t.h < 1e-15:
        return complex(math.inf, 0.0)
    return complex(t.w / (1 - t.h))


# ---------------------------------------------------------------------------
# Hopf map and lifts


def hopf_map(lift: HopfLift) -> SpherePoint:
    """``(u, v) -> (2 conj(u) v, |v|^2 - |u|^2)`` on the unit 3-sphere."""
    u, v = complex(lift[0]), complex(lift[1])
    norm2 = abs(u) ** 2 + abs(v) ** 2
    if abs(norm2 - 1) > UNIT_TOL:
        raise ValueError(f"Hopf map needs a unit vector, got |(u,v)|^2 = {norm2}")
    return SpherePoint(2 * u.conjugate() * v, abs(v) ** 2 - abs(u) ** 2)


def _lift_arrays(w, h):
    w = np.asarray(w, dtype=complex)
    h = np.asarray(h, dtype=float)
    ww = np.abs(w) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        # 1 -+ h = |w|^2 / (1 +- h) on the sphere, without the cancellation
        om = np.where(h > 0, ww / (1 + h), 1 - h)
        op = np.where(h < 0, ww / (1 - h), 1 + h)
    south = om > POLE_EPS
    u_s = np.sqrt(np.clip(om / 2, 0, None))
    v_n = np.sqrt(np.clip(op / 2, 0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(south, u_s + 0j, np.conj(w) / (2 * v_n))
        v = np.where(south, w / (2 * u_s), v_n + 0j)
    return u, v


def hopf_lift(t: SpherePoint) -> HopfLift:
    """Canonical unit lift: ``u`` real and positive except near the north pole,
    where ``v`` is taken real and positive instead."""
    u, v = _lift_arrays(t[0], t[1])
    return HopfLift(complex(u), complex(v))


def symplectic(a: HopfLift, b: HopfLift) -> complex:
    """``u_a v_b - v_a u_b``."""
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True, eq=False)
class HopfLiftTable:
    """Hopf lifts for every ordered pair, or for every point (``cp1``).

    For pairwise tables ``u[i, j], v[i, j]`` is the lift attached to
    ``(i, j)`` and every unordered pair satisfies
    ``u[i, j] v[j, i] - v[i, j] u[j, i] = 1`` for ``i < j``.  For per-point
    tables ``u, v`` are 1-d.
    """

    n: int
    u: np.ndarray
    v: np.ndarray

    @property
    def per_point(self) -> bool:
        return self.u.ndim == 1

    def __getitem__(self, key) -> HopfLift:
        return HopfLift(complex(self.u[key]), complex(self.v[key]))

    @property
    def lifts(self) -> dict:
        if self.per_point:
            return {i: self[i] for i in range(self.n)}
        return {(i, j): self[i, j] for i in range(self.n) for j in range(self.n) if i != j}

    def symplectic_residual(self) -> float:
        """Largest ``|u_ij v_ji - v_ij u_ji - 1|`` over ``i < j`` (0 for per-point)."""
        if self.per_point:
            return 0.0
        iu = np.triu_indices(self.n, 1)
        s = self.u[iu] * self.v.T[iu] - self.v[iu] * self.u.T[iu]
        return float(np.max(np.abs(s - 1), initial=0.0))


def _pair_directions(cfg: Configuration, ii, jj) -> tuple[np.ndarray, np.ndarray]:
    """``(w, h)`` of ``t_ij`` for the index arrays ``ii``, ``jj``."""
    p = cfg.points
    if cfg.space == "euclidean":
        delta = p[jj] - p[ii]
        t = delta / np.sqrt(np.einsum("ij,ij->i", delta, delta))[:, None]
    elif cfg.space == "hyperbolic":
        t = _ideal_endpoints(p[ii], p[jj])
    else:
        raise ValueError("directions are defined for euclidean and hyperbolic spaces")
    return t[:, 0] + 1j * t[:, 1], t[:, 2]


def direction_table(cfg: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """``(w, h)`` arrays of shape ``(n, n)`` with ``t_ij`` off the diagonal.

    The diagonal holds the south pole as a placeholder.
    """
    n = cfg.n
    ii, jj = np.nonzero(~np.eye(n, dtype=bool))
    w = np.zeros((n, n), dtype=complex)
    h = np.full((n, n), -1.0)
    w[ii, jj], h[ii, jj] = _pair_directions(cfg, ii, jj)
    return w, h


def cp1_lifts(cfg: Configuration) -> tuple[np.ndarray, np.ndarray]:
    """Per-point unit lifts ``(1, z) / sqrt(1 + |z|^2)``; ``inf`` lifts to ``(0, 1)``.

    Same point of S^3 as ``hopf_lift(cp1_to_sphere(z))`` up to a phase, but
    computed from ``z`` directly: going through ``h`` loses digits to
    cancellation in ``1 - h`` when ``|z|`` is large.
    """
    z = np.asarray(cfg.points, dtype=complex)
    inf = np.isinf(z.real)
    zf = np.where(inf, 0, z)
    r = np.hypot(1.0, np.abs(zf))
    u = np.where(inf, 0, 1 / r).astype(complex)
    v = np.where(inf, 1, zf / r).astype(complex)
    return u, v


def build_lift_table(cfg: Configuration) -> HopfLiftTable:
    """Gauge-fixed Hopf lifts of all ``t_ij``.

    For ``i < j`` the lift of ``t_ij`` is the canonical one.  In Euclidean
    space ``t_ji = -t_ij`` and the partner is ``(-conj(v_ij), conj(u_ij))``.
    In hyperbolic space ``t_ji`` is the other end of the geodesic, so the
    canonical lift of ``t_ji`` is rescaled to make the pair symplectic.
    ``cp1`` configurations get a per-point table.
    """
    if cfg.space == "cp1":
        u, v = cp1_lifts(cfg)
        return HopfLiftTable(cfg.n, u, v)
    n = cfg.n
    ii, jj = np.triu_indices(n, 1)
    m = len(ii)
    if cfg.space == "euclidean":
        u_up, v_up = _lift_arrays(*_pair_directions(cfg, ii, jj))
        u_lo, v_lo = -np.conj(v_up), np.conj(u_up)
    else:
        # both ends of every geodesic in one pass
        w, h = _pair_directions(cfg, np.concatenate([ii, jj]), np.concatenate([jj, ii]))
        u2, v2 = _lift_arrays(w, h)
        u_up, v_up, u_lo, v_lo = u2[:m], v2[:m], u2[m:], v2[m:]
        s = u_up * v_lo - v_up * u_lo
        u_lo, v_lo = u_lo / s, v_lo / s
    u = np.zeros((n, n), dtype=complex)
    v = np.zeros((n, n), dtype=complex)
    u[ii, jj], v[ii, jj] = u_up, v_up
    u[jj, ii], v[jj, ii] = u_lo, v_lo
    return HopfLiftTable(n, u, v)


def gauge_perturb(table: HopfLiftTable, seed) -> HopfLiftTable:
    """Random symplectic regauge of ``table``.

    Pairwise tables: ``lift(i,j) *= lam``, ``lift(j,i) /= lam`` per pair
    ``i < j``.  Per-point tables: each lift is scaled independently.  ``lam``
    has log-magnitude uniform on ``[-1, 1]`` and uniform phase.
    """
    rng = np.random.default_rng(seed)
    n = table.n
    if table.per_point:
        lam = np.exp(rng.uniform(-1, 1, n) + 1j * rng.uniform(0, 2 * np.pi, n))
        return HopfLiftTable(n, table.u * lam, table.v * lam)
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    lam = np.exp(rng.uniform(-1, 1, m) + 1j * rng.uniform(0, 2 * np.pi, m))
    scale = np.ones((n, n), dtype=complex)
    scale[iu] = lam
    scale.T[iu] = 1 / lam
    return HopfLiftTable(n, table.u * scale, table.v * scale)


# ---------------------------------------------------------------------------
# isometries used by the invariance checks


def ball_translate(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Mobius isometry of the Poincare ball taking ``a`` to the origin.

    Acts on points of the closed ball (boundary to boundary); its inverse is
    ``ball_translate(., -a)``.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    aa = a @ a
    xa = x @ a
    xx = np.sum(x * x, axis=-1)
    diff = x - a
    dd = np.sum(diff * diff, axis=-1)
    num = (1 - aa) * diff - dd[..., None] * a
    den = 1 - 2 * xa + xx * aa
    return num / den[..., None]


def random_rotation(rng) -> np.ndarray:
    """Haar-random proper rotation of R^3."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
