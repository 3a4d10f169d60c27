"""Oracles, invariance campaigns and conjecture probes.

Every campaign is a deterministic function of its seed: trial ``t`` draws from
``numpy.random.default_rng([seed, t])`` so trials can run in any order or in
separate worker processes.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import maps
from .geom import (
    Configuration,
    ConfigurationError,
    DegenerateConfigurationError,
    ball_translate,
    build_lift_table,
    cp1_to_sphere,
    direction_table,
    gauge_perturb,
    random_rotation,
)

SCHEMA_VERSION = 1
COUNTEREXAMPLE_MARGIN = 1e-6
MAX_RESAMPLES = 100


@dataclass
class CampaignSpec:
    n: int
    d: int
    mode: str = "observer"
    space: str = "euclidean"
    trials: int = 100
    seed: int = 0
    gauge_tol: float = 1e-9
    perm_tol: float = 1e-9
    iso_tol: float = 1e-9
    gauge_draws: int = 10
    perm_draws: int = 20
    iso_draws: int = 10
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if min(self.gauge_tol, self.perm_tol, self.iso_tol) <= 0:
            raise ValueError("tolerances must be positive")
        self.mode = maps._check_mode(self.mode)


@dataclass
class CampaignReport:
    kind: str
    spec: dict
    abs_values: list = field(default_factory=list)
    min_abs: float = math.inf
    min_config: dict | None = None
    pass_counts: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    candidates: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return self.spec["trials"]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        out.update(asdict(self))
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


# ---------------------------------------------------------------------------
# sampling


def random_configuration(rng, n: int, space: str, include_infinity: bool = False) -> Configuration:
    """Random configuration; degenerate draws are redrawn.

    Euclidean points are standard normal; hyperbolic points are standard
    normal vectors pulled into the ball radially by ``tanh(r / 2)``; ``cp1``
    points are uniform on the sphere, stereographically projected.
    """
    for _ in range(MAX_RESAMPLES):
        try:
            if space == "euclidean":
                return Configuration(space, rng.normal(size=(n, 3)))
            if space == "hyperbolic":
                g = rng.normal(size=(n, 3))
                r = np.linalg.norm(g, axis=1, keepdims=True)
                return Configuration(space, g / r * np.tanh(r / 2))
            if space == "cp1":
                s = rng.normal(size=(n, 3))
                s /= np.linalg.norm(s, axis=1, keepdims=True)
                z = (s[:, 0] + 1j * s[:, 1]) / (1 - s[:, 2])
                if include_infinity:
                    z[rng.integers(n)] = complex(math.inf, 0.0)
                return Configuration(space, z)
        except DegenerateConfigurationError:
            continue
        raise ValueError(f"unknown space {space!r}")
    raise RuntimeError("could not sample a non-degenerate configuration")


def random_isometry(cfg: Configuration, rng, translate: bool = True) -> Configuration:
    """Apply a random symmetry of the ambient geometry.

    Euclidean: rotation, translation and positive scaling.  Hyperbolic:
    rotation followed, if ``translate``, by a Mobius translation of the ball.
    Translations push points towards the boundary, where ``M`` can be badly
    conditioned, so campaigns use rotations only.  ``cp1``: a random
    rotation of the Riemann sphere, acting as an SU(2) Mobius map.  General
    Mobius maps also preserve ``D`` but can crowd points together, and the
    coefficient matrix then loses digits to conditioning.
    """
    if cfg.space == "euclidean":
        R = random_rotation(rng)
        scale = math.exp(rng.uniform(-2, 2))
        return Configuration(cfg.space, scale * cfg.points @ R.T + rng.normal(size=3))
    if cfg.space == "hyperbolic":
        R = random_rotation(rng)
        if not translate:
            return Configuration(cfg.space, cfg.points @ R.T)
        a = rng.normal(size=3)
        a *= rng.uniform(0, 0.6) / np.linalg.norm(a)
        return Configuration(cfg.space, ball_translate(cfg.points @ R.T, a))
    (a, b), (c, d) = _su2(rng)
    out = []
    for z in cfg.points:
        if np.isinf(z.real):
            w = a / c if c != 0 else complex(math.inf, 0.0)
        else:
            den = c * z + d
            w = complex(math.inf, 0.0) if den == 0 else (a * z + b) / den
        out.append(w)
    return Configuration(cfg.space, np.array(out))


def _su2(rng) -> np.ndarray:
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    al, be = complex(q[0], q[1]), complex(q[2], q[3])
    return np.array([[al, -be.conjugate()], [be, al.conjugate()]])


def _trial_rng(seed, t: int):
    return np.random.default_rng([int(seed), t])


def _rel(a: complex, b: complex) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(b) if b != 0 else math.inf


# ---------------------------------------------------------------------------
# classical d = 1 oracle


def _leibniz_det(A) -> complex:
    n = len(A)
    total = 0j
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = complex(-1 if inversions % 2 else 1)
        for row, col in enumerate(perm):
            term *= A[row][col]
        total += term
    return total


def classical_as_determinant(cfg: Configuration) -> complex:
    """Classical single-observer determinant computed without the pairing code.

    Column ``i`` holds the plain coefficients of ``prod_{j != i} (u_ij v - v_ij u)``,
    expanded term by term over subsets of the roots; with symplectic lifts
    this determinant needs no further normalization.  Small matrices use the
    Leibniz formula.
    """
    if cfg.space not in ("euclidean", "hyperbolic"):
        raise ValueError("classical determinant needs a euclidean or hyperbolic configuration")
    table = build_lift_table(cfg)
    n = cfg.n
    A = [[0j] * n for _ in range(n)]
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for m in range(n):
            # coefficient of u^(n-1-m) v^m: pick v from m factors, -u from the rest
            acc = 0j
            for chosen in itertools.combinations(others, m):
                term = 1 + 0j
                for j in others:
                    term *= table.u[i, j] if j in chosen else -table.v[i, j]
                acc += term
            A[m][i] = acc
    if n <= 7:
        return _leibniz_det(A)
    return complex(np.linalg.det(np.array(A)))


# ---------------------------------------------------------------------------
# invariance campaign


def _invariance_trial(spec: CampaignSpec, t: int) -> dict:
    rng = _trial_rng(spec.seed, t)
    cfg = random_configuration(rng, spec.n, spec.space, include_infinity=(t % 2 == 1))
    table = build_lift_table(cfg)
    D = maps.determinant(cfg, spec.d, spec.mode, table)
    checks = {}
    if cfg.space == "cp1":
        # proven on the Riemann sphere, so a zero is a bug rather than a finding
        checks["nonsingular"] = (0.0 if D != 0 else math.inf, 0.0)
    if spec.gauge_draws:
        gauge = max(_rel(maps.determinant(cfg, spec.d, spec.mode,
                                          gauge_perturb(table, (spec.seed, t, g))), D)
                    for g in range(spec.gauge_draws))
        checks["gauge"] = (gauge, spec.gauge_tol)
    if spec.perm_draws:
        perm = 0.0
        for _ in range(spec.perm_draws):
            sigma = rng.permutation(spec.n)
            perm = max(perm, _rel(maps.determinant(cfg.permuted(sigma), spec.d, spec.mode), D))
        checks["permutation"] = (perm, spec.perm_tol)
    if spec.iso_draws:
        iso = 0.0
        for _ in range(spec.iso_draws):
            moved = random_isometry(cfg, rng, translate=False)
            iso = max(iso, _rel(maps.determinant(moved, spec.d, spec.mode), D))
        checks["isometry"] = (iso, spec.iso_tol)
    return {"trial": t, "config": cfg.to_document(), "D": D, "checks": checks}


def _run(fn, spec, trials):
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(fn, [spec] * len(trials), trials))
    else:
        rows = [fn(spec, t) for t in trials]
    return sorted(rows, key=lambda r: r["trial"])


def _collect(kind: str, spec: CampaignSpec, rows) -> CampaignReport:
    echo = asdict(spec)
    del echo["workers"]  # execution detail, kept out so reports compare across machines
    report = CampaignReport(kind=kind, spec=echo)
    names = sorted({name for r in rows for name in r["checks"]})
    report.pass_counts = {name: 0 for name in names}
    for r in rows:
        a = abs(r["D"])
        report.abs_values.append(a)
        if a < report.min_abs:
            report.min_abs, report.min_config = a, r["config"]
        for name in names:
            measured, tol = r["checks"].get(name, (0.0, 1.0))
            if measured <= tol:
                report.pass_counts[name] += 1
            else:
                report.violations.append({
                    "trial": r["trial"], "invariant": name, "configuration": r["config"],
                    "measured": measured, "tolerance": tol,
                })
    return report


def run_invariance_campaign(spec: CampaignSpec) -> CampaignReport:
    """Check gauge, permutation and isometry invariance of ``D`` on random samples."""
    return _collect("invariance", spec, _run(_invariance_trial, spec, range(spec.trials)))


# ---------------------------------------------------------------------------
# conjecture scan


def _scan_trial(spec: CampaignSpec, t: int) -> dict:
    rng = _trial_rng(spec.seed, t)
    cfg = random_configuration(rng, spec.n, spec.space)
    return {"trial": t, "config": cfg.to_document(),
            "D": maps.determinant(cfg, spec.d, spec.mode), "checks": {}}


def run_conjecture_scan(spec: CampaignSpec, margin: float = COUNTEREXAMPLE_MARGIN) -> CampaignReport:
    """Sample ``|D|`` and flag configurations with ``|D| < 1 - margin``.

    Flagged configurations are findings recorded in ``candidates``; they are
    not violations, since the lower bound is conjectural.
    """
    if spec.space not in ("euclidean", "hyperbolic"):
        raise ValueError("conjecture scans run on euclidean or hyperbolic configurations")
    rows = _run(_scan_trial, spec, range(spec.trials))
    report = _collect("scan", spec, rows)
    for r in rows:
        a = abs(r["D"])
        if a < 1 - margin:
            report.candidates.append({
                "trial": r["trial"], "abs_D": a, "D": [r["D"].real, r["D"].imag],
                "configuration": r["config"],
                "claim": "linear independence" if a == 0 else "|D| >= 1",
            })
    return report


def candidate_digest(candidate: dict) -> str:
    blob = json.dumps(candidate["configuration"], sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# minimization


@dataclass
class MinimizeResult:
    best_config: Configuration
    best_abs: float
    iterations: int
    converged: bool
    trace: list

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "best_config": self.best_config.to_document(),
            "best_absD": self.best_abs,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": self.trace,
        }


_BARRIER = 1e6


def _params_to_config(x: np.ndarray, n: int, space: str) -> Configuration:
    pts = x.reshape(n, 3)
    if space == "hyperbolic":
        r = np.linalg.norm(pts, axis=1, keepdims=True)
        safe = np.where(r > 0, r, 1.0)
        pts = np.where(r > 0, pts / safe * np.tanh(r), 0.0)
    return Configuration(space, pts)


def minimize_absD(n: int, d: int, mode: str = "observer", space: str = "euclidean",
                  seed: int = 0, budget: int = 10, maxfev: int | None = None) -> MinimizeResult:
    """Nelder-Mead on the ``3n`` point coordinates, restarted ``budget`` times.

    Hyperbolic points are parametrized as ``y / |y| * tanh(|y|)`` so the
    search is unconstrained.  Configurations closer than the minimum
    separation score a large constant.  ``trace`` holds
    ``(restart, best |D| so far)`` and is non-increasing.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if space not in ("euclidean", "hyperbolic"):
        raise ValueError("minimize_absD runs on euclidean or hyperbolic configurations")
    mode = maps._check_mode(mode)
    maxfev = maxfev or 200 * 3 * n

    def objective(x):
        try:
            val = abs(maps.determinant(_params_to_config(x, n, space), d, mode))
        except (DegenerateConfigurationError, ConfigurationError):
            return _BARRIER
        return val if math.isfinite(val) else _BARRIER

    best_x, best_f, best_ok = None, math.inf, False
    iterations = 0
    trace = []
    for restart in range(budget):
        rng = _trial_rng(seed, restart)
        x0 = rng.normal(size=3 * n)
        while objective(x0) >= _BARRIER:
            x0 = rng.normal(size=3 * n)
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": maxfev, "xatol": 1e-10, "fatol": 1e-13})
        iterations += int(res.nit)
        if res.fun < best_f:
            best_x, best_f, best_ok = res.x, float(res.fun), bool(res.success)
        trace.append((restart, best_f))
    best = _params_to_config(best_x, n, space)
    # report the value of a fresh evaluation, not the optimizer's cached one
    best_abs = abs(maps.normalized_determinant(best, d, mode).value)
    return MinimizeResult(best, best_abs, iterations, best_ok, trace)


# ---------------------------------------------------------------------------
# Riemann sphere checks


def _cp1_trial(spec: CampaignSpec, t: int) -> dict:
    rng = _trial_rng(spec.seed, t)
    cfg = random_configuration(rng, spec.n, "cp1", include_infinity=(t % 2 == 1))
    table = build_lift_table(cfg)
    P = maps.cp1_pairing_matrix(cfg, spec.d, spec.mode, table)
    rowmax = np.max(np.abs(P), axis=1)
    off = np.abs(P - np.diag(np.diag(P)))
    off_ratio = float(np.max(off / rowmax[:, None]))
    diag_ratio = float(np.min(np.abs(np.diag(P)) / rowmax))
    M = maps.assemble_matrix(maps.family(cfg, spec.d, spec.mode, table))
    rank = int(np.linalg.matrix_rank(M))
    D = maps.determinant(cfg, spec.d, spec.mode, table)
    checks = {
        "delta_offdiag": (off_ratio, 1e-10),
        # stored as a reciprocal so every check reads "measured <= tolerance"
        "delta_diag": (1 / diag_ratio if diag_ratio > 0 else math.inf, 1e8),
        "nonsingular": (float(M.shape[0] - rank), 0.0),
    }
    return {"trial": t, "config": cfg.to_document(), "D": D, "checks": checks}


def cp1_delta_check(n: int, d: int, mode: str = "observer", trials: int = 100,
                    seed: int = 0, workers: int = 1) -> CampaignReport:
    """Check the dual-point pairing pattern and full rank on random ``cp1`` samples.

    Odd-numbered trials put one point at infinity.  Passing requires
    off-diagonal pairings at most ``1e-10`` of the row maximum, diagonal
    pairings at least ``1e-8`` of it, and a full-rank coefficient matrix.
    """
    spec = CampaignSpec(n=n, d=d, mode=mode, space="cp1", trials=trials, seed=seed, workers=workers)
    return _collect("cp1", spec, _run(_cp1_trial, spec, range(trials)))


# ---------------------------------------------------------------------------
# hyperbolic to euclidean limit


def euclidean_limit_errors(points: np.ndarray, d: int, mode: str = "observer",
                           eps=(1e-2, 1e-3, 1e-4)) -> tuple[np.ndarray, np.ndarray]:
    """Errors of the shrunken hyperbolic configuration against the Euclidean one.

    Returns ``(direction_errors, determinant_errors)``, one entry per ``eps``:
    the largest ``|t_hyp(eps x) - t_euc(x)|`` over ordered pairs, and
    ``|D_hyp(eps x) - D_euc(x)|``.
    """
    euc = Configuration("euclidean", points)
    w_e, h_e = direction_table(euc)
    D_e = maps.determinant(euc, d, mode)
    t_err, d_err = [], []
    for e in eps:
        hyp = Configuration("hyperbolic", e * np.asarray(points))
        w_h, h_h = direction_table(hyp)
        t_err.append(float(np.max(np.sqrt(np.abs(w_h - w_e) ** 2 + (h_h - h_e) ** 2))))
        d_err.append(abs(maps.determinant(hyp, d, mode) - D_e))
    return np.array(t_err), np.array(d_err)


def observed_orders(errors, eps=(1e-2, 1e-3, 1e-4)) -> np.ndarray:
    """Successive convergence orders ``log(e_a / e_b) / log(eps_a / eps_b)``."""
    errors = np.asarray(errors, dtype=float)
    eps = np.asarray(eps, dtype=float)
    return np.log(errors[:-1] / errors[1:]) / np.log(eps[:-1] / eps[1:])


def boundary_points(cfg: Configuration, radius: float) -> Configuration:
    """Hyperbolic configuration at ``radius`` along the boundary points of a ``cp1`` one."""
    pts = [cp1_to_sphere(z) for z in cfg.points]
    xyz = np.array([[t.w.real, t.w.imag, t.h] for t in pts])
    return Configuration("hyperbolic", radius * xyz)
