"""Weak-convergence testing, metric-topology checks and scenario generators.

Convergence of a finite sequence can only be certified relative to a battery
of test functions and a tolerance.  A series is declared converged when its
final value is within tolerance, or when its second half is nonincreasing with
a fitted log-log slope of at most ``DECAY_SLOPE``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import measure as M
from . import testfunctions as T
from .errors import AtomFloorViolation, DimensionMismatchError, InvalidBatteryError, InvalidInputError
from .graph import GraphMeasure, build, disintegrate, disintegrate_clustered, tightness_profile
from .measure import DiscreteMeasure, ProbabilityMeasure
from .testfunctions import Battery
from .transport import w1
from .varifold import DiscreteVarifold, Plane, PolylineVarifold, first_variation_mass, from_polyline, lift_young
from .young import YoungFunction

DEFAULT_TOL = 1e-3
DECAY_SLOPE = -0.5


def workers_from_env() -> int:
    """Thread cap from ``YM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("YM_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence, workers: int | None) -> list:
    workers = workers_from_env() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def weak_distance(mu: DiscreteMeasure, nu: DiscreteMeasure, battery) -> float:
    """Largest integral gap ``|int g dmu - int g dnu|`` over the battery."""
    members = list(getattr(battery, "members", battery))
    if not members:
        raise InvalidBatteryError("empty battery")
    if mu.dim != nu.dim:
        raise DimensionMismatchError(f"measures live in R^{mu.dim} and R^{nu.dim}")
    if any(g.dim != mu.dim for g in members):
        raise DimensionMismatchError("battery dimension differs from the measures")
    return max(abs(M.integrate(mu, g) - M.integrate(nu, g)) for g in members)


def fit_slope(steps, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(steps)`` over the last half.

    Nonpositive values are skipped; ``nan`` when fewer than two remain.
    """
    s = np.asarray(steps, dtype=float)
    v = np.asarray(values, dtype=float)
    half = len(s) // 2
    s, v = s[half:], v[half:]
    keep = (v > 0) & np.isfinite(v)
    if np.count_nonzero(keep) < 2:
        return math.nan
    return float(np.polyfit(np.log(s[keep]), np.log(v[keep]), 1)[0])


def series_converged(steps, values, tol: float) -> bool:
    """Final value within ``tol``, or a nonincreasing tail decaying at least like ``i^-1/2``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        return False
    if v[-1] <= tol:
        return True
    tail = v[len(v) // 2 :]
    if tail.size < 3 or np.any(np.diff(tail) > 1e-12 * max(1.0, float(tail[0]))):
        return False
    slope = fit_slope(steps, values)
    return bool(np.isfinite(slope) and slope <= DECAY_SLOPE)


def _fmt(x: float) -> str:
    return "nan" if not np.isfinite(x) else format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if np.isfinite(obj) else None
    return obj


@dataclass
class ConvergenceReport:
    """Per-step deviations of a sequence from its declared limit, with verdicts.

    ``moment_gap`` and ``w1`` hold ``nan`` where they were not computed.
    """

    name: str
    steps: np.ndarray
    weak_deviation: np.ndarray
    moment_gap: np.ndarray
    w1: np.ndarray
    tolerance: float
    battery_hash: str | None
    verdicts: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def weak_converged(self) -> bool:
        return bool(self.verdicts.get("weak", False))

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "name": self.name,
                "tolerance": self.tolerance,
                "battery_hash": self.battery_hash,
                "steps": self.steps,
                "weak_deviation": self.weak_deviation,
                "moment_gap": self.moment_gap,
                "w1": self.w1,
                "verdicts": self.verdicts,
                "slopes": self.slopes,
                "notes": self.notes,
                "extra": self.extra,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "weak_deviation", "moment_gap", "w1", "verdicts"])
        for k, s in enumerate(self.steps):
            flags = []
            for key, arr in (("weak", self.weak_deviation), ("moment", self.moment_gap), ("d", self.w1)):
                if np.isfinite(arr[k]):
                    flags.append(f"{key}={'pass' if arr[k] <= self.tolerance else 'fail'}")
            w.writerow([int(s), _fmt(self.weak_deviation[k]), _fmt(self.moment_gap[k]), _fmt(self.w1[k]), ";".join(flags)])
        return buf.getvalue()


def _battery_hash(battery) -> str | None:
    try:
        return battery.manifest_hash()
    except (AttributeError, InvalidInputError):
        return None


def p1_convergence_check(
    seq: Sequence[DiscreteMeasure],
    limit: DiscreteMeasure,
    battery,
    steps: Sequence[int] | None = None,
    tol: float = DEFAULT_TOL,
    name: str = "p1_check",
    workers: int | None = None,
) -> ConvergenceReport:
    """Compare d-convergence with weak convergence plus first-moment convergence.

    The verdict ``agreement`` records whether the d verdict equals the
    conjunction of the weak and moment verdicts.
    """
    seq = list(seq)
    if not seq:
        raise InvalidInputError("need a nonempty sequence")
    if any(mu.dim != limit.dim for mu in seq):
        raise DimensionMismatchError("sequence and limit differ in dimension")
    steps = np.arange(1, len(seq) + 1) if steps is None else np.asarray(steps, dtype=int)
    m_lim = M.first_moment(limit)

    def one(mu):
        return weak_distance(mu, limit, battery), abs(M.first_moment(mu) - m_lim), w1(mu, limit)

    rows = np.array(_map(one, seq, workers), dtype=float).reshape(len(seq), 3)
    weak, gap, dist = rows[:, 0], rows[:, 1], rows[:, 2]
    verdicts = {
        "weak": series_converged(steps, weak, tol),
        "moment": series_converged(steps, gap, tol),
        "d": series_converged(steps, dist, tol),
    }
    verdicts["weak_and_moment"] = verdicts["weak"] and verdicts["moment"]
    verdicts["agreement"] = verdicts["d"] == verdicts["weak_and_moment"]
    slopes = {k: fit_slope(steps, v) for k, v in (("weak", weak), ("moment", gap), ("d", dist))}
    return ConvergenceReport(
        name=name,
        steps=steps,
        weak_deviation=weak,
        moment_gap=gap,
        w1=dist,
        tolerance=tol,
        battery_hash=_battery_hash(battery),
        verdicts=verdicts,
        slopes=slopes,
    )


# ---------------------------------------------------------------- batteries


def line_battery(dim: int = 1, seed: int = 0) -> Battery:
    """Members vanishing near the origin: truncated linear functions and off-center bumps."""
    tl = T.truncated_linear_battery(dim, indices=(2, 3), n_directions=max(2 * dim, 4), seed=seed)
    bumps = []
    for k in range(dim):
        for c in (-3.0, -1.5, 1.5, 3.0):
            center = np.zeros(dim)
            center[k] = c
            bumps.append(T.bump(center, 0.25, 1.0, label=f"bump{k}@{c:g}"))
    return Battery.of(list(tl.members) + bumps)


def _fiber_battery() -> Battery:
    return Battery.of([T.bump([1.0], 0.25, 1.0, label="y@1"), T.bump([-1.0], 0.25, 1.0, label="y@-1")])


def parallel_lines_battery() -> Battery:
    """Tensor battery on R^2 x R with x-bumps placed off the limit line."""
    xb = Battery.of(
        [
            T.bump([0.25, 0.25], 0.05, 0.6, label="x@(0.25,0.25)"),
            T.bump([0.5, -0.25], 0.05, 0.6, label="x@(0.5,-0.25)"),
            T.bump([0.75, 0.4], 0.05, 0.8, label="x@(0.75,0.4)"),
        ]
    )
    return T.tensor_battery(xb, _fiber_battery())


def oscillation_battery() -> Battery:
    xb = Battery.of(
        [
            T.bump([0.3], 0.05, 0.4, label="x@0.3"),
            T.bump([0.6], 0.1, 0.5, label="x@0.6"),
            T.bump([0.0], 0.2, 0.7, label="x@0"),
        ]
    )
    return T.tensor_battery(xb, _fiber_battery())


def _plane_battery() -> Battery:
    e1 = Plane.from_basis([[1.0, 0.0]]).vector()
    diag = Plane.from_basis([[1.0, 1.0]]).vector()
    return Battery.of([T.bump(e1, 0.25, 1.0, label="P@e1"), T.bump(diag, 0.25, 1.5, label="P@diag")])


def varifold_batteries() -> dict[str, Battery]:
    """Batteries for the three convergences of the pairs experiment."""
    xb = Battery.of(
        [
            T.bump([0.25, 0.25], 0.05, 0.6, label="x@(0.25,0.25)"),
            T.bump([0.5, -0.25], 0.05, 0.6, label="x@(0.5,-0.25)"),
            T.bump([0.5, 0.0], 0.1, 0.7, label="x@(0.5,0)"),
        ]
    )
    pb = _plane_battery()
    yb = _fiber_battery()
    return {
        "varifold": T.tensor_battery(xb, pb),
        "lifted": T.tensor_battery(T.tensor_battery(xb, pb), yb),
        "base": T.tensor_battery(xb, yb),
    }


# ---------------------------------------------------------------- scenarios


@dataclass(frozen=True)
class Scenario:
    """A deterministic step generator with its declared limit.

    ``measure(i)`` is the probability measure compared against
    ``limit_measure``; ``support_bound`` is a common bound on the supports of
    all steps and the limit, or ``None`` when no such bound exists.
    """

    name: str
    step: Callable[[int], object]
    limit: object
    measure: Callable[[int], ProbabilityMeasure]
    limit_measure: ProbabilityMeasure
    battery: Battery
    default_steps: int
    support_bound: float | None
    expected: dict
    schedule: Callable[[int], list] | None = None

    def steps(self, n: int) -> list[int]:
        if n < 1:
            raise InvalidInputError("steps must be at least 1")
        return self.schedule(n) if self.schedule is not None else checkpoints(n)


def checkpoints(n: int, count: int = 40) -> list[int]:
    """Roughly geometric step indices from 1 to ``n`` inclusive."""
    if n <= count:
        return list(range(1, n + 1))
    return sorted({int(round(v)) for v in np.geomspace(1, n, count)})


def powers_of_two(n: int) -> list[int]:
    out = [1]
    while out[-1] * 2 <= n:
        out.append(out[-1] * 2)
    return out


def _grid_1d(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _union(parts: Sequence[DiscreteVarifold]) -> DiscreteVarifold:
    xs = np.vstack([v.xs for v in parts])
    planes = [p for v in parts for p in v.planes()]
    w = np.concatenate([v.weights for v in parts])
    return DiscreteVarifold(xs, planes, w, m=parts[0].m)


def scenario_parallel_lines(i: int, grid: int = 16) -> tuple[tuple[PolylineVarifold, PolylineVarifold], YoungFunction]:
    """Two unit segments at heights ``+-1/(2i)`` carrying the values ``+-1``."""
    if i < 1:
        raise InvalidInputError("step must be at least 1")
    h = 1.0 / (2 * i)
    top = PolylineVarifold([[0.0, h], [1.0, h]], [1.0])
    bottom = PolylineVarifold([[0.0, -h], [1.0, -h]], [1.0])
    x = _grid_1d(grid)
    pts = np.vstack([np.column_stack([x, np.full(grid, h)]), np.column_stack([x, np.full(grid, -h)])])
    fibers = [M.dirac([1.0])] * grid + [M.dirac([-1.0])] * grid
    f = YoungFunction(pts, np.full(2 * grid, 1.0 / grid), fibers, fiber_dim=1)
    return (top, bottom), f


def parallel_lines_limit(grid: int = 16) -> tuple[PolylineVarifold, YoungFunction]:
    """One segment of multiplicity 2 with the half-half fiber everywhere."""
    line = PolylineVarifold([[0.0, 0.0], [1.0, 0.0]], [2.0])
    x = _grid_1d(grid)
    half = ProbabilityMeasure([[-1.0], [1.0]], [0.5, 0.5])
    f = YoungFunction(np.column_stack([x, np.zeros(grid)]), np.full(grid, 2.0 / grid), [half] * grid, fiber_dim=1)
    return line, f


def parallel_lines_varifold(i: int, grid: int = 16) -> DiscreteVarifold:
    (top, bottom), _ = scenario_parallel_lines(i, grid)
    return _union([from_polyline(top, grid), from_polyline(bottom, grid)])


def scenario_oscillation(i: int, grid: int = 512) -> YoungFunction:
    """Single-valued ``x -> delta_{sign(sin(2 pi i x))}`` on a uniform grid of ``[0, 1]``."""
    if i < 1:
        raise InvalidInputError("step must be at least 1")
    x = _grid_1d(grid)
    s = np.where(np.sin(2 * np.pi * i * x) >= 0, 1.0, -1.0)
    return YoungFunction(x, np.full(grid, 1.0 / grid), [M.dirac([v]) for v in s], fiber_dim=1)


def oscillation_limit(grid: int = 512) -> YoungFunction:
    half = ProbabilityMeasure([[-1.0], [1.0]], [0.5, 0.5])
    return YoungFunction(_grid_1d(grid), np.full(grid, 1.0 / grid), [half] * grid, fiber_dim=1)


def scenario_escaping_mass(i: int, v=(1.0,), mu0: DiscreteMeasure | None = None) -> ProbabilityMeasure:
    """``(1 - 1/i) mu0 + (1/i) delta_{i v}``."""
    if i < 1:
        raise InvalidInputError("step must be at least 1")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if not np.any(v != 0):
        raise InvalidInputError("v must be nonzero")
    mu0 = M.dirac(np.zeros_like(v)) if mu0 is None else mu0
    if mu0.dim != v.size:
        raise DimensionMismatchError("v and mu0 differ in dimension")
    return M.as_probability(M.mixture([mu0, M.dirac(i * v)], [1.0 - 1.0 / i, 1.0 / i]))


def heavy_tail_proxy(n_atoms: int = 200) -> ProbabilityMeasure:
    """Atoms at ``k = 1..n`` with weights proportional to ``1/k^2``."""
    k = np.arange(1, n_atoms + 1, dtype=float)
    w = 1.0 / k**2
    return ProbabilityMeasure(k, w / w.sum())


def scenario_truncation(i: int, mu: DiscreteMeasure | None = None) -> ProbabilityMeasure:
    """Normalized restriction of ``mu`` to the ball of radius ``i``."""
    mu = heavy_tail_proxy() if mu is None else mu
    return M.normalize(M.restrict(mu, float(i)))


def atom_floor_sequence(i: int) -> ProbabilityMeasure:
    """Two atoms of weight 1/2 at ``1/i`` and ``2/i`` merging at the origin."""
    return ProbabilityMeasure([[1.0 / i], [2.0 / i]], [0.5, 0.5])


def check_atom_floor(mu: DiscreteMeasure, eps: float) -> None:
    w = mu.weights[mu.weights > 0]
    if w.size and float(np.min(w)) < eps:
        raise AtomFloorViolation(f"atom of weight {float(np.min(w))!r} below the floor {eps!r}")


def scenario_atom_floor(
    eps: float,
    seq: Sequence[DiscreteMeasure],
    limit: DiscreteMeasure,
    battery,
    steps: Sequence[int] | None = None,
    tol: float = DEFAULT_TOL,
    workers: int | None = None,
) -> ConvergenceReport:
    """P1 check restricted to measures whose atoms all weigh at least ``eps``."""
    if not 0 < eps <= 1:
        raise InvalidInputError("eps must lie in (0, 1]")
    seq = list(seq)
    for mu in seq + [limit]:
        check_atom_floor(mu, eps)
    rep = p1_convergence_check(seq, limit, battery, steps=steps, tol=tol, name="atom_floor", workers=workers)
    rep.verdicts["floor_implies_moment"] = (not rep.verdicts["weak"]) or rep.verdicts["moment"]
    rep.extra["eps"] = eps
    return rep


def _graph_probability(f: YoungFunction) -> ProbabilityMeasure:
    return M.normalize(build(f).measure)


def get_scenario(name: str, **params) -> Scenario:
    """Bundled scenarios by name; see ``SCENARIO_NAMES``."""
    if name == "parallel_lines":
        grid = int(params.get("grid", 16))
        _, lim = parallel_lines_limit(grid)
        return Scenario(
            name=name,
            step=lambda i: scenario_parallel_lines(i, grid),
            limit=parallel_lines_limit(grid),
            measure=lambda i: _graph_probability(scenario_parallel_lines(i, grid)[1]),
            limit_measure=_graph_probability(lim),
            battery=params.get("battery") or parallel_lines_battery(),
            default_steps=100,
            support_bound=float(np.hypot(np.hypot(1.0, 0.5), 1.0)),
            expected={"weak": True, "moment": True, "d": True},
        )
    if name == "oscillation":
        top = int(params.get("max_step", 64))
        grid = int(params.get("grid", 8 * powers_of_two(top)[-1]))
        lim = oscillation_limit(grid)
        return Scenario(
            name=name,
            step=lambda i: scenario_oscillation(i, grid),
            limit=lim,
            measure=lambda i: _graph_probability(scenario_oscillation(i, grid)),
            limit_measure=_graph_probability(lim),
            battery=params.get("battery") or oscillation_battery(),
            default_steps=64,
            support_bound=float(np.sqrt(2.0)),
            expected={"weak": True, "moment": True, "d": True},
            schedule=powers_of_two,
        )
    if name == "escaping_mass":
        v = np.atleast_1d(np.asarray(params.get("v", (1.0,)), dtype=float))
        mu0 = params.get("mu0") or M.dirac(np.zeros_like(v))
        return Scenario(
            name=name,
            step=lambda i: scenario_escaping_mass(i, v, mu0),
            limit=mu0,
            measure=lambda i: scenario_escaping_mass(i, v, mu0),
            limit_measure=M.as_probability(mu0),
            battery=params.get("battery") or line_battery(v.size, params.get("seed", 0)),
            default_steps=200,
            support_bound=None,
            expected={"weak": True, "moment": False, "d": False},
        )
    if name == "atom_floor":
        lim = M.dirac([0.0])
        return Scenario(
            name=name,
            step=atom_floor_sequence,
            limit=lim,
            measure=atom_floor_sequence,
            limit_measure=lim,
            battery=params.get("battery") or line_battery(1, params.get("seed", 0)),
            default_steps=2000,
            support_bound=2.0,
            expected={"weak": True, "moment": True, "d": True},
        )
    if name == "truncation":
        mu = heavy_tail_proxy(int(params.get("n_atoms", 200)))
        return Scenario(
            name=name,
            step=lambda i: scenario_truncation(i, mu),
            limit=mu,
            measure=lambda i: scenario_truncation(i, mu),
            limit_measure=mu,
            battery=params.get("battery") or line_battery(1, params.get("seed", 0)),
            default_steps=250,
            support_bound=float(mu.support_radius()),
            expected={"weak": True, "moment": True, "d": True},
        )
    raise KeyError(name)


MEASURE_SCENARIOS = ("parallel_lines", "oscillation", "escaping_mass", "atom_floor", "truncation")
SCENARIO_NAMES = MEASURE_SCENARIOS + ("pairs_compactness",)


def run_scenario(
    name: str,
    steps: int | None = None,
    tol: float = DEFAULT_TOL,
    battery: Battery | None = None,
    seed: int = 0,
    workers: int | None = None,
    **params,
) -> ConvergenceReport:
    """Evaluate a bundled scenario on its step schedule up to ``steps``."""
    if name == "oscillation" and steps is not None:
        params.setdefault("max_step", steps)
    sc = get_scenario(name, battery=battery, seed=seed, **params)
    n = sc.default_steps if steps is None else int(steps)
    idx = sc.steps(n)
    seq = _map(sc.measure, idx, workers)
    if name == "atom_floor":
        rep = scenario_atom_floor(0.5, seq, sc.limit_measure, sc.battery, steps=idx, tol=tol, workers=workers)
    else:
        rep = p1_convergence_check(seq, sc.limit_measure, sc.battery, steps=idx, tol=tol, name=name, workers=workers)
    rep.extra["support_bound"] = sc.support_bound
    rep.extra["expected"] = sc.expected
    rep.extra["matches_expected"] = all(rep.verdicts[k] == v for k, v in sc.expected.items())
    if name == "truncation":
        moments = np.array([M.first_moment(mu) for mu in seq])
        rep.extra["moments_nondecreasing"] = bool(np.all(np.diff(moments) >= 0))
    if sc.support_bound is None:
        rep.notes.append("no common support bound: the characterization is not expected to apply")
    return rep


# ---------------------------------------------------------------- pairs experiment


@dataclass(frozen=True)
class PairStep:
    """One member of a sequence of (rectifiable 1-varifold, Young function) pairs."""

    polylines: tuple[PolylineVarifold, ...]
    varifold: DiscreteVarifold
    f: YoungFunction


def _pair_parallel(i: int, grid: int = 16) -> PairStep:
    lines, f = scenario_parallel_lines(i, grid)
    return PairStep(lines, parallel_lines_varifold(i, grid), f)


def _pair_limit(grid: int = 16) -> PairStep:
    line, f = parallel_lines_limit(grid)
    return PairStep((line,), from_polyline(line, grid), f)


def _pair_escaping(i: int, grid: int = 16) -> PairStep:
    line = PolylineVarifold([[0.0, 0.0], [1.0, 0.0]], [1.0])
    V = from_polyline(line, grid)
    x = _grid_1d(grid)
    f = YoungFunction(np.column_stack([x, np.zeros(grid)]), np.full(grid, 1.0 / grid), [M.dirac([float(i)])] * grid)
    return PairStep((line,), V, f)


PAIR_VARIANTS = ("parallel_lines", "constant", "escaping_fiber")


def pair_scenario(variant: str, grid: int = 16) -> tuple[Callable[[int], PairStep], PairStep | None]:
    """Step generator and declared limit for a pairs variant."""
    if variant == "parallel_lines":
        return (lambda i: _pair_parallel(i, grid)), _pair_limit(grid)
    if variant == "constant":
        lim = _pair_limit(grid)
        return (lambda i: lim), lim
    if variant == "escaping_fiber":
        # no limit exists; the one-line Dirac-at-0 pair is declared only to run the comparison
        return (lambda i: _pair_escaping(i, grid)), _pair_escaping(0, grid)
    raise KeyError(variant)


def cluster_limit_estimate(tail: Sequence[GraphMeasure], h: float) -> GraphMeasure:
    """Heuristic limit candidate: average the tail, then merge x and y values within ``h``."""
    tail = list(tail)
    if not tail:
        raise InvalidInputError("need a nonempty tail")
    if not h > 0:
        raise InvalidInputError("cluster radius must be positive")
    kx, ky = tail[0].x_dim, tail[0].y_dim
    avg = M.mixture([g.measure for g in tail], [1.0 / len(tail)] * len(tail))
    base, f = disintegrate_clustered(GraphMeasure.from_measure(avg, kx), h)
    out = build(f)
    assert out.y_dim == ky
    return out


def pairs_compactness_experiment(
    variant: str = "parallel_lines",
    steps: int = 100,
    batteries: dict | None = None,
    tol: float = DEFAULT_TOL,
    radii: Sequence[float] | None = None,
    grid: int = 16,
    workers: int | None = None,
) -> dict:
    """Check the compactness hypotheses and the three convergences for a pairs variant.

    Returns a JSON-ready dict.  When the tightness verdict fails the status is
    ``hypothesis_violation`` and no convergence verdict is issued.
    """
    try:
        gen, limit = pair_scenario(variant, grid)
    except KeyError:
        raise InvalidInputError(f"unknown pairs variant {variant!r}") from None
    if limit is None:
        raise InvalidInputError("a declared limit is required")
    batteries = batteries or varifold_batteries()
    idx = checkpoints(steps)
    seq = _map(gen, idx, workers)

    # (a) mass and first-variation bound
    mass_fv = [p.varifold.mass() + sum(first_variation_mass(P) for P in p.polylines) for p in seq]

    # (b) tightness of the base graph measures in the fiber direction
    base_graphs = [build(p.f) for p in seq]
    if radii is None:
        radii = np.geomspace(1.0, max(2.0, steps / 2), 8)
    prof = tightness_profile(base_graphs, center=[0.5, 0.0], radius=1.0, radii=radii, tolerance=tol)

    out = {
        "variant": variant,
        "tolerance": tol,
        "steps": idx,
        "mass_plus_first_variation": mass_fv,
        "mass_bound": max(mass_fv),
        "tightness": {"radii": prof.radii, "T": prof.tail, "tight": prof.tight, "mass_bound": prof.mass_bound},
        "battery_hashes": {k: _battery_hash(b) for k, b in batteries.items()},
    }
    if not prof.tight:
        out["status"] = "hypothesis_violation"
        out["convergences"] = None
        return _jsonable(out)

    # (c) the three convergences against the declared limit
    lim_base = build(limit.f)
    lim_lift = build(lift_young(limit.varifold, limit.f))
    pairs = {
        "varifold": ([p.varifold.graph.measure for p in seq], limit.varifold.graph.measure),
        "lifted": ([build(lift_young(p.varifold, p.f)).measure for p in seq], lim_lift.measure),
        "base": ([g.measure for g in base_graphs], lim_base.measure),
    }
    conv = {}
    for key, (ms, lim) in pairs.items():
        dev = np.array(_map(lambda mu: weak_distance(mu, lim, batteries[key]), ms, workers))
        conv[key] = {
            "weak_deviation": dev,
            "slope": fit_slope(idx, dev),
            "converged": series_converged(idx, dev, tol),
        }
    out["convergences"] = conv
    out["status"] = "converged" if all(c["converged"] for c in conv.values()) else "not_converged"
    if variant == "parallel_lines":
        tail = [g for s, g in zip(idx, base_graphs) if s >= steps // 2]
        est = cluster_limit_estimate(tail, 0.05)
        _, f_est = disintegrate(est)
        half = np.array([0.5, 0.5])
        err = max(float(np.max(np.abs(fib.weights - half))) if len(fib) == 2 else 1.0 for fib in f_est.fibers)
        out["cluster_estimate"] = {"heuristic": True, "h": 0.05, "sites": len(f_est), "max_fiber_error": err}
    return _jsonable(out)
