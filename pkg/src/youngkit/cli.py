"""Command-line front end.

Exit codes
----------
0  success
2  unreadable or malformed input, bad arguments
3  mass mismatch or zero mass
4  unknown scenario name
5  dimension or carrier mismatch
6  invalid battery (a member with Lipschitz bound above 1 where required)
7  other invalid input (for example an atom-floor violation)
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import convergence as C
from . import io as yio
from . import testfunctions as T
from .errors import (
    CarrierMismatchError,
    DegenerateMeasureError,
    DimensionMismatchError,
    InvalidBatteryError,
    MassMismatchError,
)
from .graph import build, disintegrate, tightness_profile
from .transport import dual_lower_bound, w1_exact
from .varifold import first_variation_mass, from_polyline, tangent_young

EXIT_PARSE = 2
EXIT_MASS = 3
EXIT_SCENARIO = 4
EXIT_DIMENSION = 5
EXIT_BATTERY = 6
EXIT_INVALID = 7


class UnknownScenario(LookupError):
    pass


def _num(x: float) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out: str | None) -> None:
    if out:
        yio.write_text(out, text)
    else:
        sys.stdout.write(text)


def _radii(text: str | None):
    if text is None:
        return None
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise yio.ParseError(f"bad --radii list: {exc}") from exc


def cmd_w1(args) -> int:
    mu = yio.load_measure(args.a)
    nu = yio.load_measure(args.b)
    cost, plan = w1_exact(mu, nu)
    if args.plan:
        yio.write_text(args.plan, plan.to_csv())
    print(_num(cost))
    return 0


def cmd_dual(args) -> int:
    mu = yio.load_measure(args.a)
    nu = yio.load_measure(args.b)
    if args.battery:
        battery = yio.load_battery(args.battery)
    else:
        battery = T.truncated_linear_battery(mu.dim, indices=(2, 4, 8, 16), seed=args.seed)
    print(_num(dual_lower_bound(mu, nu, battery)))
    return 0


def cmd_build(args) -> int:
    f = yio.load_young(args.young)
    _emit(yio.dumps(build(f).to_dict()), args.out)
    return 0


def cmd_disintegrate(args) -> int:
    g = yio.load_graph(args.graph)
    base, f = disintegrate(g)
    out = Path(args.out or ".")
    base_text = yio.dumps(base.to_dict())
    young_text = yio.dumps(f.to_dict())
    yio.write_text(out / "base.json", base_text)
    yio.write_text(out / "young.json", young_text)
    return 0


def cmd_tightness(args) -> int:
    seq = [yio.load_graph(p) for p in args.graphs]
    radii = _radii(args.radii) or [1.0, 2.0, 4.0, 8.0, 16.0]
    center = [float(t) for t in args.center.split(",")] if args.center else [0.0] * seq[0].x_dim
    prof = tightness_profile(seq, center, args.radius, radii, tolerance=args.tol)
    _emit(prof.to_csv(), args.out)
    return 0


def _pairs_outputs(args) -> dict[str, str]:
    steps = args.steps or 100
    radii = _radii(args.radii)
    reports = {v: C.pairs_compactness_experiment(v, steps=steps, tol=args.tol, radii=radii) for v in C.PAIR_VARIANTS}
    files = {"report.json": yio.dumps({"scenario": "pairs_compactness", "variants": reports})}
    lead = reports["parallel_lines"]
    lines = ["step,weak_deviation,moment_gap,w1,verdicts"]
    conv = lead["convergences"]
    for k, s in enumerate(lead["steps"]):
        dev = max(conv[key]["weak_deviation"][k] for key in conv)
        flags = ";".join(f"{key}={'pass' if conv[key]['converged'] else 'fail'}" for key in sorted(conv))
        lines.append(f"{s},{_num(dev)},nan,nan,{flags}")
    files["table.csv"] = "\n".join(lines) + "\n"
    for v, rep in reports.items():
        t = rep["tightness"]
        rows = ["s,T(s),verdict"] + [
            f"{_num(s)},{_num(x)},{'tight' if t['tight'] else 'not_tight'}" for s, x in zip(t["radii"], t["T"])
        ]
        files[f"tightness_{v}.csv"] = "\n".join(rows) + "\n"
    gen, _ = C.pair_scenario("parallel_lines")
    for s in lead["steps"]:
        p = gen(s)
        files[f"steps/step_{s:05d}.json"] = yio.dumps({"varifold": p.varifold.to_dict(), "young": p.f.to_dict()})
    return files


def scenario_outputs(name: str, steps: int | None, tol: float, seed: int, battery_path: str | None, radii_text: str | None = None) -> dict[str, str]:
    """All files a scenario run writes, keyed by relative path."""
    if name not in C.SCENARIO_NAMES:
        raise UnknownScenario(name)
    if steps is not None and steps < 1:
        raise yio.ParseError("--steps must be at least 1")
    if name == "pairs_compactness":
        ns = argparse.Namespace(steps=steps, tol=tol, radii=radii_text)
        return _pairs_outputs(ns)
    battery = yio.load_battery(battery_path) if battery_path else None
    rep = C.run_scenario(name, steps=steps, tol=tol, battery=battery, seed=seed)
    files = {"report.json": rep.to_json(), "table.csv": rep.to_csv()}
    sc = C.get_scenario(name, battery=battery, seed=seed, **({"max_step": steps} if name == "oscillation" and steps else {}))
    for s in rep.steps:
        files[f"steps/step_{int(s):05d}.json"] = yio.dumps(sc.measure(int(s)).to_dict())
    return files


def cmd_scenario(args) -> int:
    files = scenario_outputs(args.name, args.steps, args.tol, args.seed, args.battery, args.radii)
    out = Path(args.out or ".")
    for rel, text in files.items():
        yio.write_text(out / rel, text)
    rep = yio.loads(files["report.json"])
    if args.name == "pairs_compactness":
        for v, r in rep["variants"].items():
            print(f"{v}: {r['status']}")
    else:
        verdicts = rep["verdicts"]
        print(" ".join(f"{k}={'pass' if verdicts[k] else 'fail'}" for k in ("weak", "moment", "d")))
        slope = rep["slopes"].get("weak")
        print(f"weak slope: {'nan' if slope is None else _num(slope)}")
    return 0


def cmd_varifold(args) -> int:
    data = yio.read_json(args.file)
    is_polyline = isinstance(data, dict) and "vertices" in data
    if args.action == "first-variation":
        if not is_polyline:
            raise yio.ParseError("first-variation needs a polyline file")
        print(_num(first_variation_mass(yio.load_polyline(args.file))))
        return 0
    if is_polyline:
        V = from_polyline(yio.load_polyline(args.file), args.atoms_per_segment)
    else:
        V = yio.load_varifold(args.file)
    if args.action == "mass":
        print(_num(V.mass()))
        return 0
    _emit(yio.dumps(tangent_young(V).to_dict()), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="youngkit", description="Discrete measures, Young functions and varifolds.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("w1", help="transport distance between two measure files")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("--plan", help="write the optimal plan as CSV")
    q.set_defaults(func=cmd_w1)

    q = sub.add_parser("dual", help="dual lower bound over a battery")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("--battery", help="battery manifest JSON (default: truncated linear functions)")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_dual)

    q = sub.add_parser("build", help="graph measure of a Young function file")
    q.add_argument("young")
    q.add_argument("--out")
    q.set_defaults(func=cmd_build)

    q = sub.add_parser("disintegrate", help="split a graph measure into base.json and young.json")
    q.add_argument("graph")
    q.add_argument("--out", help="output directory (default: current directory)")
    q.set_defaults(func=cmd_disintegrate)

    q = sub.add_parser("tightness", help="tail-mass table of graph measures over a ball")
    q.add_argument("graphs", nargs="+")
    q.add_argument("--center", help="comma-separated ball center (default: origin)")
    q.add_argument("--radius", type=float, default=1.0)
    q.add_argument("--radii", help="comma-separated increasing radii")
    q.add_argument("--tol", type=float, default=C.DEFAULT_TOL)
    q.add_argument("--out")
    q.set_defaults(func=cmd_tightness)

    q = sub.add_parser("scenario", help="run a bundled convergence scenario")
    q.add_argument("name")
    q.add_argument("--steps", type=int)
    q.add_argument("--out", help="output directory (default: current directory)")
    q.add_argument("--tol", type=float, default=C.DEFAULT_TOL)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--battery")
    q.add_argument("--radii")
    q.set_defaults(func=cmd_scenario)

    q = sub.add_parser("varifold", help="varifold and polyline utilities")
    q.add_argument("action", choices=["mass", "first-variation", "tangent-young"])
    q.add_argument("file", help="varifold or polyline JSON")
    q.add_argument("--atoms-per-segment", type=int, default=1)
    q.add_argument("--out")
    q.set_defaults(func=cmd_varifold)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except yio.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MassMismatchError, DegenerateMeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MASS
    except UnknownScenario as exc:
        print(f"error: unknown scenario {exc.args[0]!r}; valid names: {', '.join(C.SCENARIO_NAMES)}", file=sys.stderr)
        return EXIT_SCENARIO
    except (DimensionMismatchError, CarrierMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except InvalidBatteryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BATTERY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
