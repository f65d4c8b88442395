"""Command-line front end.

Every subcommand builds a plain dict, which is rendered as a table (default),
JSON or CSV. JSON output carries ``"schema": "1"`` and is byte-stable for a
fixed seed.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import counts, detection, ks, parable
from .errors import ContextualityError, ParseError
from .linalg import basis_state, random_state

SCHEMA = "1"


def _bits(values) -> str:
    return "".join(str(int(b)) for b in values)


def _resolve_rays(name: str | None) -> ks.RaySystem:
    if name is None:
        return ks.ceg18()
    path = Path(name)
    if not path.exists():
        bundled = ks.bundled_path(path.name)
        if path.name == name and bundled.exists():
            return ks.ceg18() if path.name == "ceg18.json" else ks.load_ray_system(bundled)
    return ks.load_ray_system(path)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _event(text: str) -> detection.SpacetimeEvent:
    vals = _float_list(text)
    if len(vals) != 2 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected T,X, got {text!r}")
    return detection.SpacetimeEvent(*vals)


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def _sign(text: str) -> int:
    if text not in ("+1", "1", "-1"):
        raise argparse.ArgumentTypeError(f"sign must be +1 or -1, got {text!r}")
    return int(text)


def _bias(text: str) -> float:
    p = float(text)
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"bias must lie in [0, 1], got {p}")
    return p


def _assignment(text: str) -> tuple[int, int, int]:
    if len(text) != 3 or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"assignment is three bits like 100, got {text!r}")
    return tuple(int(c) for c in text)


def _chooser(text: str):
    if text == "uniform":
        return text
    try:
        return [parable.BoxPair(p.strip().upper()) for p in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("chooser is 'uniform' or a list like AB,BC,AC") from exc


# -- handlers -------------------------------------------------------------

def cmd_ks_verify(args):
    system = _resolve_rays(args.rays)
    h = system.hypergraph()
    found = ks.find_noncontextual_assignment(h, workers=args.workers)
    out = {
        "system": system.name,
        "dimension": system.dimension,
        "rays": system.ray_count,
        "contexts": len(system.contexts),
        "contexts_valid": True,
        "certificate": ks.parity_certificate(h).value,
        "search": "NONE" if found is None else _bits(found),
    }
    if system.ray_count == 18 and len(system.contexts) == 9:
        out["fig5_structure"] = ks.fig5_structure(system)
    return out


def cmd_ks_search(args):
    system = _resolve_rays(args.rays)
    found = ks.find_noncontextual_assignment(system.hypergraph(), workers=args.workers)
    return {"system": system.name, "rays": system.ray_count,
            "search": "NONE" if found is None else _bits(found)}


def cmd_witness_bound(args):
    system = _resolve_rays(args.rays)
    bound, arg = ks.classical_bound(ks.Witness(system, args.sign), workers=args.workers)
    return {"system": system.name, "sign": args.sign, "classical_bound": bound,
            "maximizing_assignment": _bits(arg)}


def cmd_witness_quantum(args):
    system = _resolve_rays(args.rays)
    w = ks.Witness(system, args.sign)
    d = system.dimension
    values = [ks.quantum_witness_value(w, random_state(d, args.seed + k)) for k in range(args.trials)]
    return {
        "system": system.name,
        "sign": args.sign,
        "basis_state_value": ks.quantum_witness_value(w, basis_state(d, 0)),
        "states": args.trials,
        "min": min(values),
        "max": max(values),
        "spread": max(values) - min(values),
        "values": values,
    }


def cmd_parable_run(args):
    if args.model == "prophet":
        model = parable.ProphetModel(parable.build_prophet_table(args.trials, args.bias, args.seed))
    elif args.model == "machine":
        model = parable.SequentialMachine()
    else:
        model = parable.NoncontextualModel(args.assignment)
    stats = parable.run_parable(model, args.chooser, args.trials, args.seed)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fp:
            stats.write_log(fp)
    return {"model": model.kind, **stats.to_dict()}


def cmd_parable_bound(args):
    b = parable.noncontextual_parable_bound()
    return {
        "bound": str(b.value),
        "bound_float": float(b.value),
        "witness": _bits(b.witness),
        "scores": {_bits(a): str(s) for a, s in b.scores.items()},
    }


def cmd_parable_machine(args):
    stats = parable.sequential_machine_sim(args.trials, args.seed)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fp:
            stats.write_log(fp)
    return {"model": "SEQUENTIAL_MACHINE", **stats.to_dict()}


def _detection_summary(experiment, params, record, theory):
    return {
        "experiment": experiment,
        "params": params,
        "trials": record.trial_count,
        "rates": record.rates,
        "coincidences": record.coincidences,
        "no_detections": record.no_detections,
        "theory_values": theory,
    }


def cmd_detect_mz(args):
    model = detection.MzModel.QUANTUM if args.model == "quantum" else detection.MzModel.PREDETERMINED_PATH
    res = detection.mz_run(detection.MzConfig(args.phase, model, args.trials, args.seed))
    return _detection_summary(
        "mach-zehnder",
        {"phase": args.phase, "model": model.value, "seed": args.seed},
        res.record,
        {"p_d0": res.p_d0_theory},
    )


def cmd_detect_exclusivity(args):
    probs = args.probs or [1.0 / args.detectors] * args.detectors
    rec = detection.exclusivity_run(args.detectors, probs, args.trials, args.seed)
    return _detection_summary(
        "exclusivity",
        {"detectors": args.detectors, "probs": probs, "seed": args.seed},
        rec,
        {"rates": probs, "coincidences": 0},
    )


def cmd_detect_chsh(args):
    if args.angles is None:
        setting = detection.OPTIMAL_CHSH
    else:
        if len(args.angles) != 4:
            raise ParseError("--angles takes four values: a1,a2,b1,b2")
        setting = detection.ChshSetting(tuple(args.angles[:2]), tuple(args.angles[2:]))
    (a1, a2), (b1, b2) = setting.alice_angles, setting.bob_angles
    closed = abs(-math.cos(a1 - b1) - math.cos(a1 - b2) - math.cos(a2 - b1) + math.cos(a2 - b2))
    quantum = detection.chsh_quantum_value(setting)
    lhv = detection.chsh_lhv_bound()
    return {
        "experiment": "chsh",
        "params": {"alice_angles": [a1, a2], "bob_angles": [b1, b2]},
        "quantum_value": quantum,
        "closed_form": closed,
        "lhv_bound": lhv,
        "lhv_strategies": len(detection.chsh_strategies()),
        "tsirelson_bound": 2 * math.sqrt(2),
        "violation": quantum - lhv,
    }


def cmd_detect_separation(args):
    sep = detection.separation_class(args.event1, args.event2, args.c)
    return {
        "event1": {"t": args.event1.t, "x": args.event1.x},
        "event2": {"t": args.event2.t, "x": args.event2.x},
        "c": args.c,
        "separation": sep.value,
    }


def cmd_counts_worlds(args):
    m = counts.world_count(counts.Interpretation(args.interpretation), args.choices, args.outcomes, args.rounds)
    return {"interpretation": args.interpretation, "choices": args.choices,
            "outcomes": args.outcomes, "rounds": args.rounds, "worlds": m.to_json()}


def cmd_counts_histories(args):
    m = counts.history_count(args.choices, args.rounds, args.agents)
    return {"choices": args.choices, "rounds": args.rounds, "agents": args.agents,
            "histories": m.to_json()}


def cmd_counts_infuturabilien(args):
    if args.params:
        try:
            doc = json.loads(Path(args.params).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read params {args.params}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ParseError("params file must hold a JSON object")
        base = counts.CosmicParams.physical() if args.preset == "physical" else counts.CosmicParams()
        params = counts.CosmicParams.from_dict({**base.__dict__, **doc})
    else:
        params = counts.CosmicParams.physical() if args.preset == "physical" else counts.CosmicParams()
    return counts.infuturabilien_estimate(params).to_dict()


def cmd_counts_boltzmann(args):
    b = counts.boltzmann_fluctuation(args.molecules)
    return {"molecules": args.molecules, "delta_s_over_k": b.delta_s_over_k,
            "probability_log2": b.probability_log2}


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, default=0)
    rays = argparse.ArgumentParser(add_help=False)
    rays.add_argument("--rays", metavar="FILE", help="ray-system JSON (default: bundled ceg18.json)")
    workers = argparse.ArgumentParser(add_help=False)
    workers.add_argument("--workers", type=_positive_int, default=1)
    sign = argparse.ArgumentParser(add_help=False)
    sign.add_argument("--sign", type=_sign, default=-1)

    def trials(default):
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--trials", type=_positive_int, default=default)
        return p

    parser = argparse.ArgumentParser(prog="contextkit", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def group(name, help):
        g = groups.add_parser(name, help=help)
        return g.add_subparsers(dest="action", required=True)

    g = group("ks", "Kochen-Specker proofs")
    p = g.add_parser("verify", parents=[common, rays, workers])
    p.set_defaults(func=cmd_ks_verify)
    p = g.add_parser("search", parents=[common, rays, workers])
    p.set_defaults(func=cmd_ks_search)

    g = group("witness", "contextuality witness values")
    p = g.add_parser("bound", parents=[common, rays, workers, sign])
    p.set_defaults(func=cmd_witness_bound)
    p = g.add_parser("quantum", parents=[common, rays, sign, seeded, trials(20)])
    p.set_defaults(func=cmd_witness_quantum)

    g = group("parable", "three-box parable")
    p = g.add_parser("run", parents=[common, seeded, trials(10_000)])
    p.add_argument("--model", choices=("prophet", "noncontextual", "machine"), default="prophet")
    p.add_argument("--assignment", type=_assignment, help="fixed box contents for the noncontextual model")
    p.add_argument("--chooser", type=_chooser, default="uniform")
    p.add_argument("--bias", type=_bias, default=0.5)
    p.add_argument("--log", metavar="FILE", help="write the per-round JSON-lines log")
    p.set_defaults(func=cmd_parable_run)
    p = g.add_parser("bound", parents=[common])
    p.set_defaults(func=cmd_parable_bound)
    p = g.add_parser("machine", parents=[common, seeded, trials(10_000)])
    p.add_argument("--log", metavar="FILE")
    p.set_defaults(func=cmd_parable_machine)

    g = group("detect", "detection-level experiments")
    p = g.add_parser("mz", parents=[common, seeded, trials(10_000)])
    p.add_argument("--phase", type=float, default=0.0, metavar="RADIANS")
    p.add_argument("--model", choices=("quantum", "path"), default="quantum")
    p.set_defaults(func=cmd_detect_mz)
    p = g.add_parser("exclusivity", parents=[common, seeded, trials(10_000)])
    p.add_argument("--detectors", type=int, choices=(2, 3), default=2)
    p.add_argument("--probs", type=_float_list)
    p.set_defaults(func=cmd_detect_exclusivity)
    p = g.add_parser("chsh", parents=[common])
    p.add_argument("--angles", type=_float_list, metavar="A1,A2,B1,B2")
    p.set_defaults(func=cmd_detect_chsh)
    p = g.add_parser("separation", parents=[common])
    p.add_argument("--event1", type=_event, required=True, metavar="T,X")
    p.add_argument("--event2", type=_event, required=True, metavar="T,X")
    p.add_argument("--c", type=float, default=detection.SPEED_OF_LIGHT)
    p.set_defaults(func=cmd_detect_separation)

    g = group("counts", "world and history counting")
    p = g.add_parser("worlds", parents=[common])
    p.add_argument("--interpretation", choices=[i.value for i in counts.Interpretation], required=True)
    p.add_argument("--choices", type=_positive_int, default=3)
    p.add_argument("--outcomes", type=_positive_int, default=4)
    p.add_argument("--rounds", type=_positive_int, default=1)
    p.set_defaults(func=cmd_counts_worlds)
    p = g.add_parser("histories", parents=[common])
    p.add_argument("--choices", type=_positive_int, default=3)
    p.add_argument("--rounds", type=_positive_int, default=8)
    p.add_argument("--agents", type=_positive_int, default=1)
    p.set_defaults(func=cmd_counts_histories)
    p = g.add_parser("infuturabilien", parents=[common])
    p.add_argument("--params", metavar="FILE", help="CosmicParams JSON overriding the preset")
    p.add_argument("--preset", choices=("paper", "physical"), default="paper")
    p.set_defaults(func=cmd_counts_infuturabilien)
    p = g.add_parser("boltzmann", parents=[common])
    p.add_argument("--molecules", type=_positive_int, default=100)
    p.set_defaults(func=cmd_counts_boltzmann)
    return parser


# -- rendering ------------------------------------------------------------

def _flatten(value, prefix=""):
    if isinstance(value, dict):
        for k, v in value.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(value, (list, tuple)) and any(isinstance(v, (dict, list, tuple)) for v in value):
        for i, v in enumerate(value):
            yield from _flatten(v, f"{prefix}[{i}]")
    elif isinstance(value, (list, tuple)):
        yield prefix, " ".join(_scalar(v) for v in value)
    else:
        yield prefix, _scalar(value)


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(command: str, result: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, "command": command, "result": result}, indent=2) + "\n"
    rows = list(_flatten(result))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    lines = [command, "-" * len(command)]
    lines += [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    """Run one subcommand; return 0, 1 (domain error) or 2 (usage error)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = f"{args.group} {args.action}"
    try:
        result = args.func(args)
    except ContextualityError as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    stdout.write(render(command, result, args.format))
    return 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
