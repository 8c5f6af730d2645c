"""Command-line entry point: ``ttplon {generate,lon,experiment}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .export import fmt, write_dot, write_graphml, write_lon_json, write_report
from .generator import (
    CAPACITY_CLASSES,
    CORRELATIONS,
    DROP_RATES,
    DegenerateInstanceError,
    GeneratorConfig,
    ParseError,
    generate_instance,
    read_instance,
    write_instance,
)
from .graph import metrics
from .lon import extract_lon
from .model import Model
from .search import Policy
from .space import SpaceTooLargeError
from .stats import MAX_ATTEMPTS, ExperimentConfig, instance_seed, run_experiment, shared_coords

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_SIZE, EXIT_INCOMPLETE = 0, 1, 2, 3, 4

log = logging.getLogger("ttplon")

_CONFIG_KEYS = {
    "model", "corr", "cap", "drop", "count", "seed", "policy", "workers",
    "out", "non_paper", "n_cities", "n_items", "scatter_all",
}


class UsageError(Exception):
    pass


def _split(text: str) -> list[str]:
    return [t for t in (p.strip() for p in text.split(",")) if t]


def parse_models(text: str) -> tuple[Model, ...]:
    if text == "all":
        return tuple(Model)
    try:
        return tuple(Model.parse(t) for t in _split(text))
    except ValueError:
        raise UsageError(f"unknown model in {text!r}") from None


def parse_corrs(text: str) -> tuple[str, ...]:
    if text == "all":
        return CORRELATIONS
    corrs = tuple(_split(text))
    bad = [c for c in corrs if c not in CORRELATIONS]
    if bad:
        raise UsageError(f"unknown correlation {bad[0]!r}")
    return corrs


def parse_caps(text: str, non_paper: bool) -> tuple[int, ...]:
    if text == "all":
        return CAPACITY_CLASSES
    try:
        caps = tuple(int(t) for t in _split(text))
    except ValueError:
        raise UsageError(f"capacity classes must be integers, got {text!r}") from None
    if not non_paper and any(c not in CAPACITY_CLASSES for c in caps):
        raise UsageError(f"--cap must be one of {CAPACITY_CLASSES} (or pass --non-paper)")
    if any(not 0 < c < 11 for c in caps):
        raise UsageError("capacity classes must lie in 1..10")
    return caps


def parse_drops(text: str, non_paper: bool) -> tuple[float, ...]:
    if text == "all":
        return DROP_RATES
    try:
        drops = tuple(float(t) for t in _split(text))
    except ValueError:
        raise UsageError(f"drop rates must be numbers, got {text!r}") from None
    if not non_paper and any(d not in DROP_RATES for d in drops):
        raise UsageError(f"--drop must be one of {DROP_RATES} (or pass --non-paper)")
    if any(not 0 < d <= 1 for d in drops):
        raise UsageError("drop rates must lie in (0, 1]")
    return drops


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unrecognised config line {raw!r}")
        values[key] = value.strip()
    return values


def _truthy(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--non-paper", action="store_true", default=None,
                   help="allow classes outside the published feature domains")
    p.add_argument("--n-cities", type=int, default=None)
    p.add_argument("--n-items", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttplon", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write instance files")
    g.add_argument("--model", default="ttpa", help="model(s) whose travel rule sets the renting rate")
    g.add_argument("--corr", default="u")
    g.add_argument("--cap", default="2")
    g.add_argument("--drop", default="all")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")
    _add_common(g)

    lo = sub.add_parser("lon", help="extract the LON of one instance file")
    lo.add_argument("instance")
    lo.add_argument("--model", default="ttpa")
    lo.add_argument("--policy", default="strict", choices=("strict", "identities"))
    lo.add_argument("--workers", type=int, default=1)
    lo.add_argument("--out", help="LON JSON path (default: <instance>.<model>.lon.json)")
    lo.add_argument("--dot", help="also write a DOT graph")
    lo.add_argument("--graphml", help="also write a GraphML graph")

    e = sub.add_parser("experiment", help="run a full class sweep and write CSV tables")
    e.add_argument("--config", help="flat key = value file; flags override it")
    e.add_argument("--model", default=None)
    e.add_argument("--corr", default=None)
    e.add_argument("--cap", default=None)
    e.add_argument("--drop", default=None)
    e.add_argument("--count", type=int, default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--policy", default=None, choices=("strict", "identities"))
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--out", default=None)
    e.add_argument("--scatter-all", action="store_true", default=None,
                   help="write fitness/basin rows for every instance, not one per class")
    _add_common(e)
    return parser


def cmd_generate(args) -> int:
    non_paper = bool(args.non_paper)
    models = parse_models(args.model)
    corrs = parse_corrs(args.corr)
    caps = parse_caps(args.cap, non_paper)
    drops = parse_drops(args.drop, non_paper)
    n_cities = args.n_cities or 7
    n_items = args.n_items or n_cities - 1
    if args.count < 1:
        raise UsageError("--count must be positive")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = ExperimentConfig(
            models=models, correlations=corrs, capacity_classes=caps, drop_rates=drops,
            instances_per_class=args.count, n_cities=n_cities, n_items=n_items,
            seed=args.seed, non_paper=non_paper,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    coords = shared_coords(cfg)
    for key in cfg.class_keys():
        for idx in range(args.count):
            for attempt in range(MAX_ATTEMPTS):
                seed = instance_seed(cfg, key, idx, attempt)
                gen = GeneratorConfig(
                    correlation=key.correlation, capacity_class=key.capacity_class,
                    drop_rate=key.drop_rate, n_cities=n_cities, n_items=n_items,
                    seed=seed, shared_coords=coords, model=key.model, non_paper=non_paper,
                )
                try:
                    inst = generate_instance(gen)
                    break
                except DegenerateInstanceError:
                    log.warning("%s #%d attempt %d degenerate", key.label, idx, attempt)
            else:
                print(f"error: {key.label} #{idx}: no usable instance after {MAX_ATTEMPTS} attempts",
                      file=sys.stderr)
                return EXIT_ERROR
            path = out / f"inst_{key.label}_{idx}.ttp"
            write_instance(inst.replace(name=f"{key.label}_{idx}"), path)
            print(f"{path}\tseed={','.join(str(s) for s in seed)}")
    return EXIT_OK


def cmd_lon(args) -> int:
    models = parse_models(args.model)
    if len(models) != 1:
        raise UsageError("lon takes exactly one --model")
    model = models[0]
    inst = read_instance(args.instance)
    if model.value_drops and inst.drop_rate == 1.0:
        print(f"warning: {args.instance} has no DROPPING RATE; {model.value} runs with rate 1 (no drop)",
              file=sys.stderr)
    lon = extract_lon(inst, model, Policy.parse(args.policy), workers=args.workers)
    rec = metrics(lon)
    out = args.out or f"{args.instance}.{model.value}.lon.json"
    write_lon_json(lon, out, rec)
    if args.dot:
        write_dot(lon, args.dot)
    if args.graphml:
        write_graphml(lon, args.graphml)
    print("nv,ne,c,cr,l,b")
    print(",".join(fmt(v) for v in (rec.n_v, rec.n_e, rec.C, rec.C_r, rec.l, rec.B_mean)))
    return EXIT_OK


def experiment_config(args) -> tuple[ExperimentConfig, Path]:
    file_values = read_config_file(args.config) if args.config else {}

    def pick(name: str, default: str):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name, default)

    non_paper = args.non_paper if args.non_paper is not None else _truthy(
        file_values.get("non_paper", "false"))
    scatter_all = args.scatter_all if args.scatter_all is not None else _truthy(
        file_values.get("scatter_all", "false"))
    n_cities = int(pick("n_cities", "7"))
    try:
        cfg = ExperimentConfig(
            models=parse_models(str(pick("model", "all"))),
            correlations=parse_corrs(str(pick("corr", "all"))),
            capacity_classes=parse_caps(str(pick("cap", "all")), non_paper),
            drop_rates=parse_drops(str(pick("drop", "all")), non_paper),
            instances_per_class=int(pick("count", "100")),
            n_cities=n_cities,
            n_items=int(pick("n_items", str(n_cities - 1))),
            seed=int(pick("seed", "0")),
            policy=Policy.parse(str(pick("policy", "strict"))),
            workers=int(pick("workers", "1")),
            scatter_all=scatter_all,
            non_paper=non_paper,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg, Path(str(pick("out", "results")))


def cmd_experiment(args) -> int:
    cfg, out = experiment_config(args)
    report = run_experiment(cfg)
    for path in write_report(report, out):
        print(path)
    for model, (rho, used, degenerate) in report.model_rho.items():
        print(f"rho({model.value}) = {fmt(rho)}  [{used} instances, {degenerate} degenerate]")
    if not report.complete:
        print(f"error: {len(report.failures)} instance(s) failed; some classes are incomplete",
              file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"generate": cmd_generate, "lon": cmd_lon, "experiment": cmd_experiment}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpaceTooLargeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
