"""Command-line front end.

Commands:
    check     Certify a strong-interference condition set.
    region    Constraints and vertices of one scheme's rate region.
    union     Surface samples of the Gaussian capacity region over correlations.
    simulate  Monte-Carlo error rates of the random-coding schemes.

Exit codes:
    0  success, or the checked condition set passed
    2  invalid input (unreadable or malformed spec, bad flags, caps exceeded)
    3  the checked condition set failed

Configuration:
    CIFC_THREADS, CIFC_LOG_LEVEL and CIFC_SEARCH_CAP, see ``cifc_regions.config``.
"""

import argparse
import csv
import json
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from . import __version__
from .conditions import ConditionSet, check_family, check_set_g
from .config import load_settings
from .dmc import InputPolicy, mi_terms, sample_policies
from .gaussian import DOMAINS, correlation, gaussian_mi_terms, rho_grid
from .models import RegionUnion, RunManifest, UnionPoint
from .regions import Scheme, boundary_samples, gaussian_c1g, region_bounds, union_over, vertices
from .report_renderer import ReportRenderer
from .simulation import SimConfig, estimate_errors
from .spec_io import LoadedSpec, load_spec

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_FAILED = 3

SET_NAMES = {"set1": ConditionSet.JOINT, "set2": ConditionSet.SEQUENTIAL, "setg": ConditionSet.GAUSSIAN}


class UsageError(ValueError):
    """Flags and spec kind do not fit together."""


def _rounded(value: Any) -> Any:
    """Round every float in a JSON-like structure to six significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, dict):
        return {key: _rounded(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(item) for item in value]
    return value


def _cell(value: Any) -> str:
    return f"{value:.6g}" if isinstance(value, float) else str(value)


def _write_outputs(path: str, header: Sequence[str], rows: Sequence[Sequence[Any]], manifest: RunManifest) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows([_cell(v) for v in row] for row in rows)
    with open(f"{path}.manifest.json", "w") as f:
        json.dump(manifest.model_dump(mode="json"), f, indent=2)
    logger.info(f"Wrote {len(rows)} rows to {path}")


def _manifest(command: str, loaded: LoadedSpec, started: float, seed=None, grid=None) -> RunManifest:
    return RunManifest(
        command=command,
        input_digests={loaded.source: loaded.digest},
        seed=seed,
        grid=grid or {},
        tool_version=__version__,
        duration_seconds=time.perf_counter() - started,
    )


def _require(loaded: LoadedSpec, kind: str, what: str) -> None:
    if loaded.kind != kind:
        raise UsageError(f"{what} needs a {kind} spec, {loaded.source} holds a {loaded.kind} channel")


def _policies(loaded: LoadedSpec, count: Optional[int], seed: int) -> List[InputPolicy]:
    """File policy first, then ``count`` sampled ones; uniform when neither exists."""
    policies = [loaded.policy] if loaded.policy is not None else []
    if count:
        policies += sample_policies(loaded.channel, count, seed)
    if not policies:
        policies = [InputPolicy.uniform(loaded.channel.input_sizes)]
    return policies


def _emit(args, payload: Dict[str, Any], text: str, manifest: RunManifest) -> None:
    if args.format == "json":
        payload = dict(payload, manifest=manifest.model_dump(mode="json"))
        print(json.dumps(_rounded(payload), indent=2))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def cmd_check(args, renderer: ReportRenderer) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    set_id = SET_NAMES[args.set]
    if set_id is ConditionSet.GAUSSIAN:
        _require(loaded, "gaussian", "--set setg")
        report = check_set_g(loaded.channel, args.grid_step, args.rho_domain)
        grid = {"grid_step": args.grid_step, "rho_domain": args.rho_domain}
        seed = None
    else:
        _require(loaded, "dmc", f"--set {args.set}")
        policies = _policies(loaded, args.policies, args.seed)
        report = check_family(loaded.channel, policies, set_id)
        grid = {"policies": len(policies), "file_policy": loaded.policy is not None}
        seed = args.seed
    manifest = _manifest("check", loaded, started, seed, grid)
    if args.out:
        rows = [
            (c.label, c.left, c.right, c.slack, c.passed, "" if c.witness is None else c.witness)
            for c in report.clauses
        ]
        _write_outputs(args.out, ("clause", "left", "right", "slack", "passed", "witness"), rows, manifest)
    _emit(args, {"report": report.model_dump(mode="json")}, renderer.render_condition(report), manifest)
    return EXIT_OK if report.overall_pass else EXIT_FAILED


def _regions(args, loaded: LoadedSpec) -> Tuple[List[Tuple[Optional[int], Any]], Dict[str, Any], Optional[int]]:
    scheme = Scheme(args.scheme)
    if loaded.kind == "gaussian":
        if args.policies is not None:
            raise UsageError("--policies needs a dmc spec; a Gaussian region is fixed by --rho")
        if args.rho is None:
            raise UsageError(f"--scheme {scheme.value} on a Gaussian spec needs --rho RHO1 RHO2")
        rho = correlation(*args.rho)
        if scheme is Scheme.GAUSSIAN:
            poly = gaussian_c1g(loaded.channel, rho.rho1, rho.rho2)
        else:
            poly = region_bounds(gaussian_mi_terms(loaded.channel, rho), scheme)
        return [(None, poly)], {"rho": list(rho.as_tuple())}, None
    if scheme is Scheme.GAUSSIAN:
        raise UsageError("--scheme c1g needs a gaussian spec")
    if args.rho is not None:
        raise UsageError("--rho needs a gaussian spec")
    if args.policies:
        policies = sample_policies(loaded.channel, args.policies, args.seed)
        tagged = list(enumerate(policies))
        info, seed = {"policies": args.policies}, args.seed
    else:
        policy = loaded.policy or InputPolicy.uniform(loaded.channel.input_sizes)
        tagged = [(None, policy)]
        info, seed = {"policy": "file" if loaded.policy is not None else "uniform"}, None
    return [(tag, region_bounds(mi_terms(loaded.channel, p), scheme)) for tag, p in tagged], info, seed


def cmd_region(args, renderer: ReportRenderer) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    regions, info, seed = _regions(args, loaded)
    entries = [(tag, poly, vertices(poly)) for tag, poly in regions]
    manifest = _manifest("region", loaded, started, seed, dict(info, scheme=args.scheme))
    if args.out:
        if len(entries) > 1:
            rows = [(tag,) + v for tag, _, corners in entries for v in corners]
            header = ("policy", "R1", "R2", "R3")
        else:
            rows, header = entries[0][2], ("R1", "R2", "R3")
        _write_outputs(args.out, header, rows, manifest)
    payload = {
        "regions": [
            {"tag": tag, "polytope": poly.model_dump(mode="json"), "vertices": corners}
            for tag, poly, corners in entries
        ]
    }
    _emit(args, payload, renderer.render_regions(entries), manifest)
    return EXIT_OK


def cmd_union(args, renderer: ReportRenderer) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    _require(loaded, "gaussian", "union")
    spec = loaded.channel
    if args.slice is not None:
        points = []
        for rho in args.slice:
            pair = correlation(rho, rho)
            poly = gaussian_c1g(spec, pair.rho1, pair.rho2)
            points += [(pair.as_tuple(), tuple(p)) for p in boundary_samples(poly, args.samples_per_face)]
        grid = {"slice": list(args.slice), "samples_per_face": args.samples_per_face}
        union = RegionUnion(
            points=[UnionPoint(tag=tag, rates=tuple(float(x) for x in rates)) for tag, rates in points],
            metadata=grid,
        )
    else:
        grid = {"grid_step": args.grid_step, "rho_domain": args.rho_domain, "samples_per_face": args.samples_per_face}
        pairs = rho_grid(args.grid_step, args.rho_domain, spec, interior=True)
        generators = [(pair.as_tuple(), gaussian_c1g(spec, pair.rho1, pair.rho2)) for pair in pairs]
        union = union_over(generators, args.samples_per_face, metadata=grid)
    manifest = _manifest("union", loaded, started, None, grid)
    if args.out:
        rows = [p.tag + p.rates for p in union.points]
        _write_outputs(args.out, ("rho1", "rho2", "R1", "R2", "R3"), rows, manifest)
    _emit(args, {"union": union.model_dump(mode="json")}, renderer.render_union(union, args.slice is not None), manifest)
    return EXIT_OK


def cmd_simulate(args, renderer: ReportRenderer) -> int:
    started = time.perf_counter()
    loaded = load_spec(args.spec)
    _require(loaded, "dmc", "simulate")
    policy = loaded.policy or InputPolicy.uniform(loaded.channel.input_sizes)
    configs = [
        SimConfig(
            spec=loaded.channel,
            policy=policy,
            n=n,
            rates=tuple(args.rates),
            trials=args.trials,
            seed=args.seed,
            scheme=args.scheme,
        )
        for n in args.n
    ]
    for config in configs:
        config.check_search_space()
    results = [estimate_errors(config) for config in configs]
    grid = {"n": list(args.n), "rates": list(args.rates), "trials": args.trials, "scheme": args.scheme}
    manifest = _manifest("simulate", loaded, started, args.seed, grid)
    if args.out:
        rows = [(r.n,) + r.rates + r.error_rates + (r.error_rate, r.confidence_radius) for r in results]
        _write_outputs(args.out, ("n", "R1", "R2", "R3", "pe1", "pe2", "pe3", "pe", "radius"), rows, manifest)
    payload = {"results": [r.model_dump(mode="json") for r in results]}
    _emit(args, payload, renderer.render_simulation(results), manifest)
    return EXIT_OK


def _unit_step(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"step must lie in (0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cifc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="channel spec file (JSON)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write CSV here plus a FILE.manifest.json sidecar")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="certify a strong-interference condition set")
    check.add_argument("--set", choices=sorted(SET_NAMES), required=True)
    check.add_argument("--policies", type=int, default=20, help="sampled policies for set1/set2")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--grid-step", type=float, default=0.02, help="correlation grid step for setg")
    check.add_argument("--rho-domain", choices=DOMAINS, default="achieving")
    check.set_defaults(handler=cmd_check)

    region = sub.add_parser("region", parents=[common], help="constraints and vertices of a rate region")
    region.add_argument("--scheme", choices=[s.value for s in Scheme], required=True)
    region.add_argument("--rho", type=float, nargs=2, metavar=("RHO1", "RHO2"))
    region.add_argument("--policies", type=int, help="sample this many policies instead of one")
    region.add_argument("--seed", type=int, default=0)
    region.set_defaults(handler=cmd_region)

    union = sub.add_parser("union", parents=[common], help="union of Gaussian capacity regions")
    union.add_argument("--scheme", choices=[Scheme.GAUSSIAN.value], default=Scheme.GAUSSIAN.value)
    union.add_argument("--grid-step", type=_unit_step, default=0.05)
    union.add_argument("--slice", type=float, nargs="+", metavar="RHO",
                       help="unfiltered samples of the regions with rho1 = rho2 = RHO")
    union.add_argument("--samples-per-face", type=int, default=4)
    union.add_argument("--rho-domain", choices=DOMAINS, default="achieving")
    union.set_defaults(handler=cmd_union)

    simulate = sub.add_parser("simulate", parents=[common], help="random-coding error rates")
    simulate.add_argument("--rates", type=float, nargs=3, metavar=("R1", "R2", "R3"), required=True)
    simulate.add_argument("--n", type=int, nargs="+", required=True)
    simulate.add_argument("--trials", type=int, default=1000)
    simulate.add_argument("--scheme", type=int, choices=(1, 2), default=1)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.set_defaults(handler=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        settings = load_settings()
    except ValidationError as e:
        print(f"error: invalid environment: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(
        level=settings.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args, ReportRenderer())
    except (ValueError, KeyError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
