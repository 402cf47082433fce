"""Batch front end: deterministic JSON in, deterministic JSON out.

Two subcommands:

    compute --config cfg.json [--output out.json] [--degree D] [--lambda-floor L]
    verify  [--suite NAME] [--output out.json]

Exit codes: 0 success; 1 failing verification check; 2 invalid configuration;
3 mathematical error raised by an engine module.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import EngineError
from .gw import j_reduced, qde_verify, s_matrix
from .mirror import birkhoff, extract_instantons, small_mirror
from .ring import BundleSpec, RingDescriptor
from .twist import i_function, serre_dual_i
from .verify import SUITES, run_suites

TASKS = ("i_function", "mirror", "instantons", "serre_check", "qde_check", "s_matrix")
MODES = ("equivariant", "nonequivariant", "both")


class ConfigError(Exception):
    pass


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def load_config(data: dict) -> dict:
    _require(isinstance(data, dict), "config must be a JSON object")
    known = {"ambient_dim", "degrees", "max_degree", "lambda_floor", "mode", "tasks"}
    unknown = set(data) - known
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")

    n = data.get("ambient_dim")
    _require(isinstance(n, int) and n >= 2, "ambient_dim must be an integer >= 2")
    degrees = data.get("degrees", [])
    _require(
        isinstance(degrees, list) and all(isinstance(l, int) and l >= 1 for l in degrees),
        "degrees must be a list of integers >= 1",
    )
    D = data.get("max_degree")
    _require(isinstance(D, int) and D >= 0, "max_degree must be an integer >= 0")
    floor = data.get("lambda_floor", 2)
    _require(isinstance(floor, int) and floor >= 0, "lambda_floor must be >= 0")
    mode = data.get("mode", "nonequivariant")
    _require(mode in MODES, f"mode must be one of {MODES}")
    tasks = data.get("tasks", [])
    _require(
        isinstance(tasks, list) and tasks and all(t in TASKS for t in tasks),
        f"tasks must be a non-empty subset of {TASKS}",
    )
    if "instantons" in tasks:
        _require(
            n == 5 and degrees == [5],
            "the instantons task requires ambient_dim 5 and degrees [5]",
        )
    bundle_tasks = {"i_function", "mirror", "instantons", "serre_check"}
    if bundle_tasks & set(tasks):
        _require(degrees, "bundle degrees required for the requested tasks")
    return {
        "ambient_dim": n,
        "degrees": degrees,
        "max_degree": D,
        "lambda_floor": floor,
        "mode": mode,
        "tasks": sorted(tasks),
    }


def _modes(config: dict) -> list[str]:
    if config["mode"] == "both":
        return ["equivariant", "nonequivariant"]
    return [config["mode"]]


def run_compute(config: dict) -> dict:
    """Execute the configured tasks; output is a pure function of the config."""
    n = config["ambient_dim"]
    D = config["max_degree"]
    desc = RingDescriptor(n=n, lambda_floor=config["lambda_floor"])
    J = j_reduced(n, D, desc=desc)
    results: dict = {}
    flags: dict = {}

    def mode_bundles() -> list[tuple[str, BundleSpec]]:
        return [
            (mode, BundleSpec(tuple(config["degrees"]), equivariant=(mode == "equivariant")))
            for mode in _modes(config)
        ]

    for task in config["tasks"]:
        if task == "qde_check":
            ok, slot = qde_verify(J, n)
            results[task] = {
                "holds": ok,
                "first_failure": None if slot is None else list(slot),
            }
            flags[task] = J.truncated
        elif task == "s_matrix":
            S, ok, failure = s_matrix(J, n, D)
            results[task] = {
                "unitary": ok,
                "first_failure": None if failure is None else list(failure),
                "matrix": S.to_json_dict(),
            }
            flags[task] = False
        elif task == "i_function":
            block = {}
            truncated = False
            for mode, bundle in mode_bundles():
                base = J if bundle.equivariant else J.lambda_zero_part()
                I = i_function(base, bundle)
                block[mode] = I.to_json_dict()
                truncated |= I.truncated
            results[task] = block
            flags[task] = truncated
        elif task == "serre_check":
            block = {}
            truncated = False
            for mode, bundle in mode_bundles():
                base = J if bundle.equivariant else J.lambda_zero_part()
                Istar, ok, failure = serre_dual_i(base, bundle)
                block[mode] = {
                    "series": Istar.to_json_dict(),
                    "identity_holds": ok,
                    "first_failure": None if failure is None else list(failure),
                }
                truncated |= Istar.truncated
            results[task] = block
            flags[task] = truncated
        elif task == "mirror":
            block = {}
            truncated = False
            for mode, bundle in mode_bundles():
                base = J if bundle.equivariant else J.lambda_zero_part()
                I = i_function(base, bundle)
                if bundle.equivariant:
                    M = birkhoff(I, bundle=bundle)
                else:
                    M = small_mirror(I, bundle=bundle)
                data = M.to_json_dict()
                block[mode] = data
                truncated |= data["truncated"]
            results[task] = block
            flags[task] = truncated
        elif task == "instantons":
            bundle = BundleSpec((5,), equivariant=False)
            I = i_function(J.lambda_zero_part(), bundle)
            M = small_mirror(I, bundle=bundle)
            counts = extract_instantons(M, D)
            results[task] = {
                "counts": [str(c) for c in counts],
                "d_max": D,
                "p3_consistency_residual": "0",
            }
            flags[task] = False
    return {"config": config, "results": results, "truncation_flags": flags}


def run_verify(suite: str) -> dict:
    """Run the named identity suite ('all' or a module name); report per check."""
    names = sorted(SUITES) if suite == "all" else [suite]
    checks = run_suites(names)
    return {
        "suites": names,
        "checks": [c.to_json_dict() for c in checks],
        "passed": all(c.passed for c in checks),
        "first_failure": next(
            (c.to_json_dict() for c in checks if not c.passed), None
        ),
    }


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qlefschetz",
        description="Exact mirror-symmetry computations for projective hypersurfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="run the configured pipeline")
    p_compute.add_argument("--config", required=True, help="path to a JSON config")
    p_compute.add_argument("--output", default=None, help="output path (default stdout)")
    p_compute.add_argument("--degree", type=int, default=None, help="override max_degree")
    p_compute.add_argument(
        "--lambda-floor", type=int, default=None, help="override lambda_floor"
    )

    p_verify = sub.add_parser("verify", help="run identity suites")
    p_verify.add_argument(
        "--suite",
        default="all",
        choices=("all",) + tuple(sorted(SUITES)),
        help="which suite to run",
    )
    p_verify.add_argument("--output", default=None, help="output path (default stdout)")

    args = parser.parse_args(argv)

    if args.command == "compute":
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            _emit({"error": {"type": "ConfigError", "message": str(exc)}}, args.output)
            return 2
        if args.degree is not None:
            raw["max_degree"] = args.degree
        if args.lambda_floor is not None:
            raw["lambda_floor"] = args.lambda_floor
        try:
            config = load_config(raw)
        except ConfigError as exc:
            _emit({"error": {"type": "ConfigError", "message": str(exc)}}, args.output)
            return 2
        try:
            bundle = run_compute(config)
        except EngineError as exc:
            _emit(
                {"error": {"type": type(exc).__name__, "message": str(exc)}},
                args.output,
            )
            return 3
        _emit(bundle, args.output)
        return 0

    report = run_verify(args.suite)
    _emit(report, args.output)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
