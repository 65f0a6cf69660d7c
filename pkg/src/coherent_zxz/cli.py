"""``coherent-zxz`` command line.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 ``--check`` violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import kernels
from .decomposition import XErrorModel, classify_case, effective_params, erroneous_decomposition
from .fidelity import best_fidelity_analytic, original_fidelity_analytic, original_fidelity_numeric
from .mitigation import SearchConfig, mitigate_closed_form, mitigate_numeric
from .su2 import DomainError, GateParams, canonicalize_params, mat_from_params, phase_invariant_distance
from .sweep import ConfigError, check_table, emit, load_config, parse_angle, recipe_names, run_sweep
from .universality import is_coverable, universality_monte_carlo

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CHECK = 3
OUTPUT_DIR_ENV = "COHERENT_ZXZ_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _angle(text: str) -> float:
    try:
        v = parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"angle must be finite, got {text!r}")
    return v


def _add_target(p):
    p.add_argument("--target", nargs=3, type=_angle, required=True, metavar=("THETA", "PHI", "LAMBDA"))


def _add_error(p):
    p.add_argument(
        "--error",
        nargs=3,
        type=_angle,
        default=[math.pi / 2, 0.0, 0.0],
        metavar=("THETA_X", "PHI_X", "LAMBDA_X"),
        help="physical X(pi/2) parameters (default: ideal)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="coherent-zxz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="effective gate of the erroneous decomposition")
    _add_target(p)
    _add_error(p)

    p = sub.add_parser("fidelity", help="original and best fidelity of a target")
    _add_target(p)
    _add_error(p)

    p = sub.add_parser("mitigate", help="retuned angles for a target")
    _add_target(p)
    _add_error(p)
    p.add_argument("--method", choices=("closed_form", "numeric"), default="closed_form")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("universality", help="analytic and Monte Carlo universality")
    _add_error(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="run a sweep recipe or config file")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--recipe", help="bundled recipe name")
    src.add_argument("--config", help="path to a key = value config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config field")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help=f"output file ('-' for stdout; default ${OUTPUT_DIR_ENV}/<name>.<format> or stdout)")
    p.add_argument("--check", action="store_true", help="exit 3 if an analytic/numeric column pair disagrees")
    p.add_argument("--list-recipes", action="store_true")
    return parser


def _params_json(p) -> dict:
    return {"theta": p[0], "phi": p[1], "lambda": p[2]}


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _cmd_decompose(args) -> int:
    target = GateParams(*args.target)
    e = XErrorModel(*args.error)
    eff = effective_params(target, e)
    _print_json(
        {
            "target": _params_json(target),
            "error": _params_json(e.as_params()),
            "case": classify_case(e).value,
            "effective": {**_params_json(eff.params), "global_phase": eff.global_phase},
            "distance_to_target": phase_invariant_distance(
                erroneous_decomposition(target, e), mat_from_params(target)
            ),
        }
    )
    return EXIT_OK


def _cmd_fidelity(args) -> int:
    target = GateParams(*args.target)
    e = XErrorModel(*args.error)
    _print_json(
        {
            "target": _params_json(target),
            "error": _params_json(e.as_params()),
            "case": classify_case(e).value,
            "f_ori_analytic": original_fidelity_analytic(target, e),
            "f_ori_numeric": original_fidelity_numeric(target, e),
            "f_best_analytic": best_fidelity_analytic(target, e),
            "coverable": is_coverable(target, e),
        }
    )
    return EXIT_OK


def _cmd_mitigate(args) -> int:
    target = GateParams(*args.target)
    e = XErrorModel(*args.error)
    if args.method == "numeric":
        res = mitigate_numeric(target, e, SearchConfig(rng_seed=args.seed))
    else:
        res = mitigate_closed_form(target, e)
    _print_json(
        {
            "target": _params_json(canonicalize_params(*target)),
            "implemented": _params_json(res.implemented),
            "implemented_raw": _params_json(res.implemented_raw),
            "achieved_fidelity": res.achieved_fidelity,
            "coverable": res.coverable,
            "method": res.method.value,
            "converged": res.converged,
        }
    )
    return EXIT_OK


def _cmd_universality(args) -> int:
    e = XErrorModel(*args.error)
    rep = universality_monte_carlo(e, args.samples, args.seed)
    _print_json(
        {
            "error": _params_json(e.as_params()),
            "un_analytic": rep.un_analytic,
            "un_monte_carlo": rep.un_monte_carlo,
            "mc_samples": rep.mc_samples,
            "mc_stderr": rep.mc_stderr,
            "delta_theta": rep.delta_theta,
            "backend": kernels.backend_name(),
        }
    )
    return EXIT_OK


def _destination(args, name: str):
    if args.out is not None:
        return args.out
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if not out_dir:
        return None
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / f"{name}.{args.format}"


def _cmd_sweep(args) -> int:
    if args.list_recipes:
        sys.stdout.write("\n".join(recipe_names()) + "\n")
        return EXIT_OK
    if args.recipe is None and args.config is None:
        raise ConfigError("recipe: give --recipe or --config")
    cfg = load_config(args.recipe, args.config, args.set)
    table = run_sweep(cfg)
    emit(table, args.format, _destination(args, cfg.name))
    if args.check:
        bad = check_table(table)
        for v in bad:
            sys.stderr.write(
                f"check failed: max |{v.column} - {v.reference}| = {v.max_abs_diff:.3e} >= {v.tol:g}\n"
            )
        if bad:
            return EXIT_CHECK
    return EXIT_OK


_COMMANDS = {
    "decompose": _cmd_decompose,
    "fidelity": _cmd_fidelity,
    "mitigate": _cmd_mitigate,
    "universality": _cmd_universality,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError, ValueError) as exc:
        sys.stderr.write(f"coherent-zxz: error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"coherent-zxz: I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
