"""Command-line interface.

Commands: check, assemblage, region, figure, validate.  Input channels and
POVMs are JSON specs (see ``channels.channel_from_spec``); reports are
JSON or CSV with every tolerance echoed in the header so runs are
reproducible.  Exit codes for ``check``: 0 compatible-certified,
2 incompatible-certified, 3 undetermined, 1 usage or IO error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .assemblage import classify
from .channels import (
    ChannelValidationError,
    PovmValidationError,
    channel_from_spec,
    povm_from_spec,
    validate_povm,
)
from .criteria import (
    CRITERION_MARGIN,
    VerdictKind,
    oracle_verdict,
    resolve_bases,
    zhu_criterion_channels,
)
from .region import (
    dataset_to_csv,
    emit_figure1_data,
    emit_figure2_data,
    ray_directions,
    region_report_to_dataset,
    scan_rays,
)
from .sdp import (
    DEFAULT_ORACLE_BUDGET,
    DOMINATION_GAP_TOL,
    FEASIBILITY_GAP_COARSE,
    Feasibility,
    solve_joint_channel,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCOMPATIBLE = 2
EXIT_UNDETERMINED = 3


class CliError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            f"malformed JSON in {path}: line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}"
        ) from exc


def _load_channel(path: str):
    try:
        return channel_from_spec(_load_json(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"bad channel spec {path}: {exc}") from exc


def _load_bases(arg: str, d: int, count: int):
    if arg in ("auto", "canonical-fourier"):
        return resolve_bases(d, count, arg)
    spec = _load_json(arg)
    try:
        from .channels import _matrix_from_pairs
        from .linalg import check_basis

        bases = [check_basis(_matrix_from_pairs(rows)) for rows in spec["bases"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"bad bases spec {arg}: {exc}") from exc
    if len(bases) != count:
        raise CliError(f"bases spec {arg} holds {len(bases)} bases, need {count}")
    return bases, [f"user-{i}" for i in range(count)]


def _tolerances(args) -> dict:
    return {
        "criterion_margin": args.margin,
        "domination_gap": args.sdp_gap,
        "oracle_gap": getattr(args, "oracle_gap", FEASIBILITY_GAP_COARSE),
        "oracle_budget": getattr(args, "budget", DEFAULT_ORACLE_BUDGET),
        "validation_tol": 1e-9,
    }


def _emit(args, payload) -> None:
    if isinstance(payload, dict) and getattr(args, "format", "json") == "csv":
        text = dataset_to_csv(payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verdict_dict(v) -> dict:
    return {
        "kind": v.kind.value,
        "value": v.value,
        "margin": v.margin,
        "certificate": v.certificate,
    }


def _cmd_check(args) -> int:
    channels = [_load_channel(p) for p in args.specs]
    d = channels[0].d
    for c in channels:
        if c.d != d:
            raise CliError("all channels must share one square dimension")
    bases, labels = _load_bases(args.bases, d, len(channels))
    verdict = zhu_criterion_channels(
        channels, bases, basis_labels=labels, margin=args.margin,
        sdp_gap=args.sdp_gap,
    )
    report = {
        "command": "check",
        "tolerances": _tolerances(args),
        "channels": [c.label for c in channels],
        "criterion": _verdict_dict(verdict),
    }
    code = (
        EXIT_INCOMPATIBLE
        if verdict.kind is VerdictKind.INCOMPATIBLE_CERTIFIED
        else EXIT_UNDETERMINED
    )
    if args.oracle:
        result = solve_joint_channel(
            channels, budget=args.budget, coarse_gap=args.oracle_gap
        )
        report["oracle"] = {
            "status": result.status.value,
            "lambda_star": result.lambda_star,
            "gap": result.gap,
            "iterations": result.iterations,
        }
        report["oracle_verdict"] = _verdict_dict(
            oracle_verdict(result.lambda_star, result.status)
        )
        if result.status is Feasibility.FEASIBLE:
            if verdict.kind is VerdictKind.INCOMPATIBLE_CERTIFIED:
                raise CliError(
                    "criterion and oracle disagree; this indicates a bug, "
                    "please report the input specs"
                )
            code = EXIT_OK
        elif result.status is Feasibility.INFEASIBLE:
            code = EXIT_INCOMPATIBLE
    _emit(args, report)
    return code


def _cmd_assemblage(args) -> int:
    channels = [_load_channel(p) for p in args.specs]
    if not 1 <= args.k <= len(channels):
        raise CliError(f"k={args.k} out of range for {len(channels)} channels")
    report = classify(
        channels,
        args.k,
        bases_policy=args.bases,
        use_oracle=args.oracle,
        margin=args.margin,
        budget=args.budget,
    )
    payload = {
        "command": "assemblage",
        "tolerances": _tolerances(args),
        "n": report.n,
        "k": report.k,
        "labels": sorted(label.value for label in report.labels),
        "subsets": {
            ",".join(map(str, s)): _verdict_dict(v)
            for s, v in report.subset_verdicts.items()
        },
        "higher_subsets": {
            ",".join(map(str, s)): _verdict_dict(v)
            for s, v in report.higher_verdicts.items()
        },
        "undetermined_subsets": [
            ",".join(map(str, s)) for s in report.undetermined_subsets
        ],
    }
    _emit(args, payload)
    return EXIT_OK


def _cmd_region(args) -> int:
    channels = [_load_channel(p) for p in args.specs]
    directions = ray_directions(len(channels), args.rays)
    report = scan_rays(
        channels,
        directions,
        use_oracle=args.oracle,
        bisect_tol=args.bisect_tol,
        margin=args.margin,
        budget=args.budget,
        jobs=args.jobs,
    )
    dataset = region_report_to_dataset(report)
    dataset["meta"]["tolerances"] = _tolerances(args)
    _emit(args, dataset)
    ok = all(
        r.oracle_radius is None or r.oracle_radius <= r.criterion_radius + 1e-4
        for r in report.rays
    )
    sys.stderr.write(
        f"region: {len(report.rays)} rays, outer-bound check "
        f"{'passed' if ok else 'FAILED'}\n"
    )
    return EXIT_OK if ok else EXIT_USAGE


def _cmd_figure(args) -> int:
    if args.name == "fig2":
        ds = [int(x) for x in args.d.split(",") if x]
        dataset = emit_figure2_data(ds, args.resolution)
        check = all(row[2] <= row[3] + 1e-9 for row in dataset["rows"])
        label = "outer-bound"
    else:
        if not args.schur_b:
            raise CliError("figure fig1 needs --B pointing to a Schur matrix spec")
        from .channels import _matrix_from_pairs

        b = _matrix_from_pairs(_load_json(args.schur_b)["B"])
        c = (
            _matrix_from_pairs(_load_json(args.schur_c)["B"])
            if args.schur_c
            else b
        )
        dataset = emit_figure1_data(
            b, c, args.resolution, use_oracle=args.oracle, budget=args.budget
        )
        check = all(
            (row[3] is None) or (not row[3]) or row[2]
            for row in dataset["rows"]
        )
        label = "soundness"
    dataset["meta"]["tolerances"] = _tolerances(args)
    _emit(args, dataset)
    sys.stderr.write(
        f"figure {args.name}: {len(dataset['rows'])} rows, {label} check "
        f"{'passed' if check else 'FAILED'}\n"
    )
    return EXIT_OK if check else EXIT_USAGE


def _cmd_validate(args) -> int:
    failures = []
    for path in args.specs:
        spec = _load_json(path)
        try:
            if isinstance(spec, dict) and spec.get("kind") == "povm":
                p = povm_from_spec(spec)
                validate_povm(p.effects, p.d)
            else:
                channel_from_spec(spec)
        except (ChannelValidationError, PovmValidationError, ValueError,
                KeyError, TypeError) as exc:
            failures.append({"spec": path, "error": str(exc)})
    payload = {
        "command": "validate",
        "valid": not failures,
        "violations": failures,
    }
    _emit(args, payload)
    return EXIT_OK if not failures else EXIT_INCOMPATIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qincompat",
        description="decide and certify incompatibility of quantum channels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, oracle=True):
        p.add_argument("--margin", type=float, default=CRITERION_MARGIN,
                       help="criterion certification margin above d")
        p.add_argument("--sdp-gap", type=float, default=DOMINATION_GAP_TOL,
                       help="criterion SDP duality gap target")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if oracle:
            p.add_argument("--oracle", action="store_true",
                           help="also run the exact joint-channel oracle")
            p.add_argument("--oracle-gap", type=float,
                           default=FEASIBILITY_GAP_COARSE,
                           help="oracle certified-gap target")
            p.add_argument("--budget", type=int, default=DEFAULT_ORACLE_BUDGET,
                           help="oracle size budget (N * dim^2)")

    p = sub.add_parser("check", help="criterion and oracle verdict for channels")
    p.add_argument("specs", nargs="+", help="channel spec JSON files")
    p.add_argument("--bases", default="auto",
                   help="'auto', 'canonical-fourier', or a bases JSON file")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("assemblage", help="classify K-subsets of a channel tuple")
    p.add_argument("specs", nargs="+")
    p.add_argument("--k", type=int, required=True, help="subset size")
    p.add_argument("--bases", default="auto",
                   choices=["auto", "canonical-fourier"])
    common(p)
    p.set_defaults(func=_cmd_assemblage)

    p = sub.add_parser("region", help="bisect compatibility region boundaries")
    p.add_argument("specs", nargs="+")
    p.add_argument("--rays", type=int, default=64)
    p.add_argument("--bisect-tol", type=float, default=1e-3)
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("QINCOMPAT_JOBS", "1")))
    common(p)
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("figure", help="emit figure datasets")
    p.add_argument("name", choices=["fig1", "fig2"])
    p.add_argument("--d", default="2,5,20", help="fig2: comma-separated dimensions")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--B", dest="schur_b", help="fig1: Schur matrix spec JSON")
    p.add_argument("--C", dest="schur_c", help="fig1: second Schur matrix spec")
    common(p)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("validate", help="run channel/POVM invariants on specs")
    p.add_argument("specs", nargs="+")
    p.add_argument("--output")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_validate, margin=CRITERION_MARGIN,
                   sdp_gap=DOMINATION_GAP_TOL)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract reserves 1
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())
