"""Command-line entry point: budget, optimize, sweep, grid and oracle-check."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from typing import Optional, Sequence

from . import optimizer
from .budget import BudgetEvaluation, LinkGeometry, evaluate_budget
from .config import FileConfig, load_config, load_energy_model
from .explorer import (
    DEFAULT_LMAX_CM,
    DEFAULT_REPORT_LENGTH_CM,
    ViabilityGrid,
    build_grid,
    classify,
    sweep,
    sweep_lengths,
)
from .optimizer import OptimumDuplet, SearchSpace
from .platforms import LinkVariant, PathwaySet, apply_pathways, enumerate_variants, platform_by_name

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

GRID_COLUMNS = [
    "platform",
    "minimized_loss",
    "wide_fsr",
    "increased_maop",
    "class",
    "n_lambda",
    "br_gbps",
    "adr_gbps",
    "max_viable_cm",
    "epb_pj",
]
PLOT_COLUMNS = "length_cm aggregate_gbps epb_pj n_lambda error_db"


class ValidationError(Exception):
    pass


class OutputError(Exception):
    pass


def db(x: Optional[float]):
    if x is None:
        return "unbounded"
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return round(x, 3)


def gbps(x: float):
    return int(x) if float(x).is_integer() else x


def fmt_gbps(x: float) -> str:
    return str(gbps(x))


def fmt_length(x: float) -> str:
    return f"{x:g}"


# -- report bodies ---------------------------------------------------------


def _variant_doc(variant: LinkVariant) -> dict:
    s = variant.pathways
    return {
        "platform": variant.base.name,
        "label": variant.name,
        "pathways": {
            "minimized_loss": s.minimized_loss,
            "wide_fsr": s.wide_fsr,
            "increased_maop": s.increased_maop,
        },
    }


def budget_doc(variant: LinkVariant, geom: LinkGeometry, ev: BudgetEvaluation) -> dict:
    return {
        "variant": _variant_doc(variant),
        "length_cm": geom.length,
        "coupler_count": geom.coupler_count,
        "n_lambda": ev.n_lambda,
        "br_gbps": gbps(ev.br_gbps),
        "opb_per_wavelength": db(ev.opb_per_wavelength),
        "opb_per_waveguide": db(ev.opb_per_waveguide),
        "loss": {
            "coupling": db(ev.loss.coupling),
            "propagation": db(ev.loss.propagation),
            "modulator_il": db(ev.loss.modulator_il),
            "filter_il": db(ev.loss.filter_il),
            "total": db(ev.loss.total),
        },
        "penalty": {
            "modulator_array": db(ev.penalty.modulator_array),
            "filter_array": db(ev.penalty.filter_array),
            "filter_crosstalk": db(ev.penalty.filter_crosstalk),
            "filter_truncation": db(ev.penalty.filter_truncation),
            "total": db(ev.penalty.total),
        },
        "p_loss_total": db(ev.p_loss_total),
        "dwdm_term": db(10.0 * math.log10(ev.n_lambda)),
        "per_wavelength_ok": ev.per_wavelength_ok,
        "per_waveguide_ok": ev.per_waveguide_ok,
        "opb_margin": db(ev.opb_margin),
        "feasible": ev.feasible,
    }


def duplet_doc(d: OptimumDuplet) -> dict:
    return {
        "feasible": d.feasible,
        "n_lambda": d.n_lambda,
        "br_gbps": gbps(d.br_gbps),
        "aggregate_bw_gbps": gbps(d.aggregate_bw_gbps),
        "error_db": db(d.error_db),
        "epb_pj": round(d.epb_pj, 3),
    }


def grid_rows(grid: ViabilityGrid) -> list[dict]:
    rows = []
    for (platform, s), row in grid.rows.items():
        d = row.duplet
        rows.append(
            {
                "platform": platform,
                "minimized_loss": str(s.minimized_loss).lower(),
                "wide_fsr": str(s.wide_fsr).lower(),
                "increased_maop": str(s.increased_maop).lower(),
                "class": row.viability.value,
                "n_lambda": d.n_lambda,
                "br_gbps": fmt_gbps(d.br_gbps),
                "adr_gbps": fmt_gbps(d.aggregate_bw_gbps),
                "max_viable_cm": fmt_length(row.max_viable_length_cm),
                "epb_pj": f"{d.epb_pj:.3f}",
            }
        )
    return rows


def grid_csv(grid: ViabilityGrid) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=GRID_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(grid_rows(grid))
    return buf.getvalue()


def grid_doc(grid: ViabilityGrid) -> dict:
    rows = []
    for (platform, s), row in grid.rows.items():
        rows.append(
            {
                **_variant_doc(row.variant),
                "class": row.viability.value,
                "max_viable_cm": row.max_viable_length_cm,
                "report_length_cm": grid.report_length_cm,
                "duplet": duplet_doc(row.duplet),
                "sweep": [{"length_cm": length, **duplet_doc(d)} for length, d in row.sweep.points],
            }
        )
    return {"report_length_cm": grid.report_length_cm, "rows": rows}


def sweep_plot(result, stamp: Optional[str] = None) -> str:
    viability, max_viable = classify(result)
    v = result.variant
    lines = [
        f"# variant: {v.name}",
        f"# platform: {v.base.name}",
        f"# pathways: {v.pathways.short}",
        f"# class: {viability.value}",
        f"# max_viable_cm: {fmt_length(max_viable)}",
    ]
    if stamp:
        lines.append(f"# generated: {stamp}")
    lines.append(f"# columns: {PLOT_COLUMNS}")
    for length, d in result.points:
        lines.append(
            f"{fmt_length(length)} {fmt_gbps(d.aggregate_bw_gbps)} {d.epb_pj:.3f} {d.n_lambda} {d.error_db:.3f}"
        )
    return "\n".join(lines) + "\n"


def sweep_doc(result) -> dict:
    viability, max_viable = classify(result)
    return {
        "variant": _variant_doc(result.variant),
        "class": viability.value,
        "max_viable_cm": max_viable,
        "points": [{"length_cm": length, **duplet_doc(d)} for length, d in result.points],
    }


def sweep_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLOT_COLUMNS.split())
    for length, d in result.points:
        writer.writerow(
            [fmt_length(length), fmt_gbps(d.aggregate_bw_gbps), f"{d.epb_pj:.3f}", d.n_lambda, f"{d.error_db:.3f}"]
        )
    return buf.getvalue()


# -- argument handling -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--platforms-file", help="JSON config with 'platforms' (and optional 'energy_model')")
    common.add_argument("--energy-model", help="JSON file with energy-model coefficients")
    common.add_argument("--min-spacing-linewidths", type=float, help="channel-spacing floor in filter linewidths")
    common.add_argument("--coupler-count", type=int, help="grating couplers on the link (default 1)")
    common.add_argument("--br-sweep", action="store_true", help="search bit-rates in 0.5 Gb/s steps")
    common.add_argument("--format", choices=["json", "csv", "plot"])
    common.add_argument("--out", help="write data here instead of standard output")
    common.add_argument("--stamp", action="store_true", help="add a generation timestamp to metadata")

    variant = argparse.ArgumentParser(add_help=False)
    variant.add_argument("--platform", required=True)
    group = variant.add_mutually_exclusive_group()
    group.add_argument("--pathways", default="vanilla", help="ml,wf,im | vanilla | all")
    group.add_argument("--vanilla", action="store_const", const="vanilla", dest="pathways")

    parser = argparse.ArgumentParser(prog="siphlink", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", parents=[common, variant], help="power budget of one duplet")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--nlambda", type=int, required=True)
    p.add_argument("--br", type=float)

    p = sub.add_parser("optimize", parents=[common, variant], help="optimal duplet at one length")
    p.add_argument("--length", type=float, required=True)

    p = sub.add_parser("sweep", parents=[common, variant], help="optimal duplet across lengths")
    p.add_argument("--lmax", type=float, default=DEFAULT_LMAX_CM)
    p.add_argument("--step", type=float, default=1.0)

    p = sub.add_parser("grid", parents=[common], help="viability grid over all variants")
    p.add_argument("--lmax", type=float, default=DEFAULT_LMAX_CM)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--report-length", type=float, default=DEFAULT_REPORT_LENGTH_CM)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("oracle-check", parents=[common], help="heuristic vs exhaustive search")
    p.add_argument("--lmax", type=float, default=DEFAULT_LMAX_CM)
    return parser


def _file_config(args) -> FileConfig:
    cfg = load_config(args.platforms_file) if args.platforms_file else FileConfig()
    if args.energy_model:
        cfg.energy_model = load_energy_model(args.energy_model)
    return cfg


def _search(args, cfg: FileConfig) -> SearchSpace:
    spacing = args.min_spacing_linewidths
    if spacing is None:
        spacing = cfg.min_spacing_linewidths
    if spacing is None:
        spacing = optimizer.DEFAULT_MIN_SPACING_LINEWIDTHS
    return SearchSpace(min_spacing_linewidths=spacing, br_sweep=args.br_sweep)


def _coupler_count(args, cfg: FileConfig) -> int:
    count = args.coupler_count if args.coupler_count is not None else cfg.coupler_count
    count = 1 if count is None else count
    if count < 0:
        raise ValidationError("coupler count must be non-negative")
    return count


def _variant(args, cfg: FileConfig) -> LinkVariant:
    try:
        platform = platform_by_name(args.platform, cfg.platforms)
    except KeyError as exc:
        raise ValidationError(exc.args[0]) from None
    try:
        pathways = PathwaySet.parse(args.pathways)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    return apply_pathways(platform, pathways)


def _stamp(args) -> Optional[str]:
    return datetime.now(timezone.utc).isoformat(timespec="seconds") if args.stamp else None


def _json(doc: dict, args) -> str:
    stamp = _stamp(args)
    if stamp:
        doc = {"meta": {"generated": stamp}, **doc}
    return json.dumps(doc, indent=2) + "\n"


def _one_row_csv(doc: dict, *sections: str) -> str:
    """Header plus one row; named sub-dicts are flattened with their key as prefix."""
    flat = {k: v for k, v in doc.items() if not isinstance(v, dict)}
    for name in sections:
        flat.update({f"{name}_{k}": v for k, v in doc[name].items()})
    flat = {k: str(v).lower() if isinstance(v, bool) else v for k, v in flat.items()}
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


def cmd_budget(args, cfg: FileConfig) -> tuple[str, int]:
    if args.format == "plot":
        raise ValidationError("budget supports --format csv or json")
    variant = _variant(args, cfg)
    if args.nlambda < 1:
        raise ValidationError(f"--nlambda must be >= 1, got {args.nlambda}")
    geom = LinkGeometry(args.length, _coupler_count(args, cfg))
    br = args.br if args.br is not None else _search(args, cfg).bitrates(variant)[-1]
    ev = evaluate_budget(variant, geom, args.nlambda, br)
    doc = budget_doc(variant, geom, ev)
    if args.format == "csv":
        return _one_row_csv(doc, "loss", "penalty"), EXIT_OK
    return _json(doc, args), EXIT_OK


def cmd_optimize(args, cfg: FileConfig) -> tuple[str, int]:
    if args.format == "plot":
        raise ValidationError("optimize supports --format csv or json")
    variant = _variant(args, cfg)
    geom = LinkGeometry(args.length, _coupler_count(args, cfg))
    d = optimizer.optimize(variant, geom, _search(args, cfg), cfg.energy_model)
    doc = {"variant": _variant_doc(variant), "length_cm": geom.length, "duplet": duplet_doc(d)}
    if d.feasible:
        doc["budget"] = budget_doc(variant, geom, evaluate_budget(variant, geom, d.n_lambda, d.br_gbps))
    if args.format == "csv":
        flat = {"platform": variant.base.name, "pathways": variant.pathways.short, "length_cm": geom.length}
        return _one_row_csv({**flat, **doc["duplet"]}), EXIT_OK
    return _json(doc, args), EXIT_OK


def cmd_sweep(args, cfg: FileConfig) -> tuple[str, int]:
    variant = _variant(args, cfg)
    result = sweep(variant, args.lmax, args.step, _search(args, cfg), cfg.energy_model, _coupler_count(args, cfg))
    fmt = args.format or "plot"
    if fmt == "json":
        return _json(sweep_doc(result), args), EXIT_OK
    if fmt == "csv":
        return sweep_csv(result), EXIT_OK
    return sweep_plot(result, _stamp(args)), EXIT_OK


def cmd_grid(args, cfg: FileConfig) -> tuple[str, int]:
    grid = build_grid(
        cfg.platforms,
        l_max=args.lmax,
        report_length_cm=args.report_length,
        step=args.step,
        search=_search(args, cfg),
        energy=cfg.energy_model,
        coupler_count=_coupler_count(args, cfg),
        workers=args.workers,
    )
    if args.format == "json":
        return _json(grid_doc(grid), args), EXIT_OK
    if args.format == "plot":
        raise ValidationError("grid supports --format csv or json")
    return grid_csv(grid), EXIT_OK


def cmd_oracle_check(args, cfg: FileConfig) -> tuple[str, int]:
    search = _search(args, cfg)
    coupler_count = _coupler_count(args, cfg)
    lengths = sweep_lengths(args.lmax)
    total = matched = 0
    first = None
    for variant in enumerate_variants(cfg.platforms):
        for length in lengths:
            geom = LinkGeometry(length, coupler_count)
            fast = optimizer.optimize(variant, geom, search, cfg.energy_model)
            slow = optimizer.brute_force_optimum(variant, geom, search, cfg.energy_model)
            total += 1
            if fast == slow:
                matched += 1
            elif first is None:
                first = f"mismatch: {variant.name} at {fmt_length(length)} cm: optimize={fast} brute_force={slow}"
    lines = [f"{matched}/{total} match"]
    if first:
        lines.insert(0, first)
    return "\n".join(lines) + "\n", EXIT_OK if matched == total else EXIT_MISMATCH


COMMANDS = {
    "budget": cmd_budget,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "grid": cmd_grid,
    "oracle-check": cmd_oracle_check,
}


def _emit(text: str, out: Optional[str]) -> None:
    if not out:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc.strerror or exc}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _file_config(args)
        text, code = COMMANDS[args.command](args, cfg)
        _emit(text, args.out)
        return code
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OutputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
