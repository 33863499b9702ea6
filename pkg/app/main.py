"""Command-line entry point.

    python run.py [--config FILE] [--seed N] [--out DIR] [--threads N] [--log-level L] <subcommand> ...

Payloads (JSON, JSONL, CSV) go to stdout; failures print one JSON line
``{"error": ..., "message": ...}`` to stderr. Exit codes: 0 success,
1 validation failure, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from app.config.settings import RunConfig
from app.core.errors import (
    ConfigurationError,
    ThermoelasticError,
    ThermoelasticNumericalError,
    ThermoelasticValidationError,
)
from app.core.logger import configure_logging
from app.models.grid import Grid
from app.services.exporters.results_exporter import ResultsExporter, to_jsonable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors as ConfigurationError (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--config", type=Path, default=default(None), help="YAML run configuration")
    parser.add_argument("--seed", type=int, default=default(None), help="Root RNG seed (u64)")
    parser.add_argument("--out", type=Path, default=default(None), help="Output directory")
    parser.add_argument("--threads", type=int, default=default(None), help="Worker threads")
    parser.add_argument("--log-level", default=default("INFO"), help="Logging level (default INFO)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="run.py", description="Contact discontinuities in nonisentropic thermoelasticity")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")
    sub.required = True

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _global_flags(p, suppress=True)
        return p

    add("background", help_text="Print the background state as JSON")

    p = add("stability", help_text="Evaluate the stability condition (JSON) or sweep it (CSV)")
    p.add_argument("--dim", type=int, choices=(2, 3))
    p.add_argument("--f11p", type=float)
    p.add_argument("--f11m", type=float)
    p.add_argument("--f22", type=float)
    p.add_argument("--f33", type=float)
    p.add_argument("--sweep-spec", type=Path)

    p = add("check-hyperbolicity", help_text="Structure and eigenstructure suites")
    p.add_argument("--quick", action="store_true", help="Reduced sample counts")

    add("rigidity", help_text="Newton probe of the jump conditions, JSONL per trial")

    p = add("verify-identities", help_text="Identity suites, JSONL per identity")
    p.add_argument("--quick", action="store_true", help="Reduced sample counts and grids")
    p.add_argument("--no-solver", action="store_true", help="Skip suites that time-step")

    add("simulate", help_text="Run the linear solver and write the ledger")

    p = add("sweep", help_text="Classification sweep of the stability condition")
    p.add_argument("--sweep-spec", type=Path)
    p.add_argument("--pdf", action="store_true")

    add("probe-tame", help_text="Tame-estimate ratios over grids and jump fractions")
    add("probe-trace", help_text="Trace inequalities on random band-limited fields")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Read the config file, apply the command-line overrides and validate."""
    config = RunConfig.from_yaml(args.config) if args.config is not None else RunConfig()
    config.subcommand = args.subcommand
    if args.seed is not None:
        config.seed = args.seed
    if args.threads is not None:
        config.threads = args.threads
    if args.out is not None:
        config.output.out_dir = str(args.out)
    if args.subcommand == "stability":
        if args.dim is not None:
            config.material.dim = args.dim
        bg = config.background
        for attr, flag in (("f11_plus", "f11p"), ("f11_minus", "f11m"), ("f22", "f22"), ("f33", "f33")):
            value = getattr(args, flag)
            if value is not None:
                setattr(bg, attr, value)
    if getattr(args, "pdf", False):
        config.output.pdf = True
    return config.validate()


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(to_jsonable(payload), sort_keys=True) + "\n")


def _emit_lines(records) -> None:
    for record in records:
        _emit(record)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_background(config: RunConfig, args, out: Path) -> None:
    bg = config.make_background()
    ResultsExporter.export_json(bg.to_dict(), out / "background.json")
    _emit(bg.to_dict())


def _sweep_rows(config: RunConfig, spec_path: Optional[Path]):
    from app.services.stability.sweep import SweepSpec, sweep

    if spec_path is None:
        raise ConfigurationError("a sweep needs --sweep-spec")
    return sweep(SweepSpec.from_yaml(spec_path), threads=config.threads)


def cmd_stability(config: RunConfig, args, out: Path) -> None:
    from app.services.stability.condition import Stretches, evaluate_stretches
    from app.services.stability.sweep import write_sweep_csv

    if args.sweep_spec is not None:
        path = write_sweep_csv(_sweep_rows(config, args.sweep_spec), out / "sweep.csv")
        sys.stdout.write(path.read_text(encoding="utf-8"))
        return
    dim = config.material.dim
    bg = config.background
    verdict = evaluate_stretches(Stretches(dim, bg.f11_plus, bg.f11_minus, bg.f22, bg.f33 if dim == 3 else None))
    ResultsExporter.export_json(verdict.to_dict(), out / "stability.json")
    _emit(verdict.to_dict())


def cmd_sweep(config: RunConfig, args, out: Path) -> None:
    from app.services.stability.sweep import write_sweep_csv

    rows = _sweep_rows(config, args.sweep_spec)
    csv_path = write_sweep_csv(rows, out / "sweep.csv")
    summary = {
        "points": len(rows),
        "satisfied": sum(1 for r in rows if r.verdict.satisfied),
        "on_boundary": sum(1 for r in rows if r.verdict.on_boundary),
        "csv": str(csv_path),
    }
    if config.output.pdf:
        from app.services.exporters.pdf_report_generator import PDFReportGenerator

        summary["pdf"] = str(PDFReportGenerator().generate_sweep_report(rows, out / "sweep.pdf"))
    _emit(summary)


def _suite_sizes(quick: bool):
    from app.services.verification.identity_suite import SuiteSizes

    return SuiteSizes.reduced() if quick else SuiteSizes()


def cmd_check_hyperbolicity(config: RunConfig, args, out: Path) -> None:
    from app.services.verification.identity_suite import hyperbolicity_suites, write_identity_report

    records = hyperbolicity_suites(config.material_params(), config.seed, _suite_sizes(args.quick))
    write_identity_report(records, out / "hyperbolicity.jsonl")
    _emit({
        "dim": config.material.dim,
        "passed": all(r.passed for r in records),
        "identities": {r.name: {"residual": r.residual, "passed": r.passed, "samples": r.samples}
                       for r in records},
    })


def cmd_rigidity(config: RunConfig, args, out: Path) -> None:
    from app.services.interface.rigidity import rigidity_probe

    probe = config.probe
    report = rigidity_probe(config.make_background().state(+1), config.material_params(),
                            trials=probe.trials, seed=config.seed, spread=probe.spread,
                            entropy_jump=probe.entropy_jump, threads=config.threads)
    trials = [t.to_dict() for t in report.trials]
    ResultsExporter.export_jsonl(trials, out / "rigidity.jsonl")
    ResultsExporter.export_json(report.summary(), out / "rigidity_summary.json")
    _emit_lines(trials)


def cmd_verify_identities(config: RunConfig, args, out: Path) -> None:
    from app.services.verification.identity_suite import identity_suites, write_identity_report

    records = identity_suites(config.material_params(), config.seed, _suite_sizes(args.quick),
                              threads=config.threads, include_solver=not args.no_solver)
    write_identity_report(records, out / "identities.jsonl")
    _emit_lines(r.to_dict() for r in records)


def cmd_simulate(config: RunConfig, args, out: Path) -> None:
    from app.services.solver.integrator import run
    from app.services.stability.condition import evaluate_condition

    grid = config.make_grid()
    background = config.make_background()
    verdict = evaluate_condition(background)
    if not verdict.satisfied:
        logger.warning("Stability condition not satisfied; the ledger is an observation only")
    basic = config.make_basic_state(grid, background)
    sv = config.solver
    result = run(basic, config.make_sources(grid), sv.final_time, s=sv.s, record_interval=sv.record_interval,
                 homogenized=sv.homogenized,
                 snapshot_dir=out / "snapshots" if config.output.snapshots else None)
    ResultsExporter.export_ledger_to_csv(result.ledger, out / "ledger.csv")
    summary = result.summary()
    summary["condition"] = verdict.status
    summary["K"] = float(basic.K)
    ResultsExporter.export_json(summary, out / "summary.json")
    if config.output.pdf:
        from app.services.exporters.pdf_report_generator import PDFReportGenerator

        PDFReportGenerator().generate_run_report(result.ledger, summary, out / "report.pdf")
    _emit(summary)


def cmd_probe_tame(config: RunConfig, args, out: Path) -> None:
    from app.services.solver.probes import jump_family_probe, tame_estimate_probe

    probe = config.probe
    dim = config.material.dim
    base = probe.grids[0]
    grids = [Grid(dim, n1, config.grid.n_tan * n1 // base, config.grid.x_max, config.grid.cfl)
             for n1 in probe.grids]
    sv = config.solver
    grid_family = tame_estimate_probe(config.make_basic_state, config.make_sources, grids, sv.final_time,
                                      s=sv.s, homogenized=sv.homogenized)
    f11p = config.background.f11_plus

    def basic_for(fraction: float, grid: Grid):
        return config.make_basic_state(grid, config.make_background(f11p * (1.0 - fraction)))

    jump_family = jump_family_probe(basic_for, config.make_sources, config.make_grid(), probe.fractions,
                                    sv.final_time, homogenized=sv.homogenized)
    payload = {"grid_family": grid_family.to_dict(), "jump_family": jump_family.to_dict()}
    ResultsExporter.export_json(payload, out / "probe_tame.json")
    _emit(payload)


def cmd_probe_trace(config: RunConfig, args, out: Path) -> None:
    from app.services.solver.probes import trace_inequality_probe

    probe = config.probe
    report = trace_inequality_probe(config.make_grid(), samples=probe.samples, seed=config.seed,
                                    bandwidth=probe.bandwidth)
    ResultsExporter.export_json(report.to_dict(), out / "probe_trace.json")
    _emit(report.to_dict())


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace, Path], None]] = {
    "background": cmd_background,
    "stability": cmd_stability,
    "check-hyperbolicity": cmd_check_hyperbolicity,
    "rigidity": cmd_rigidity,
    "verify-identities": cmd_verify_identities,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "probe-tame": cmd_probe_tame,
    "probe-trace": cmd_probe_trace,
}


def _fail(exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except ConfigurationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        configure_logging(args.log_level)
    except ValueError as exc:
        return _fail(ConfigurationError(str(exc)), EXIT_VALIDATION)

    try:
        config = resolve_config(args)
        out = Path(config.output.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        config.save_yaml(out / "resolved_config.yaml")
        logger.info(f"Running {config.subcommand} (seed {config.seed}, threads {config.threads}) into {out}")
        COMMANDS[config.subcommand](config, args, out)
    except ThermoelasticValidationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except ThermoelasticNumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except ThermoelasticError as exc:
        return _fail(exc, EXIT_VALIDATION)
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())
