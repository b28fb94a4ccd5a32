"""
Batch front end: `ptlab <command> [flags]`.

Exit status 0 on success, 2 for an invalid job, 3 when the numerics gave
no usable result. Reports are JSON (sorted keys, complex as [re, im]) or
CSV, and never contain timestamps; run logs go to --log-dir.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from ptlab.correlation import continuity_residual, correlation_field, current_constancy, pt_overlap, write_correlation_csv
from ptlab.errors import ConfigError, NumericalError, PtLabError
from ptlab.models.config import COMMANDS, JobConfig, load_config_file
from ptlab.models.grid import Grid
from ptlab.models.report import SpectrumResult
from ptlab.potential import PotentialSpec, load_tabulated, scarf2, scarf2_strengths
from ptlab.scattering import (
    FluxFormula,
    ReflectionVariant,
    amplitudes,
    duality_defect,
    flux_deviation_analytic,
    flux_deviation_measured,
    identity_defects,
    s_from_m,
    scarf2_analytic_amplitudes,
    scatter_report,
    scattering_state,
    transfer_matrix,
)
from ptlab.spectrum import SearchBox, eigenfunction, find_eigenvalues, phase_classify, spectrum_report
from ptlab.sweep import parse_range, run_sweep
from ptlab.utils.logging import RunLogger, setup_run_logging
from ptlab.utils.persistence import dumps, write_csv, write_json
from ptlab.utils.validation import require_valid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class NoUsableResult(NumericalError):
    """Every point of a job failed"""


def build_potential(config: JobConfig) -> PotentialSpec:
    pot = config.potential
    if pot.kind == "custom":
        return load_tabulated(pot.custom)
    if pot.kind == "scarf2-strengths":
        return scarf2_strengths(pot.depth, pot.coupling, pot.alpha, pot.v_asym)
    return scarf2(pot.a_pot, pot.b_pot, pot.alpha)


def build_grid(config: JobConfig, spec: PotentialSpec) -> Grid:
    g = config.grid
    return Grid.for_potential(spec, half_width=g.half_width, n_points=g.n_points, step=g.step, eps_asym=g.eps_asym)


def k_values(config: JobConfig) -> List[float]:
    values = [float(k) for k in config.sweep.k]
    if config.sweep.k_range:
        values += parse_range(config.sweep.k_range)
    return sorted(set(values))


def search_box(config: JobConfig, spec: PotentialSpec) -> SearchBox:
    """--emin/--emax over the potential's default box; an empty result is a config error"""
    default = SearchBox.for_potential(spec, im_extent=config.sweep.eimax)
    sweep = config.sweep
    re_min = default.re_min if sweep.emin is None else float(sweep.emin)
    re_max = default.re_max if sweep.emax is None else float(sweep.emax)
    if not re_min < re_max:
        field_name = "sweep.emin" if sweep.emin is not None else "sweep.emax"
        raise ConfigError(f"search box is empty: Re E from {re_min} to {re_max}", field=field_name)
    return SearchBox(re_min, re_max, -float(sweep.eimax), float(sweep.eimax))


def solve_spectrum(config: JobConfig, spec: PotentialSpec, grid: Grid) -> SpectrumResult:
    tolerances = config.tolerances
    return find_eigenvalues(
        spec, search_box(config, spec), int(config.sweep.seeds), tolerances.tol, grid,
        mismatch_tol=tolerances.mismatch, imag_tol=tolerances.imag, pair_tol=tolerances.pair,
    )


def _failure(param_name: str, param: float, error: Exception) -> Dict[str, Any]:
    return {param_name: param, "error": type(error).__name__, "message": str(error)}


def _sweep(config: JobConfig, run_logger: RunLogger, param_name: str, params, func) -> Tuple[List[Any], List[Dict]]:
    results, failures = [], []
    for outcome in run_sweep(func, params, max_workers=int(config.sweep.workers)):
        target = f"{param_name}={outcome.param}"
        if outcome.ok:
            results.append(outcome.value)
            run_logger.log_step(target, True, outcome.execution_time)
        else:
            failures.append(_failure(param_name, outcome.param, outcome.error))
            run_logger.log_step(target, False, outcome.execution_time, str(outcome.error))
    if not results:
        raise NoUsableResult(f"all {len(failures)} {param_name} values failed", failures)
    return results, failures


def run_scatter(config: JobConfig, run_logger: RunLogger) -> Dict:
    spec = build_potential(config)
    grid = build_grid(config, spec)
    results, failures = _sweep(config, run_logger, "k", k_values(config), lambda k: scatter_report(spec, k, grid))
    return {"command": "scatter", "params": spec.describe(), "grid": grid.to_dict(),
            "results": results, "failures": failures}


def run_identities(config: JobConfig, run_logger: RunLogger) -> Dict:
    spec = build_potential(config)
    grid = build_grid(config, spec)

    def measure(k: float) -> Dict:
        transfer = transfer_matrix(spec, k, grid)
        defects = identity_defects(spec, k, grid, transfer=transfer).defects
        defects["duality"] = duality_defect(spec, k, grid, transfer)
        return {"k": k, "defects": defects}

    results, failures = _sweep(config, run_logger, "k", k_values(config), measure)
    return {"command": "identities", "params": spec.describe(), "grid": grid.to_dict(),
            "results": results, "failures": failures}


def run_spectrum(config: JobConfig, run_logger: RunLogger) -> Dict:
    spec = build_potential(config)
    grid = build_grid(config, spec)
    started = time.time()
    tolerances = config.tolerances
    report = spectrum_report(
        spec, grid, search_box(config, spec), int(config.sweep.seeds), tolerances.tol,
        mismatch_tol=tolerances.mismatch, imag_tol=tolerances.imag, pair_tol=tolerances.pair,
    )
    report["command"] = "spectrum"
    run_logger.log_step("spectrum", bool(report["points"]), time.time() - started,
                        details={"points": len(report["points"]), "failures": len(report["failures"])})
    if not report["points"]:
        raise NoUsableResult(f"no eigenvalue converged ({len(report['failures'])} seeds failed)", report)
    return report


def run_phase_diagram(config: JobConfig, run_logger: RunLogger) -> Dict:
    pot = config.potential
    strength_form = pot.kind == "scarf2-strengths"
    scan_name = "coupling" if strength_form else "B"
    values = parse_range(config.sweep.coupling_range if strength_form else config.sweep.b_range)

    def classify(value: float) -> Dict:
        if strength_form:
            spec = scarf2_strengths(pot.depth, value, pot.alpha, pot.v_asym)
        else:
            spec = scarf2(pot.a_pot, value, pot.alpha)
        grid = build_grid(config, spec)
        result = solve_spectrum(config, spec, grid)
        phase = phase_classify(spec, result.points, config.tolerances.imag)
        return {
            scan_name: value,
            "phase": phase.value,
            "max_imag": max((abs(e.imag) for e in result.energies), default=0.0),
            "n_points": len(result.points),
            "energies": result.energies,
        }

    results, failures = _sweep(config, run_logger, scan_name, values, classify)
    return {"command": "phase-diagram", "scan": scan_name, "params": dict(pot.__dict__),
            "results": results, "failures": failures}


def run_correlation(config: JobConfig, run_logger: RunLogger) -> Tuple[Dict, Any]:
    spec = build_potential(config)
    grid = build_grid(config, spec)
    started = time.time()
    if config.sweep.eigen:
        result = solve_spectrum(config, spec, grid)
        if config.sweep.state >= len(result.points):
            raise NoUsableResult(f"requested state {config.sweep.state} but only {len(result.points)} eigenvalues found")
        state = eigenfunction(spec, result.points[config.sweep.state].energy, grid)
        source = {"eigen": True, "state": config.sweep.state}
    else:
        k = k_values(config)[0]
        state = scattering_state(spec, k, grid)
        source = {"eigen": False, "k": k}

    field = correlation_field(state)
    c, defect = pt_overlap(state)
    report = {
        "command": "correlation",
        "params": spec.describe(),
        "grid": grid.to_dict(),
        "source": source,
        "E": state.energy,
        "continuity_residual": continuity_residual(state),
        "current_constancy": current_constancy(field),
        "q0": field.q[grid.center_index],
        "max_abs_rho": float(abs(field.rho).max()),
        "max_abs_q": float(abs(field.q).max()),
        "pt_overlap": {"c": c, "defect": defect},
    }
    run_logger.log_step("correlation", True, time.time() - started, details=source)
    return report, field


def _variant_error(t_num: complex, r_num: complex, t_an: complex, r_an: complex) -> float:
    scale = max(abs(t_num), abs(r_num))
    return max(abs(t_an - t_num), abs(r_an - r_num)) / scale


def scarf2_validate(config: JobConfig, run_logger: Optional[RunLogger] = None) -> Dict:
    """Both reflection variants and both flux formulas against the integrator on the k grid"""
    pot = config.potential
    spec = scarf2(pot.a_pot, pot.b_pot, pot.alpha)
    grid = build_grid(config, spec)

    def compare(k: float) -> Dict:
        t_num, r_num, _ = amplitudes(s_from_m(transfer_matrix(spec, k, grid)))
        row = {"k": k, "T": t_num, "R": r_num, "variants": {}}
        for variant in ReflectionVariant:
            t_an, r_an = scarf2_analytic_amplitudes(spec.a_pot, spec.b_pot, spec.alpha, k, variant)
            row["variants"][variant.value] = {"T": t_an, "R": r_an, "rel_error": _variant_error(t_num, r_num, t_an, r_an)}
        measured = abs(r_num) ** 2 + abs(t_num) ** 2 - 1.0
        row["flux"] = {"measured": measured}
        for formula in FluxFormula:
            predicted = flux_deviation_analytic(spec.a_pot, spec.b_pot, spec.alpha, k, formula)
            row["flux"][formula.value] = {"predicted": predicted, "abs_error": abs(predicted - measured)}
        return row

    if run_logger is None:
        rows = [compare(k) for k in k_values(config)]
        failures = []
    else:
        rows, failures = _sweep(config, run_logger, "k", k_values(config), compare)

    max_errors = {v.value: max(r["variants"][v.value]["rel_error"] for r in rows) for v in ReflectionVariant}
    # ties go to the sin form
    order = [ReflectionVariant.SIN_CORRECTED, ReflectionVariant.AS_PRINTED]
    winner = min(order, key=lambda v: max_errors[v.value])
    flux_errors = {f.value: max(r["flux"][f.value]["abs_error"] for r in rows) for f in FluxFormula}
    return {
        "command": "scarf2-validate",
        "params": spec.describe(),
        "grid": grid.to_dict(),
        "rows": rows,
        "failures": failures,
        "max_rel_error": max_errors,
        "winner": winner.value,
        "flux_max_abs_error": flux_errors,
    }


def _write_csv_report(config: JobConfig, report: Dict, extra: Any):
    out = config.output.out
    if config.command == "correlation":
        write_correlation_csv(extra, out)
    elif config.command == "phase-diagram":
        rows = report["results"]
        columns = [
            [r[report["scan"]] for r in rows],
            [1.0 if r["phase"] == "broken" else 0.0 for r in rows],
            [r["max_imag"] for r in rows],
            [r["n_points"] for r in rows],
        ]
        write_csv(out, (report["scan"], "broken", "max_imag", "n_points"), columns)
    else:
        rows = report["results"]
        columns = [
            [r["k"] for r in rows],
            [abs(r["measured"]["T"]) ** 2 for r in rows],
            [abs(r["measured"]["R"]) ** 2 for r in rows],
            [r["measured"]["flux_deviation"] for r in rows],
            [r["defects"]["unitarity"] for r in rows],
            [r["defects"]["det"] for r in rows],
        ]
        write_csv(out, ("k", "abs_t2", "abs_r2", "flux_deviation", "unitarity", "det"), columns)


def _emit(config: JobConfig, report: Dict, extra: Any = None) -> Optional[str]:
    out = config.output.out
    if out is None:
        sys.stdout.write(dumps(report))
        return None
    if config.output.format == "csv":
        _write_csv_report(config, report, extra)
    else:
        write_json(out, report)
    return out


def run(config: JobConfig) -> int:
    """Validate, compute and write the report; returns the exit status"""
    try:
        require_valid(config)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INVALID

    run_logger = setup_run_logging(log_dir=config.output.log_dir, command=config.command)
    exit_code, state, report_path = EXIT_OK, "completed", None
    try:
        extra = None
        if config.command == "scatter":
            report = run_scatter(config, run_logger)
        elif config.command == "identities":
            report = run_identities(config, run_logger)
        elif config.command == "spectrum":
            report = run_spectrum(config, run_logger)
        elif config.command == "phase-diagram":
            report = run_phase_diagram(config, run_logger)
        elif config.command == "correlation":
            report, extra = run_correlation(config, run_logger)
        else:
            report = scarf2_validate(config, run_logger)
        report_path = _emit(config, report, extra)
        print(f"✅ {config.command} finished" + (f": {report_path}" if report_path else ""), file=sys.stderr)
    except NoUsableResult as e:
        exit_code, state = EXIT_NUMERICAL, "no-result"
        partial = e.args[1] if len(e.args) > 1 else {"failures": []}
        if isinstance(partial, list):
            partial = {"failures": partial}
        partial = dict(partial, command=config.command, error=str(e.args[0]))
        report_path = _emit(config, partial) if config.output.format == "json" or config.output.out is None else None
        print(f"❌ {e.args[0]}", file=sys.stderr)
    except NumericalError as e:
        exit_code, state = EXIT_NUMERICAL, "numerical-failure"
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
    except (ConfigError, PtLabError) as e:
        exit_code, state = EXIT_INVALID, "invalid"
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
    finally:
        run_logger.log_session_end(state, exit_code, report_path)
    return exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptlab", description="PT-symmetric scattering and bound-state lab")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON or YAML job file; flags override it")

    pot = parser.add_argument_group("potential")
    pot.add_argument("--A", type=float, help="Scarf-II A (tanh coefficient of W)")
    pot.add_argument("--B", type=float, help="Scarf-II B (sech coefficient of W)")
    pot.add_argument("--alpha", type=float)
    pot.add_argument("--depth", type=float, help="strength form: sech^2 depth")
    pot.add_argument("--coupling", type=float, help="strength form: sech tanh coupling")
    pot.add_argument("--V-asym", dest="V_asym", type=float, help="strength form: asymptotic value")
    pot.add_argument("--custom", help="CSV with header x,re_v,im_v")

    num = parser.add_argument_group("numerics")
    num.add_argument("--L", type=float, help="grid half-width")
    num.add_argument("--h", type=float, help="grid step")
    num.add_argument("--n-points", dest="n_points", type=int)
    num.add_argument("--tol", type=float)

    sweep = parser.add_argument_group("sweeps")
    sweep.add_argument("--k", type=float, nargs="+")
    sweep.add_argument("--k-range", dest="k_range", help="lo:hi:n")
    sweep.add_argument("--B-range", dest="B_range", help="lo:hi:n")
    sweep.add_argument("--coupling-range", dest="coupling_range", help="lo:hi:n")
    sweep.add_argument("--emin", type=float)
    sweep.add_argument("--emax", type=float)
    sweep.add_argument("--eimax", type=float)
    sweep.add_argument("--seeds", type=int, help="seeds per axis of the Newton lattice")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--eigen", action="store_true", default=None, help="correlation of an eigenstate")
    sweep.add_argument("--state", type=int, help="eigenstate index for --eigen")

    out = parser.add_argument_group("output")
    out.add_argument("--out")
    out.add_argument("--format", choices=("json", "csv"))
    out.add_argument("--log-dir", dest="log_dir")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "A": args.A, "B": args.B, "alpha": args.alpha, "depth": args.depth, "coupling": args.coupling,
        "V-asym": args.V_asym, "custom": args.custom,
        "L": args.L, "h": args.h, "n-points": args.n_points, "tol": args.tol,
        "k": args.k, "k-range": args.k_range, "B-range": args.B_range, "coupling-range": args.coupling_range,
        "emin": args.emin, "emax": args.emax, "eimax": args.eimax, "seeds": args.seeds,
        "workers": args.workers, "eigen": args.eigen, "state": args.state,
        "out": args.out, "format": args.format, "log-dir": args.log_dir,
    }


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_data = load_config_file(args.config) if args.config else {}
        file_data = dict(file_data, command=args.command)
        config = JobConfig.from_dict(file_data).merged_with(overrides_from_args(args))
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INVALID
    except (TypeError, ValueError) as e:
        print(f"❌ invalid configuration: {e}", file=sys.stderr)
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
