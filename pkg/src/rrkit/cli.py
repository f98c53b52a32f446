"""Command-line front door: design, table, simulate, estimate, privacy, verify.

Exit codes: 0 success, 1 verification failure, 2 input validation, 3 I/O.
Validation and I/O failures print a single JSON object
``{"code": ..., "message": ...}`` on stderr. All commands are deterministic
given their inputs and ``--seed``; ``RRKIT_THREADS`` changes speed, never
output.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import design as design_mod
from . import estimation, privacy, simulation, verification
from .model import (
    Device,
    PolicyMode,
    PrivacyPolicy,
    ResponseSample,
    SupportSpec,
    SurveyDefinition,
    ValidationError,
    load_survey,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse parser that reports bad arguments through the structured-error path."""

    def error(self, message: str):
        raise ValidationError("BAD_ARGS", message)


def _int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise ValidationError("BAD_GRID", f"{what} must be comma-separated integers, got {text!r}") from None


def _float_list(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise ValidationError("BAD_GRID", f"{what} must be comma-separated numbers, got {text!r}") from None


def _emit(text: str, out_path: str | None) -> None:
    """Write ``text`` to the output file, or stdout when no path was given."""
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(doc: dict, out_path: str | None) -> None:
    _emit(json.dumps(doc, indent=2) + "\n", out_path)


def _resolve_device(args, survey: SurveyDefinition) -> Device:
    """Device parameter for data-facing commands: an explicit --p wins; otherwise
    the survey's privacy policy designs one; with neither, refuse."""
    if args.p is not None:
        return Device(p=args.p, m=survey.support.m)
    if survey.policy is not None:
        device, _ = design_mod.design_device(survey.policy, survey.support)
        return device
    raise ValidationError(
        "MISSING_P", "no device parameter: pass --p or include a 'privacy' policy in the survey"
    )


def _require_population(survey: SurveyDefinition):
    if survey.population is None:
        raise ValidationError("MISSING_PI", "this command needs 'pi' in the survey definition")
    return survey.population


def cmd_design(args) -> int:
    if args.survey is not None:
        survey = load_survey(args.survey)
        if survey.policy is None:
            raise ValidationError("BAD_SURVEY", "survey definition has no 'privacy' policy to design for")
        support, policy = survey.support, survey.policy
    elif args.m is not None and args.xi is not None:
        support = SupportSpec(values=tuple(float(i) for i in range(args.m)), stigma=(True,) * args.m)
        policy = PrivacyPolicy(mode=PolicyMode.ALL_STIGMATIZING, xi=args.xi)
    else:
        raise ValidationError("BAD_ARGS", "design needs --survey, or --m together with --xi")
    _, certificate = design_mod.design_device(policy, support)
    _emit_json(certificate.to_json_dict(), args.out)
    return EXIT_OK


def cmd_table(args) -> int:
    ms = _int_list(args.m, "--m") if args.m is not None else design_mod.DEFAULT_TABLE_MS
    xis = _float_list(args.xi, "--xi") if args.xi is not None else design_mod.DEFAULT_TABLE_XIS
    table = design_mod.p0_table(ms, xis)
    if args.format == "json":
        _emit_json(table.to_json_dict(), args.out)
    else:
        _emit(table.to_csv(), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    survey = load_survey(args.survey)
    population = _require_population(survey)
    device = _resolve_device(args, survey)
    config = simulation.SimulationConfig(
        support=survey.support,
        population=population,
        device=device,
        n=args.n,
        replicates=args.replicates,
        seed=args.seed,
    )
    summary = simulation.run_replicates(config, keep_replicates=args.replicate_csv is not None)
    doc = summary.to_json_dict()
    doc["p"] = device.p
    _emit_json(doc, args.out)
    if args.replicate_csv is not None:
        lines = ["replicate,mu_hat"]
        lines.extend(f"{rec.replicate},{rec.mu_hat!r}" for rec in summary.records)
        _emit("\n".join(lines) + "\n", args.replicate_csv)
    return EXIT_OK


def _load_counts(path: str) -> tuple[int, ...]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("BAD_COUNTS", f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, list):
        raise ValidationError("BAD_COUNTS", f"{path}: expected a JSON array of counts")
    return tuple(doc)


def cmd_estimate(args) -> int:
    survey = load_survey(args.survey)
    device = _resolve_device(args, survey)
    sample = ResponseSample(counts=_load_counts(args.counts))
    report = estimation.estimate_report(sample, device, survey.support)
    _emit_json(report.to_json_dict(), args.out)
    return EXIT_OK


def cmd_privacy(args) -> int:
    survey = load_survey(args.survey)
    population = _require_population(survey)
    device = _resolve_device(args, survey)
    if survey.policy is not None:
        report = privacy.report_for_policy(device, population, survey.policy)
    elif survey.support.all_stigmatizing:
        report = privacy.privacy_report(device, population, mode=PolicyMode.ALL_STIGMATIZING)
    else:
        report = privacy.privacy_report(
            device,
            population,
            mode=PolicyMode.NONSTIGMATIZING_SUBSET,
            nonstigmatizing=survey.support.nonstigmatizing_indices,
            c=None,
        )
    _emit_json(report.to_json_dict(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verification.run_verification(grid_step=args.grid_step)
    if args.format == "json":
        _emit_json(report.to_json_dict(), args.out)
    else:
        lines = [
            f"{'PASS' if check.passed else 'FAIL'} {check.name}: {check.detail}"
            for check in report.checks
        ]
        lines.append("verification passed" if report.passed else "verification FAILED")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAIL


def build_parser() -> _Parser:
    parser = _Parser(prog="rrkit", description="Randomized-response survey toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="choose the most efficient device meeting a privacy policy")
    p_design.add_argument("--survey", help="survey definition JSON (with a 'privacy' policy)")
    p_design.add_argument("--m", type=int, help="number of support values (with --xi; all-stigmatizing)")
    p_design.add_argument("--xi", type=float, help="privacy threshold (with --m)")
    p_design.add_argument("--out", help="write the certificate JSON here instead of stdout")
    p_design.set_defaults(handler=cmd_design)

    p_table = sub.add_parser("table", help="tabulate designed p0 over a grid of m and xi")
    p_table.add_argument("--m", help="comma-separated m values (default 3,4,5)")
    p_table.add_argument("--xi", help="comma-separated xi values (default 0.1,0.2,0.3,0.4)")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.add_argument("--out", help="write the table here instead of stdout")
    p_table.set_defaults(handler=cmd_table)

    p_sim = sub.add_parser("simulate", help="Monte Carlo replication of a survey")
    p_sim.add_argument("--survey", required=True, help="survey definition JSON (needs 'pi')")
    p_sim.add_argument("--n", type=int, required=True, help="respondents per replicate")
    p_sim.add_argument("--replicates", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--p", type=float, help="device parameter (default: designed from the survey's policy)")
    p_sim.add_argument("--out", help="write the summary JSON here instead of stdout")
    p_sim.add_argument("--replicate-csv", help="also write per-replicate mean estimates as CSV")
    p_sim.set_defaults(handler=cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate proportions and the mean from observed counts")
    p_est.add_argument("--survey", required=True, help="survey definition JSON")
    p_est.add_argument("--counts", required=True, help="JSON array file of response counts")
    p_est.add_argument("--p", type=float, help="device parameter (default: designed from the survey's policy)")
    p_est.add_argument("--out", help="write the report JSON here instead of stdout")
    p_est.set_defaults(handler=cmd_estimate)

    p_priv = sub.add_parser("privacy", help="privacy diagnostics for a survey at a device parameter")
    p_priv.add_argument("--survey", required=True, help="survey definition JSON (needs 'pi')")
    p_priv.add_argument("--p", type=float, help="device parameter (default: designed from the survey's policy)")
    p_priv.add_argument("--out", help="write the report JSON here instead of stdout")
    p_priv.set_defaults(handler=cmd_privacy)

    p_verify = sub.add_parser("verify", help="run the oracle self-checks")
    p_verify.add_argument("--grid-step", type=float, default=0.05, help="simplex grid spacing (must divide 1)")
    p_verify.add_argument("--format", choices=("text", "json"), default="text")
    p_verify.add_argument("--out", help="write the report here instead of stdout")
    p_verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except ValidationError as exc:
        json.dump({"code": exc.code, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_VALIDATION
    except OSError as exc:
        json.dump({"code": "IO_ERROR", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
