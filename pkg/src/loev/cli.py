"""Command line: ``loev run|validate|seed-scenarios``.

Exit status: 0 certified success, 1 malformed input, 2 hypothesis violation
(with witness), 3 orbit budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import gdelta, orbit_engine, principles, semicomplete
from .errors import HypothesisViolation, LongOrbitError
from .orbit_engine import BudgetExceeded, NonStationaryError
from .scenario import Scenario, ScenarioError, closed_form_term, load, plain, seed_scenarios, serialize
from .spaces import DistanceAxiomError, abs_difference, classify_distance, g_length

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_HYPOTHESIS = 2
EXIT_BUDGET = 3


def _orbit_trace(orbit, labels=None) -> dict:
    name = (lambda i: labels[i]) if labels else (lambda i: i)
    return {"points": [name(i) for i in orbit.points], "jumps": list(orbit.jumps), "length": orbit.length}


def _outcome(outcome, labels=None) -> dict:
    if isinstance(outcome, BudgetExceeded):
        return {
            "tag": outcome.tag,
            "steps_taken": outcome.steps_taken,
            "accumulated_length": outcome.accumulated_length,
            "reason": outcome.reason,
        }
    return {"tag": outcome.tag, "endpoint": labels[outcome.endpoint] if labels else outcome.endpoint}


# ---- solving ---------------------------------------------------------------


def _solve(sc: Scenario, budget, trace: bool) -> tuple[int, dict]:
    kind, p = sc.kind, sc.payload
    labels = p.get("labels")
    result: dict = {}
    status = EXIT_OK
    orbit = outcome = None

    if kind == "check-space":
        cls = classify_distance(sc.space().dist)
        result["distance_class"] = cls.kind
        result["symmetry_violations"] = [[labels[i], labels[j]] for i, j in cls.symmetry_violations]
        result["triangle_violations"] = [[labels[i] for i in t] for t in cls.triangle_violations]

    elif kind == "orbit":
        space = sc.space()
        S = orbit_engine.table_map(sc.map_rows())
        run = orbit_engine.idempotent_orbit if p.get("idempotent") else orbit_engine.greedy_orbit
        orbit, outcome = run(S, space.dist, sc.idx(p["x0"]), budget or orbit_engine.OrbitBudget())
        if isinstance(outcome, BudgetExceeded):
            status = EXIT_BUDGET

    elif kind in ("ekeland", "ekeland-metric"):
        space, f = sc.space(), sc.objective()
        x0 = sc.idx(p["x0"])
        if kind == "ekeland":
            cert = principles.ekeland_premetric(f, space, p["eps"], x0, budget)
            result["residuals"] = {"domination_min": cert.domination_residual}
        else:
            if space.distance_class.kind != "Metric":
                raise HypothesisViolation(f"metric Ekeland needs a metric, got {space.distance_class.kind}")
            cert = principles.ekeland_metric(f, space, p["lambda"], x0, budget)
            result["residuals"] = {"eke1": cert.descent_residual, "eke2_min": cert.domination_residual}
        check = principles.verify_certificate(space, f, space.dist, cert)
        result["point"] = labels[cert.point]
        result["verified"] = check.ok and check.matches_reported
        if trace:
            result["point_residuals"] = {labels[i]: r for i, r in enumerate(cert.point_residuals) if r is not None}
        orbit, outcome = cert.orbit, cert.outcome
        if not result["verified"]:
            status = EXIT_HYPOTHESIS

    elif kind == "caristi":
        inst = sc.caristi()
        res = principles.caristi_fixed_point(inst, sc.idx(p["x0"]), budget)
        result["hypotheses"] = [principles.check_caristi_condition(inst).summary(labels)]
        result["point"] = labels[res.point]
        result["fixed"] = res.point in inst.T[res.point]
        orbit, outcome = res.orbit, res.outcome

    elif kind == "takahashi":
        space, f = sc.space(), sc.objective()
        res = principles.takahashi_minimize(f, space, sc.idx(p["x0"]), budget)
        result["point"] = labels[res.v]
        result["is_min"] = res.is_min
        result["condition_witness_failure"] = (
            labels[res.condition_witness_failure] if res.condition_witness_failure is not None else None
        )
        orbit, outcome = res.orbit, res.outcome
        if not res.is_min:
            status = EXIT_HYPOTHESIS

    elif kind == "oettli-thera":
        inst = sc.oettli()
        result["hypotheses"] = [principles.check_oettli_hypothesis(inst).summary(labels)]
        res = principles.oettli_thera(inst, budget)
        result.update(point=labels[res.point], in_A=res.in_A, in_Psi=res.in_Psi, A=[labels[i] for i in res.A])
        orbit, outcome = res.orbit, res.outcome

    elif kind == "fabian-preiss":
        inst = sc.fabian_preiss()
        result["hypotheses"] = [principles.check_fabian_preiss_hypothesis(inst).summary(labels)]
        res = principles.fabian_preiss(inst, budget)
        result.update(point=labels[res.point], f_i0_value=res.f_i0_value, phi=[labels[i] for i in res.phi])
        orbit, outcome = res.orbit, res.outcome

    elif kind == "counterexample":
        kit = semicomplete.build_counterexample(sc.sequence(), abs_difference)
        eps = p.get("eps", 0.5)
        unfixed = semicomplete.verify_caristi_unfixed(kit)
        fails = semicomplete.verify_ekeland_fails(kit, eps)
        exact = all(
            kit.f_values[n] - kit.f_values[n + 1] == abs_difference(kit.M[n + 1], kit.M[n])
            for n in range(kit.horizon - 1)
        )
        result.update(
            horizon=kit.horizon,
            g_length=semicomplete.kit_g_length(kit),
            f_g_relation_exact=exact,
            caristi_unfixed={"passed": unfixed.passed, "failures": list(unfixed.failures)},
            ekeland_fails={"passed": fails.passed, "failures": list(fails.failures), "checked": fails.checked},
            notes=list(fails.notes),
        )
        if trace:
            result["points"] = list(kit.M)
            result["f_values"] = list(kit.f_values)
        if not (unfixed.passed and fails.passed):
            status = EXIT_HYPOTHESIS

    elif kind == "gdelta-minimize":
        domain = sc.gdelta_domain()
        res = gdelta.perturbed_minimize(domain, p["grid"], p["objective"], p["eps"], budget, p["x0"])
        result.update(point_index=res.point, point=p["grid"][res.point], residual=res.residual)
        orbit, outcome = res.certificate.orbit, res.certificate.outcome
        if not res.residual >= 0:
            status = EXIT_HYPOTHESIS

    elif kind == "series-check":
        rep = gdelta.series_equivalence_check(closed_form_term(p["terms"]), p["horizon"], p["threshold"])
        result.update(
            sum_raw=rep.sum_raw,
            sum_transformed=rep.sum_transformed,
            verdict_raw=rep.verdict_raw,
            verdict_transformed=rep.verdict_transformed,
            consistent=rep.consistent,
        )

    if outcome is not None:
        result["outcome"] = _outcome(outcome, labels)
    if orbit is not None and trace:
        result["orbit"] = _orbit_trace(orbit, labels)
    return status, result


def run_scenario(sc: Scenario, *, steps=None, length=None, trace: bool = False) -> tuple[int, dict]:
    """Solve a parsed scenario; returns ``(exit status, report)``."""
    start = time.perf_counter()
    report: dict = {"scenario": serialize(sc), "kind": sc.kind}
    try:
        budget = sc.budget(steps, length)
        status, result = _solve(sc, budget, trace)
        report["result"] = result
        report["outcome"] = result.get("outcome", {}).get("tag", "ok" if status == EXIT_OK else "failed")
    except HypothesisViolation as exc:
        status = EXIT_HYPOTHESIS
        report["outcome"] = "HypothesisViolation"
        report["error"] = str(exc)
        if exc.witness is not None:
            labels = sc.payload.get("labels")
            report["witness"] = labels[exc.witness] if labels else exc.witness
    except NonStationaryError as exc:
        status = EXIT_HYPOTHESIS
        report["outcome"] = "HypothesisViolation"
        report["error"] = str(exc)
    except LongOrbitError as exc:
        status = EXIT_BUDGET
        report["outcome"] = "BudgetExceeded"
        report["error"] = str(exc)
        report["result"] = {"outcome": _outcome(exc.outcome)}
    except (ScenarioError, DistanceAxiomError, ValueError, IndexError, KeyError) as exc:
        status = EXIT_MALFORMED
        report["outcome"] = "MalformedInput"
        report["error"] = str(exc)
    report["exit_status"] = status
    report["timing"] = {"elapsed_seconds": time.perf_counter() - start}
    return status, plain(report)


# ---- validation ------------------------------------------------------------


def validate_scenario(sc: Scenario) -> tuple[int, list[str]]:
    """Structural and hypothesis checks only; never solves."""
    kind, p = sc.kind, sc.payload
    labels = p.get("labels")
    lines = [f"kind: {kind}"]
    status = EXIT_OK

    def hyp(check) -> None:
        nonlocal status
        lines.append(check.summary(labels))
        if not check.passed:
            status = EXIT_HYPOTHESIS

    if labels is not None:
        space = sc.space()
        cls = space.distance_class
        lines.append(f"distance class: {cls.kind}")
        if cls.symmetry_violations:
            pairs = ", ".join(f"({labels[i]}, {labels[j]})" for i, j in cls.symmetry_violations)
            lines.append(f"symmetry violations: {pairs}")
        if cls.triangle_violations:
            shown = ", ".join("(" + ", ".join(labels[i] for i in t) + ")" for t in cls.triangle_violations[:10])
            more = len(cls.triangle_violations) - 10
            lines.append(f"triangle violations: {shown}" + (f" and {more} more" if more > 0 else ""))

    if kind == "orbit":
        S = orbit_engine.table_map(sc.map_rows())
        rep = orbit_engine.check_idempotent(S, len(labels))
        lines.append("idempotency: pass" if rep.ok else "idempotency: FAIL, witness " + str([labels[i] for i in rep.witness]))
        if p.get("idempotent") and not rep.ok:
            status = EXIT_HYPOTHESIS
        stationary = [labels[x] for x, row in enumerate(sc.map_rows()) if x in row]
        if stationary and not p.get("idempotent"):
            lines.append("non-stationarity: FAIL at " + ", ".join(stationary))
            status = EXIT_HYPOTHESIS
    elif kind in ("ekeland", "ekeland-metric"):
        f = sc.objective()
        x0 = sc.idx(p["x0"])
        lines.append("x0 in dom f: " + ("pass" if math.isfinite(f[x0]) else "FAIL"))
        if not math.isfinite(f[x0]):
            status = EXIT_HYPOTHESIS
        if kind == "ekeland-metric" and space.distance_class.kind != "Metric":
            lines.append("metric required: FAIL")
            status = EXIT_HYPOTHESIS
    elif kind == "caristi":
        hyp(principles.check_caristi_condition(sc.caristi()))
    elif kind == "takahashi":
        hyp(principles.check_takahashi_condition(sc.objective(), sc.space()))
    elif kind == "oettli-thera":
        inst = sc.oettli()
        lines.append("A = {" + ", ".join(labels[i] for i in inst.descent_set()) + "}")
        hyp(principles.check_oettli_hypothesis(inst))
    elif kind == "fabian-preiss":
        inst = sc.fabian_preiss()
        lines.append("Phi = {" + ", ".join(labels[i] for i in inst.reachable_set()) + "}")
        hyp(principles.check_fabian_preiss_hypothesis(inst))
    elif kind == "counterexample":
        seq = sc.sequence()
        M = semicomplete.dedupe_sequence(seq)
        lines.append(f"deduplicated prefix: {len(M)} distinct points")
        length = g_length(seq.materialize(), abs_difference)
        lines.append(f"partial g-length at horizon: {length!r}")
    elif kind == "gdelta-minimize":
        domain = sc.gdelta_domain()
        inside = [i for i, x in enumerate(p["grid"]) if domain.contains(x)]
        n = len(p["grid"])
        if len(inside) == n:
            lines.append(f"grid in Y: pass ({n}/{n} points)")
        else:
            bad = sorted(set(range(n)) - set(inside))
            lines.append(f"grid in Y: FAIL ({len(inside)}/{n} points), outside: {bad}")
            status = EXIT_MALFORMED
    elif kind == "series-check":
        term = closed_form_term(p["terms"])
        neg = [i for i in range(p["horizon"]) if term(i) < 0]
        lines.append("terms nonnegative: " + ("pass" if not neg else f"FAIL at {neg[:10]}"))
        if neg:
            status = EXIT_MALFORMED
    return status, lines


# ---- text output -----------------------------------------------------------


def format_report(report: dict) -> str:
    lines = [f"kind: {report['kind']}", f"outcome: {report['outcome']}"]
    detail = {k: v for k, v in report.get("result", {}).get("outcome", {}).items() if k != "tag"}
    if detail:
        lines[-1] += " " + json.dumps(detail, sort_keys=True)
    if "error" in report:
        lines.append(f"error: {report['error']}")
    if "witness" in report:
        lines.append(f"witness: {report['witness']}")
    for key, value in report.get("result", {}).items():
        if key == "outcome":
            continue
        lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    lines.append(f"exit status: {report['exit_status']}")
    return "\n".join(lines)


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="loev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve a scenario and print a certified report")
    p_run.add_argument("file")
    p_run.add_argument("--budget-steps", type=int, help="override the orbit step cap")
    p_run.add_argument("--budget-length", type=float, help="override the orbit length threshold")
    p_run.add_argument("--report", help="write the JSON report to this path")
    p_run.add_argument("--trace", action="store_true", help="include the full orbit and per-point residuals")
    p_run.add_argument("--json", action="store_true", help="print the JSON report instead of text")

    p_val = sub.add_parser("validate", help="run structural and hypothesis checks only")
    p_val.add_argument("file")

    p_seed = sub.add_parser("seed-scenarios", help="write the worked example scenarios")
    p_seed.add_argument("directory")

    args = parser.parse_args(argv)

    if args.command == "seed-scenarios":
        for path in seed_scenarios(args.directory):
            print(path)
        return EXIT_OK

    try:
        sc = load(args.file)
    except (OSError, ScenarioError) as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_MALFORMED

    if args.command == "validate":
        try:
            status, lines = validate_scenario(sc)
        except HypothesisViolation as exc:
            print(f"hypothesis violation: {exc}")
            return EXIT_HYPOTHESIS
        except (ValueError, IndexError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MALFORMED
        print("\n".join(lines))
        return status

    if args.budget_steps is not None and args.budget_steps <= 0:
        parser.error("--budget-steps must be positive")
    if args.budget_length is not None and not args.budget_length > 0:
        parser.error("--budget-length must be positive")
    status, report = run_scenario(sc, steps=args.budget_steps, length=args.budget_length, trace=args.trace)
    if args.report:
        Path(args.report).write_text(_dump(report))
    print(_dump(report) if args.json else format_report(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
