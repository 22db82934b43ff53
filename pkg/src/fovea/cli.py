"""Command-line entry points for the display-management engine.

Exit codes: 0 on success, 1 on domain errors (bad models, inconsistent
evidence, failed validation), 2 on usage errors (argparse's default).
"""

from __future__ import annotations

import argparse
import json
import sys

from .bayesnet import posterior, validate_network
from .errors import EngineError
from .metrics import (
    METRIC_KINDS,
    MetricConfig,
    MetricResult,
    ReviewTimeModel,
    best_reveal_subset,
)
from .model_io import (
    _read_json,
    canonical_json,
    load_scenario,
    load_user_model,
    network_from_dict,
    read_jsonl,
    save_episode_log,
)
from .model_io import decision_model_from_dict
from .policy import highlight, minimal_consistent_set, telescope_levels, decide_auxiliary
from .protocol import replay_log
from .server import SessionServer, run_server
from .simulator import (
    POLICY_KINDS,
    PolicyConfig,
    SimulatedOperator,
    evaluate_policies,
    run_episode,
)
from .user_model import gold_as_user


def _parse_assignments(text: str) -> dict[str, str]:
    """Evidence as JSON ({"S1":"high"}) or comma-separated S1=high pairs."""
    text = text.strip()
    if not text:
        return {}
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise EngineError(f"bad evidence JSON: {err}") from None
        return {str(k): str(v) for k, v in doc.items()}
    out: dict[str, str] = {}
    for part in text.split(","):
        if "=" not in part:
            raise EngineError(f"bad evidence item {part!r}, expected var=state")
        var, state = part.split("=", 1)
        out[var.strip()] = state.strip()
    return out


def _parse_ids(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _subset(full: dict[str, str], ids: list[str], flag: str) -> dict[str, str]:
    missing = [i for i in ids if i not in full]
    if missing:
        raise EngineError(f"{flag}: {missing} not present in --full")
    return {i: full[i] for i in ids}


def _add_rtm_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rtm-base", type=float, default=0.0,
                        help="review-time base delay")
    parser.add_argument("--rtm-cost", type=float, default=1.0,
                        help="default per-item review cost")
    parser.add_argument("--rtm-item", action="append", default=[],
                        metavar="VAR=COST", help="per-item cost override")


def _rtm_from_args(args) -> ReviewTimeModel:
    items: dict[str, float] = {}
    for entry in args.rtm_item:
        if "=" not in entry:
            raise EngineError(f"bad --rtm-item {entry!r}, expected VAR=COST")
        var, cost = entry.split("=", 1)
        items[var.strip()] = float(cost)
    return ReviewTimeModel(args.rtm_base, items, args.rtm_cost)


def _metric_config(args, model) -> MetricConfig:
    user = None
    if args.metric == "evdi":
        if not getattr(args, "user", None):
            raise EngineError("evdi requires --user <user-model-file>")
        user = load_user_model(args.user, model)
    return MetricConfig(
        kind=args.metric,
        rtm=_rtm_from_args(args),
        user=user,
        t=getattr(args, "t", 0.0),
    )


def _emit(args, obj: dict, text: str) -> None:
    if args.format == "jsonl":
        print(canonical_json(obj))
    else:
        print(text)


def _metric_text(kind: str, result: MetricResult) -> str:
    return (
        f"{kind} = {result.value:.6f}  "
        f"action {result.action_before} -> {result.action_after}  "
        f"delay {result.delay_before:g} -> {result.delay_after:g}"
    )


# ---------------------------------------------------------------------------
# Subcommand handlers


def _cmd_validate(args) -> int:
    doc = _read_json(args.model)
    net = network_from_dict(doc, args.model, validate=False)
    problems = validate_network(net)
    if problems:
        for problem in problems:
            print(problem)
        return 1
    _emit(args, {"ok": True, "model": args.model}, f"{args.model}: ok")
    return 0


def _cmd_infer(args) -> int:
    doc = _read_json(args.model)
    if "actions" in doc:
        net = decision_model_from_dict(doc, args.model).network
    else:
        net = network_from_dict(doc, args.model)
    evidence = _parse_assignments(args.evidence)
    query = args.query or net.hypothesis_var
    dist = posterior(net, evidence, query)
    _emit(
        args,
        {"variable": query, "evidence": evidence, "posterior": dist.as_dict()},
        "\n".join(f"p({s}) = {p:.6f}" for s, p in zip(dist.states, dist.probs)),
    )
    return 0


def _cmd_metrics(args) -> int:
    model = decision_model_from_dict(_read_json(args.model), args.model)
    full = _parse_assignments(args.full)
    shown = _subset(full, _parse_ids(args.shown), "--shown")
    e = _subset(full, _parse_ids(args.e), "--e")
    cfg = _metric_config(args, model)
    result = cfg.evaluate(model, e, shown, full)
    _emit(
        args,
        {
            "subset": sorted(e),
            "metric": args.metric,
            "value": result.value,
            "action_before": result.action_before,
            "action_after": result.action_after,
            "delay_before": result.delay_before,
            "delay_after": result.delay_after,
        },
        _metric_text(args.metric, result),
    )
    return 0


def _cmd_plan(args) -> int:
    if args.plan_cmd == "subset":
        model = decision_model_from_dict(_read_json(args.model), args.model)
        full = _parse_assignments(args.full)
        shown = _subset(full, _parse_ids(args.shown), "--shown")
        cfg = _metric_config(args, model)
        subset, result = best_reveal_subset(
            model, cfg, shown, full, strategy=args.strategy, lookahead=args.lookahead
        )
        _emit(
            args,
            {
                "subset": sorted(subset),
                "metric": args.metric,
                "value": result.value,
                "action_before": result.action_before,
                "action_after": result.action_after,
            },
            f"reveal: {', '.join(sorted(subset)) or '(none)'}  "
            f"value {result.value:.6f}",
        )
        return 0

    if args.plan_cmd == "minimal":
        model = decision_model_from_dict(_read_json(args.model), args.model)
        full = _parse_assignments(args.full)
        subset = minimal_consistent_set(model, full, args.t)
        _emit(
            args,
            {"minimal": subset},
            "minimal: " + (", ".join(f"{k}={v}" for k, v in sorted(subset.items()))
                           or "(empty)"),
        )
        return 0

    if args.plan_cmd == "highlight":
        model = decision_model_from_dict(_read_json(args.model), args.model)
        full = _parse_assignments(args.full)
        displayed = (
            _subset(full, _parse_ids(args.displayed), "--displayed")
            if args.displayed is not None
            else full
        )
        pairs = highlight(model, displayed, full, args.n, args.t)
        _emit(
            args,
            {"highlights": [{"id": i, "intensity": v} for i, v in pairs]},
            "\n".join(f"{i} intensity {v:.3f}" for i, v in pairs) or "(none)",
        )
        return 0

    # aux and telescope take their layout from a scenario file
    scenario = load_scenario(args.scenario)
    model = scenario.model
    full = _parse_assignments(args.full)
    args.metric = args.metric or "evri"
    cfg = _metric_config(args, model)
    ctx = scenario.phases[0].context
    if args.phase:
        matches = [p.context for p in scenario.phases if p.context.phase == args.phase]
        if not matches:
            raise EngineError(f"no phase named {args.phase!r} in scenario")
        ctx = matches[0]

    if args.plan_cmd == "aux":
        chosen = sorted(decide_auxiliary(model, cfg, scenario.partition, full))
        _emit(args, {"aux": chosen}, "show: " + (", ".join(chosen) or "(none)"))
        return 0

    levels = telescope_levels(model, cfg, scenario.templates, full, ctx)
    _emit(
        args,
        {"levels": levels},
        "\n".join(f"{sub}: {lvl}" for sub, lvl in sorted(levels.items())),
    )
    return 0


def _operator_from_args(args, model) -> SimulatedOperator:
    if args.operator == "gold":
        user = gold_as_user(model)
    else:
        user = load_user_model(args.operator, model)
    return SimulatedOperator(
        user=user, review=_rtm_from_args(args), response_delay=args.response_delay
    )


def _policies_from_args(args, model) -> list[PolicyConfig]:
    policies = []
    for kind in _parse_ids(args.policy):
        if kind not in POLICY_KINDS:
            raise EngineError(f"unknown policy {kind!r}, expected one of {POLICY_KINDS}")
        metric = MetricConfig(kind=args.metric, rtm=_rtm_from_args(args),
                              user=None, t=0.0)
        if args.metric == "evdi":
            metric = MetricConfig(kind="evdi", rtm=_rtm_from_args(args),
                                  user=gold_as_user(model))
        policies.append(PolicyConfig(name=kind, kind=kind, metric=metric))
    if not policies:
        raise EngineError("--policy must name at least one policy")
    return policies


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    operator = _operator_from_args(args, scenario.model)
    policies = _policies_from_args(args, scenario.model)

    if args.reps > 1 or len(policies) > 1:
        rows = evaluate_policies([scenario], policies, operator, args.reps)
        for row in rows:
            _emit(
                args,
                row.as_dict(),
                f"{row.scenario} / {row.policy}: mean utility "
                f"{row.mean_utility:.4f}, mean delay {row.mean_delay:.2f}, "
                f"gold-match {row.match_rate:.2f} over {row.episodes} episodes",
            )
        return 0

    result = run_episode(scenario, policies[0], operator)
    if args.log:
        save_episode_log(result, args.log)
    _emit(
        args,
        {
            "scenario": result.scenario,
            "policy": result.policy,
            "action": result.action,
            "action_frame": result.action_frame,
            "delay": result.delay,
            "utility": result.utility,
            "gold_action": result.gold_action,
            "frames": len(result.frames),
            "aborted": result.aborted,
        },
        f"{result.scenario} / {result.policy}: action={result.action} "
        f"at frame {result.action_frame}, delay {result.delay:.2f}, "
        f"utility {result.utility:.4f}",
    )
    return 0


def _cmd_serve(args) -> int:
    scenario = load_scenario(args.scenario)
    policies = _policies_from_args(args, scenario.model)
    server = SessionServer(
        scenario,
        policies[0],
        host=args.host,
        port=args.port,
        lockstep=args.lockstep,
        interval=args.interval,
        log_dir=args.log_dir,
    )
    run_server(server)
    return 0


def _cmd_replay(args) -> int:
    scenario = load_scenario(args.scenario)
    policies = _policies_from_args(args, scenario.model)
    log = read_jsonl(args.log)
    original, replayed = replay_log(scenario, policies[0], log)
    ok = original == replayed
    _emit(
        args,
        {"log": args.log, "messages": len(original), "identical": ok},
        f"{args.log}: {'identical' if ok else 'MISMATCH'} "
        f"over {len(original)} messages",
    )
    return 0 if ok else 1


def _cmd_report(args) -> int:
    summaries = []
    for path in args.logs:
        records = read_jsonl(path)
        summary = next((r["summary"] for r in records if "summary" in r), None)
        if summary is None:
            raise EngineError(f"{path}: no summary record")
        summaries.append((path, summary))
        _emit(
            args,
            {"log": str(path), **summary},
            f"{path}: action={summary['action']} delay={summary['delay']:.2f} "
            f"utility={summary['utility']:.4f}",
        )
    mean_u = sum(s["utility"] for _, s in summaries) / len(summaries)
    mean_d = sum(s["delay"] for _, s in summaries) / len(summaries)
    _emit(
        args,
        {"aggregate": {"episodes": len(summaries), "mean_utility": mean_u,
                       "mean_delay": mean_d}},
        f"mean utility {mean_u:.4f}, mean delay {mean_d:.2f} "
        f"over {len(summaries)} episodes",
    )
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fovea",
        description="Decision-theoretic display management: inference, "
        "display-value metrics, policies, simulation, and live sessions.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--format", choices=("text", "jsonl"), default="text",
                       help="output format")
        return p

    p = common(sub.add_parser("validate", help="check a model file's invariants"))
    p.add_argument("model")
    p.set_defaults(fn=_cmd_validate)

    p = common(sub.add_parser("infer", help="posterior over a variable"))
    p.add_argument("model")
    p.add_argument("evidence", help='JSON ({"S1":"high"}) or S1=high,S2=low')
    p.add_argument("--query", help="query variable (default: hypothesis)")
    p.set_defaults(fn=_cmd_infer)

    p = common(sub.add_parser("metrics", help="value of revealing a subset"))
    p.add_argument("metric", choices=METRIC_KINDS)
    p.add_argument("model")
    p.add_argument("--e", required=True, help="ids to reveal (comma separated)")
    p.add_argument("--shown", default="", help="ids already displayed")
    p.add_argument("--full", required=True, help="full evidence assignments")
    p.add_argument("--t", type=float, default=0.0, help="evaluation delay")
    p.add_argument("--user", help="user-model file (evdi)")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_metrics)

    plan = sub.add_parser("plan", help="display-policy computations")
    plan_sub = plan.add_subparsers(dest="plan_cmd", required=True)

    p = common(plan_sub.add_parser("subset", help="best subset to reveal"))
    p.add_argument("model")
    p.add_argument("--shown", default="")
    p.add_argument("--full", required=True)
    p.add_argument("--metric", choices=METRIC_KINDS, default="evri")
    p.add_argument("--strategy", choices=("exhaustive", "greedy", "lookahead"),
                   default="exhaustive")
    p.add_argument("--lookahead", type=int, default=2)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--user")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_plan)

    p = common(plan_sub.add_parser("minimal", help="smallest gold-consistent set"))
    p.add_argument("model")
    p.add_argument("--full", required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(fn=_cmd_plan)

    p = common(plan_sub.add_parser("highlight", help="top-n decision-relevant items"))
    p.add_argument("model")
    p.add_argument("--full", required=True)
    p.add_argument("--displayed", help="ids on display (default: all of --full)")
    p.add_argument("-n", type=int, default=3)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(fn=_cmd_plan)

    p = common(plan_sub.add_parser("aux", help="auxiliary clusters worth showing"))
    p.add_argument("scenario")
    p.add_argument("--full", required=True)
    p.add_argument("--metric", choices=METRIC_KINDS)
    p.add_argument("--phase")
    p.add_argument("--user")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_plan)

    p = common(plan_sub.add_parser("telescope", help="per-subsystem detail levels"))
    p.add_argument("scenario")
    p.add_argument("--full", required=True)
    p.add_argument("--metric", choices=METRIC_KINDS)
    p.add_argument("--phase")
    p.add_argument("--user")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_plan)

    p = common(sub.add_parser("simulate", help="run scored episodes"))
    p.add_argument("scenario")
    p.add_argument("--policy", default="managed",
                   help="comma list of managed|everything|minimal")
    p.add_argument("--metric", choices=METRIC_KINDS, default="evri")
    p.add_argument("--operator", default="gold",
                   help='"gold" or a user-model file')
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--response-delay", type=float, default=0.0)
    p.add_argument("--log", help="write the episode log (single episode only)")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_simulate)

    p = common(sub.add_parser("serve", help="live session server (NDJSON over TCP)"))
    p.add_argument("scenario")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--lockstep", action="store_true",
                   help="advance only on explicit tick messages")
    p.add_argument("--interval", type=float, default=1.0,
                   help="seconds per frame in timer mode")
    p.add_argument("--policy", default="managed")
    p.add_argument("--metric", choices=METRIC_KINDS, default="evri")
    p.add_argument("--log-dir", help="write session logs here on disconnect")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_serve)

    p = common(sub.add_parser("replay", help="verify a session log reproduces"))
    p.add_argument("scenario")
    p.add_argument("log")
    p.add_argument("--policy", default="managed")
    p.add_argument("--metric", choices=METRIC_KINDS, default="evri")
    _add_rtm_args(p)
    p.set_defaults(fn=_cmd_replay)

    p = common(sub.add_parser("report", help="summarize episode logs"))
    p.add_argument("logs", nargs="+")
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (EngineError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
