"""JSON file formats for models, user models, scenarios, and episode logs.

All files are UTF-8 JSON. CPT rows are keyed by the parent states joined
with commas in declared parent order; root variables use the single key "".
Loaders validate what they read and raise :class:`ModelFormatError` with the
full violation list rather than constructing a broken object.
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .bayesnet import Cpt, Network, PruneSpec, Variable, validate_network
from .decision import ActionDef, DecisionModel, TimedUtility
from .errors import ModelFormatError
from .metrics import ReviewTimeModel
from .policy import Context, EvidencePartition, Template
from .simulator import FailureMode, PhaseSpan, Scenario, SensorSpec
from .user_model import (
    ActionMapping,
    UserResponseModel,
    build_pruned_user_model,
)


def canonical_json(obj: Any) -> str:
    """Stable, compact serialization used for logs and replay comparison."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ModelFormatError(f"{path}: {err}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"{path}: not valid JSON: {err}") from err


def _require(doc: Mapping, key: str, where: str):
    if key not in doc:
        raise ModelFormatError(f"{where}: missing required key {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# Networks


def network_to_dict(net: Network) -> dict:
    cpts = []
    for cpt in net.cpts:
        parent_states = [net.variable(p).states for p in cpt.parents]
        rows = {}
        for combo in itertools.product(*parent_states):
            row = cpt.table[tuple(net.variable(p).index(s) for p, s in zip(cpt.parents, combo))]
            rows[",".join(combo)] = [float(x) for x in np.atleast_1d(row)]
        cpts.append({"child": cpt.child, "parents": list(cpt.parents), "rows": rows})
    return {
        "variables": [
            {"id": v.id, "name": v.name, "states": list(v.states)}
            for v in net.variables
        ],
        "cpts": cpts,
        "hypothesis_var": net.hypothesis_var,
        "evidence_vars": list(net.evidence_vars),
    }


def network_from_dict(
    doc: Mapping, where: str = "network", validate: bool = True
) -> Network:
    try:
        variables = tuple(
            Variable(v["id"], v.get("name", v["id"]), tuple(v["states"]))
            for v in _require(doc, "variables", where)
        )
        by_id = {v.id: v for v in variables}
        cpts = []
        for entry in _require(doc, "cpts", where):
            child = entry["child"]
            parents = tuple(entry["parents"])
            rows = entry["rows"]
            cards = [len(by_id[p].states) for p in parents if p in by_id]
            if len(cards) != len(parents):
                missing = [p for p in parents if p not in by_id]
                raise ModelFormatError(f"{where}: {child}: unknown parents {missing}")
            child_card = len(by_id[child].states) if child in by_id else 0
            if child not in by_id:
                raise ModelFormatError(f"{where}: CPT for unknown variable {child!r}")
            table = np.zeros(tuple(cards) + (child_card,))
            combos = list(itertools.product(*[by_id[p].states for p in parents]))
            for combo in combos:
                key = ",".join(combo)
                if key not in rows:
                    raise ModelFormatError(f"{where}: {child}: missing row {key!r}")
                idx = tuple(by_id[p].index(s) for p, s in zip(parents, combo))
                table[idx] = rows[key]
            if len(rows) != len(combos):
                raise ModelFormatError(f"{where}: {child}: extra rows present")
            cpts.append(Cpt(child, parents, table))
        net = Network(
            variables=variables,
            cpts=tuple(cpts),
            hypothesis_var=_require(doc, "hypothesis_var", where),
            evidence_vars=tuple(_require(doc, "evidence_vars", where)),
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"{where}: malformed: {err}") from err
    if validate:
        problems = validate_network(net)
        if problems:
            raise ModelFormatError(f"{where}: invalid network: " + "; ".join(problems))
    return net


# ---------------------------------------------------------------------------
# Decision models


def _utility_to_list(utility: TimedUtility) -> list[dict]:
    return [
        {
            "action": action,
            "state": state,
            "breakpoints": [[t, u] for t, u in pts],
        }
        for (action, state), pts in sorted(utility.curves.items())
    ]


def _utility_from_list(entries, where: str) -> TimedUtility:
    curves: dict[tuple[str, str], tuple] = {}
    for entry in entries:
        key = (entry["action"], entry["state"])
        curves[key] = tuple((float(t), float(u)) for t, u in entry["breakpoints"])
    if not curves:
        raise ModelFormatError(f"{where}: empty utility table")
    return TimedUtility(curves)


def decision_model_to_dict(model: DecisionModel) -> dict:
    doc = network_to_dict(model.network)
    doc["actions"] = [{"id": a.id, "name": a.name} for a in model.actions]
    doc["utility"] = _utility_to_list(model.utility)
    return doc


def decision_model_from_dict(doc: Mapping, where: str = "model") -> DecisionModel:
    net = network_from_dict(doc, where)
    try:
        actions = tuple(
            ActionDef(a["id"], a.get("name", a["id"]))
            for a in _require(doc, "actions", where)
        )
        utility = _utility_from_list(_require(doc, "utility", where), where)
        return DecisionModel(network=net, actions=actions, utility=utility)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"{where}: malformed: {err}") from err


def load_network(path: str | Path) -> Network:
    return network_from_dict(_read_json(path), str(path))


def load_decision_model(path: str | Path) -> DecisionModel:
    return decision_model_from_dict(_read_json(path), str(path))


def save_decision_model(model: DecisionModel, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(decision_model_to_dict(model), indent=2) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# User models


def user_model_from_dict(
    doc: Mapping, gold: DecisionModel, where: str = "user model"
) -> UserResponseModel:
    try:
        label = doc.get("label", "operator")
        pruning = doc.get("pruning", {})
        spec = PruneSpec(
            remove_vars=tuple(pruning.get("remove_vars", ())),
            remove_edges=tuple(
                (p, c) for p, c in pruning.get("remove_edges", ())
            ),
        )
        mapping_doc = _require(doc, "mapping", where)
        if "utility" in mapping_doc:
            utility = _utility_from_list(mapping_doc["utility"], where)
        else:
            utility = gold.utility
        mapping = ActionMapping(
            kind=_require(mapping_doc, "kind", where),
            user_utility=utility,
            temperature=float(mapping_doc.get("temperature", 5.0)),
        )
        belief = build_pruned_user_model(gold.network, spec, label)
        return UserResponseModel(
            belief=belief, mapping=mapping, actions=gold.action_ids
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"{where}: malformed: {err}") from err


def load_user_model(path: str | Path, gold: DecisionModel) -> UserResponseModel:
    return user_model_from_dict(_read_json(path), gold, str(path))


# ---------------------------------------------------------------------------
# Review-time models (used by CLI flags and scenario policy blocks)


def review_time_from_dict(doc: Mapping) -> ReviewTimeModel:
    return ReviewTimeModel(
        base_delay=float(doc.get("base_delay", 0.0)),
        item_costs={k: float(v) for k, v in doc.get("item_costs", {}).items()},
        default_cost=float(doc.get("default_cost", 1.0)),
    )


# ---------------------------------------------------------------------------
# Scenarios


def _context_to_dict(ctx: Context) -> dict:
    return {
        "phase": ctx.phase,
        "baseline_levels": dict(ctx.baseline_levels),
        "criticality": ctx.criticality,
        "highlight_n": ctx.highlight_n,
    }


def _context_from_dict(doc: Mapping) -> Context:
    return Context(
        phase=doc.get("phase", "default"),
        baseline_levels={k: int(v) for k, v in doc.get("baseline_levels", {}).items()},
        criticality=float(doc.get("criticality", 1.0)),
        highlight_n=int(doc.get("highlight_n", 3)),
    )


def scenario_to_dict(scenario: Scenario, model_path: str | None = None) -> dict:
    sensors = []
    for s in scenario.sensors:
        entry: dict = {"id": s.id, "emission": {h: dict(r) for h, r in s.emission.items()}}
        if s.failure is not None:
            failure = {"kind": s.failure.kind, "onset": s.failure.onset}
            if s.failure.kind == "stuck":
                failure["state"] = s.failure.state
            else:
                failure["period"] = s.failure.period
            entry["failure"] = failure
        sensors.append(entry)
    return {
        "name": scenario.name,
        "seed": scenario.seed,
        "model": model_path
        if model_path is not None
        else decision_model_to_dict(scenario.model),
        "ground_truth": {"state": scenario.ground_truth, "onset": scenario.onset},
        "sensors": sensors,
        "phases": [
            {"start": p.start, "end": p.end, "context": _context_to_dict(p.context)}
            for p in scenario.phases
        ],
        "horizon": scenario.horizon,
        "templates": [
            {"subsystem": t.subsystem, "levels": [sorted(l) for l in t.levels]}
            for t in scenario.templates
        ],
        "partition": {
            "core": sorted(scenario.partition.core),
            "aux_clusters": {
                name: sorted(ids)
                for name, ids in scenario.partition.aux_clusters.items()
            },
        },
        "null_action": scenario.null_action,
    }


def scenario_from_dict(
    doc: Mapping, base_dir: str | Path = ".", where: str = "scenario"
) -> Scenario:
    try:
        model_ref = _require(doc, "model", where)
        if isinstance(model_ref, str):
            model = load_decision_model(Path(base_dir) / model_ref)
        else:
            model = decision_model_from_dict(model_ref, f"{where}.model")
        truth = _require(doc, "ground_truth", where)
        sensors = []
        for entry in _require(doc, "sensors", where):
            failure = None
            if "failure" in entry:
                f = entry["failure"]
                failure = FailureMode(
                    kind=_require(f, "kind", f"{where}.failure"),
                    onset=int(f.get("onset", 0)),
                    state=f.get("state"),
                    period=int(f.get("period", 1)),
                )
            sensors.append(
                SensorSpec(entry["id"], entry["emission"], failure=failure)
            )
        templates = tuple(
            Template(t["subsystem"], tuple(frozenset(l) for l in t["levels"]))
            for t in _require(doc, "templates", where)
        )
        part = _require(doc, "partition", where)
        partition = EvidencePartition(
            core=frozenset(part.get("core", ())),
            aux_clusters={
                name: frozenset(ids)
                for name, ids in part.get("aux_clusters", {}).items()
            },
        )
        phases = tuple(
            PhaseSpan(int(p["start"]), int(p["end"]), _context_from_dict(p.get("context", {})))
            for p in doc.get("phases", ())
        )
        return Scenario(
            seed=int(_require(doc, "seed", where)),
            model=model,
            ground_truth=_require(truth, "state", where),
            onset=int(truth.get("onset", 0)),
            sensors=tuple(sensors),
            horizon=int(_require(doc, "horizon", where)),
            templates=templates,
            partition=partition,
            phases=phases,
            null_action=doc.get("null_action"),
            name=doc.get("name", "scenario"),
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ModelFormatError(f"{where}: malformed: {err}") from err


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(_read_json(path), Path(path).parent, str(path))


def save_scenario(
    scenario: Scenario, path: str | Path, model_path: str | None = None
) -> None:
    Path(path).write_text(
        json.dumps(scenario_to_dict(scenario, model_path), indent=2) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# Episode logs


def display_state_to_dict(state) -> dict:
    return {
        "levels": dict(state.levels),
        "aux": list(state.aux),
        "highlights": [[i, v] for i, v in state.highlights],
        "ranked_faults": [[s, p] for s, p in state.ranked_faults],
        "ranked_actions": [[a, eu] for a, eu in state.ranked_actions],
    }


def episode_records(result) -> list[dict]:
    """One JSON-ready object per frame, plus a final summary record."""
    records = []
    for rec in result.frames:
        entry = {
            "frame": rec.frame,
            "evidence": dict(rec.evidence),
            "revealed": dict(rec.revealed),
            "display_state": display_state_to_dict(rec.display),
        }
        if rec.action is not None:
            entry["operator_action"] = rec.action
        records.append(entry)
    records.append(
        {
            "summary": {
                "scenario": result.scenario,
                "policy": result.policy,
                "action": result.action,
                "action_frame": result.action_frame,
                "delay": result.delay,
                "utility": result.utility,
                "gold_action": result.gold_action,
                "aborted": result.aborted,
            }
        }
    )
    return records


def save_episode_log(result, path: str | Path) -> None:
    lines = [canonical_json(r) for r in episode_records(result)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as err:
            raise ModelFormatError(f"{path}:{i + 1}: not valid JSON: {err}") from err
    return out
