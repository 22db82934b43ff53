"""Shared helpers: small random networks and decision models for property tests."""

from __future__ import annotations

import itertools
import random

from fovea.bayesnet import Cpt, Network, Variable
from fovea.decision import ActionDef, DecisionModel, TimedUtility


def random_network(
    rng: random.Random,
    n_vars: int,
    n_evidence: int,
    max_parents: int = 3,
    n_states: int = 2,
) -> Network:
    """Random DAG over n_vars discrete variables with positive CPT rows.

    Variable v0 is the hypothesis; the last n_evidence variables are the
    evidence set.  Rows are drawn away from zero so every evidence
    combination stays consistent.
    """
    if n_evidence >= n_vars:
        raise ValueError("need at least one non-evidence variable")
    names = [f"v{i}" for i in range(n_vars)]
    states = tuple(f"s{k}" for k in range(n_states))
    variables = []
    cpts = []
    for i, name in enumerate(names):
        pool = names[:i]
        k = min(len(pool), rng.randint(0, max_parents))
        parents = tuple(sorted(rng.sample(pool, k)))
        table = _random_table(rng, len(parents), n_states)
        variables.append(Variable(name, f"variable {i}", states))
        cpts.append(Cpt(name, parents, table))
    return Network(
        variables=tuple(variables),
        cpts=tuple(cpts),
        hypothesis_var="v0",
        evidence_vars=tuple(names[n_vars - n_evidence:]),
    )


def _random_table(rng: random.Random, n_parents: int, n_states: int):
    def rows(depth: int):
        if depth == 0:
            raw = [rng.uniform(0.05, 1.0) for _ in range(n_states)]
            total = sum(raw)
            return [p / total for p in raw]
        return [rows(depth - 1) for _ in range(n_states)]

    return rows(n_parents)


def random_decision_model(
    rng: random.Random,
    n_vars: int = 5,
    n_evidence: int = 3,
    n_actions: int = 3,
    timed: bool = False,
) -> DecisionModel:
    """Random network plus random action utilities.

    Constant utilities by default; with timed=True each (action, state)
    curve decays linearly from a random start to a random smaller value
    at t=10.
    """
    net = random_network(rng, n_vars, n_evidence)
    actions = tuple(ActionDef(f"a{i}", f"action {i}") for i in range(n_actions))
    hyp = net.variable(net.hypothesis_var)
    curves = {}
    for act in actions:
        for state in hyp.states:
            start = rng.uniform(0.0, 1.0)
            if timed:
                end = rng.uniform(0.0, start)
                curves[(act.id, state)] = ((0.0, start), (10.0, end))
            else:
                curves[(act.id, state)] = ((0.0, start),)
    return DecisionModel(net, actions, TimedUtility(curves))


def all_full_assignments(net: Network) -> list[dict[str, str]]:
    """Every complete assignment to the evidence variables, declaration order."""
    axes = [net.variable(v).states for v in net.evidence_vars]
    return [
        dict(zip(net.evidence_vars, combo)) for combo in itertools.product(*axes)
    ]


def disjoint_pairs(full: dict[str, str]):
    """All (reveal, shown) pairs of disjoint evidence subsets of one assignment."""
    ids = sorted(full)
    for n_shown in range(len(ids) + 1):
        for shown_ids in itertools.combinations(ids, n_shown):
            rest = [v for v in ids if v not in shown_ids]
            for n_reveal in range(1, len(rest) + 1):
                for reveal_ids in itertools.combinations(rest, n_reveal):
                    yield (
                        {v: full[v] for v in reveal_ids},
                        {v: full[v] for v in shown_ids},
                    )
