"""Discrete Bayesian networks: validation, exact inference, and pruning.

Networks, CPTs, and distributions are immutable after construction and every
operation here is a pure function, so values can be shared freely between
threads and cached by callers.

Two inference paths are provided on purpose:

* :func:`posterior` runs variable elimination with a min-degree ordering and
  is the production path.
* :func:`enumerate_posterior` sums the full joint table and exists as an
  independent cross-check for small models (capped at ``2**20`` joint states).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InconsistentEvidenceError, StateSpaceTooLargeError

ROW_SUM_TOL = 1e-9
ENUM_CAP = 2 ** 20

# Evidence is a plain mapping from evidence-variable id to observed state.
Evidence = Mapping[str, str]


@dataclass(frozen=True)
class Variable:
    """A discrete variable with at least two named states."""

    id: str
    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise ValueError(f"{self.id}: unknown state {state!r}") from None


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table for one child variable.

    ``table`` has one axis per parent (in ``parents`` order) plus a final axis
    over the child's states; each row along the final axis sums to 1.
    """

    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        arr = np.asarray(self.table, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    @property
    def scope(self) -> tuple[str, ...]:
        return self.parents + (self.child,)


@dataclass(frozen=True, eq=False)
class Network:
    """A discrete Bayesian network over a fault hypothesis and sensor evidence."""

    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    hypothesis_var: str
    evidence_vars: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        object.__setattr__(self, "evidence_vars", tuple(self.evidence_vars))
        object.__setattr__(self, "_by_id", {v.id: v for v in self.variables})
        object.__setattr__(self, "_cpt_by_child", {c.child: c for c in self.cpts})

    def variable(self, var_id: str) -> Variable:
        try:
            return self._by_id[var_id]
        except KeyError:
            raise ValueError(f"unknown variable {var_id!r}") from None

    def cpt(self, var_id: str) -> Cpt:
        try:
            return self._cpt_by_child[var_id]
        except KeyError:
            raise ValueError(f"no CPT for variable {var_id!r}") from None

    def card(self, var_id: str) -> int:
        return len(self.variable(var_id).states)

    @property
    def var_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables)

    def joint_size(self) -> int:
        return math.prod(len(v.states) for v in self.variables)


@dataclass(frozen=True)
class Distribution:
    """A normalized probability distribution over one variable's states."""

    variable: str
    states: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    def __getitem__(self, state: str) -> float:
        return self.probs[self.states.index(state)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.states, self.probs))


@dataclass(frozen=True)
class PruneSpec:
    """Edges to drop and variables to remove when building a reduced model."""

    remove_vars: tuple[str, ...] = ()
    remove_edges: tuple[tuple[str, str], ...] = ()  # (parent, child) pairs

    def __post_init__(self):
        object.__setattr__(self, "remove_vars", tuple(self.remove_vars))
        object.__setattr__(
            self, "remove_edges", tuple((p, c) for p, c in self.remove_edges)
        )

    def is_empty(self) -> bool:
        return not self.remove_vars and not self.remove_edges


# ---------------------------------------------------------------------------
# Validation


def validate_network(net: Network) -> list[str]:
    """Check every structural invariant; returns one message per violation.

    An empty list means the network is valid. Violations identify the
    offending variable where one exists.
    """
    report: list[str] = []

    seen: set[str] = set()
    for v in net.variables:
        if v.id in seen:
            report.append(f"{v.id}: duplicate variable id")
        seen.add(v.id)
        if len(v.states) < 2:
            report.append(f"{v.id}: needs at least 2 states, has {len(v.states)}")
        if len(set(v.states)) != len(v.states):
            report.append(f"{v.id}: duplicate state labels")

    ids = {v.id for v in net.variables}
    with_cpt: set[str] = set()
    for cpt in net.cpts:
        if cpt.child not in ids:
            report.append(f"{cpt.child}: CPT for unknown variable")
            continue
        if cpt.child in with_cpt:
            report.append(f"{cpt.child}: more than one CPT")
        with_cpt.add(cpt.child)
        if len(set(cpt.parents)) != len(cpt.parents):
            report.append(f"{cpt.child}: duplicate parents")
            continue
        unknown = [p for p in cpt.parents if p not in ids]
        if unknown:
            report.append(f"{cpt.child}: unknown parents {unknown}")
            continue
        shape = tuple(net.card(p) for p in cpt.parents) + (net.card(cpt.child),)
        if cpt.table.shape != shape:
            report.append(
                f"{cpt.child}: table shape {cpt.table.shape} != expected {shape}"
            )
            continue
        if np.any(cpt.table < 0):
            report.append(f"{cpt.child}: negative probability entries")
        sums = cpt.table.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
            worst = float(np.max(np.abs(sums - 1.0)))
            report.append(f"{cpt.child}: row sums off by up to {worst:.3g}")
    for var_id in sorted(ids - with_cpt):
        report.append(f"{var_id}: no CPT")

    report.extend(_find_cycles(net, ids))

    if net.hypothesis_var not in ids:
        report.append(f"{net.hypothesis_var}: hypothesis variable not in network")
    for e in net.evidence_vars:
        if e not in ids:
            report.append(f"{e}: evidence variable not in network")
    if net.hypothesis_var in net.evidence_vars:
        report.append(f"{net.hypothesis_var}: hypothesis variable cannot be evidence")

    return report


def _find_cycles(net: Network, ids: set[str]) -> list[str]:
    parents = {
        c.child: [p for p in c.parents if p in ids]
        for c in net.cpts
        if c.child in ids
    }
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in ids}
    cyclic: list[str] = []

    def visit(v: str) -> bool:
        color[v] = GRAY
        for p in parents.get(v, []):
            if color[p] == GRAY:
                return True
            if color[p] == WHITE and visit(p):
                return True
        color[v] = BLACK
        return False

    for v in sorted(ids):
        if color[v] == WHITE and visit(v):
            cyclic.append(f"{v}: cycle through this variable's ancestry")
            # one report per detected cycle entry point is enough
    return cyclic


def check_evidence(net: Network, evidence: Evidence) -> None:
    """Reject assignments to unknown/non-evidence variables or unknown states."""
    allowed = set(net.evidence_vars)
    for var_id, state in evidence.items():
        if var_id not in allowed:
            raise ValueError(f"{var_id!r} is not an evidence variable of this network")
        net.variable(var_id).index(state)


# ---------------------------------------------------------------------------
# Variable elimination


@dataclass
class _Factor:
    scope: tuple[str, ...]
    values: np.ndarray


def _reduce_factor(f: _Factor, evidence: Evidence, net: Network) -> _Factor:
    scope = list(f.scope)
    values = f.values
    for var_id in f.scope:
        if var_id in evidence:
            axis = scope.index(var_id)
            idx = net.variable(var_id).index(evidence[var_id])
            values = np.take(values, idx, axis=axis)
            scope.pop(axis)
    return _Factor(tuple(scope), values)


def _product(a: _Factor, b: _Factor) -> _Factor:
    scope = list(a.scope) + [v for v in b.scope if v not in a.scope]
    av = a.values.reshape(a.values.shape + (1,) * (len(scope) - len(a.scope)))
    # expand b's table to the joint scope, inserting singleton axes
    b_shape = [b.values.shape[b.scope.index(v)] if v in b.scope else 1 for v in scope]
    bv = np.transpose(b.values, [b.scope.index(v) for v in scope if v in b.scope])
    bv = bv.reshape(b_shape)
    return _Factor(tuple(scope), av * bv)


def _marginalize(f: _Factor, var_id: str) -> _Factor:
    axis = f.scope.index(var_id)
    return _Factor(
        f.scope[:axis] + f.scope[axis + 1 :], f.values.sum(axis=axis)
    )


def _min_degree_order(scopes: Iterable[tuple[str, ...]], eliminate: set[str]) -> list[str]:
    neighbors: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            neighbors.setdefault(v, set())
        for v in scope:
            neighbors[v].update(u for u in scope if u != v)
    for v in eliminate:
        neighbors.setdefault(v, set())

    order: list[str] = []
    remaining = set(eliminate)
    while remaining:
        v = min(remaining, key=lambda x: (len(neighbors[x]), x))
        nbrs = neighbors[v]
        for a in nbrs:
            neighbors[a].update(nbrs - {a})
            neighbors[a].discard(v)
        del neighbors[v]
        remaining.remove(v)
        order.append(v)
    return order


def _eliminate(factors: list[_Factor], order: Sequence[str]) -> list[_Factor]:
    for var_id in order:
        bucket = [f for f in factors if var_id in f.scope]
        if not bucket:
            continue
        prod = bucket[0]
        for f in bucket[1:]:
            prod = _product(prod, f)
        factors = [f for f in factors if var_id not in f.scope]
        factors.append(_marginalize(prod, var_id))
    return factors


def _evidence_mass(net: Network, evidence: Evidence) -> float:
    factors = [
        _reduce_factor(_Factor(c.scope, c.table), evidence, net) for c in net.cpts
    ]
    to_eliminate = {v.id for v in net.variables if v.id not in evidence}
    order = _min_degree_order((f.scope for f in factors), to_eliminate)
    out = _eliminate(factors, order)
    mass = 1.0
    for f in out:
        mass *= float(f.values)
    return mass


def posterior(net: Network, evidence: Evidence, query: str) -> Distribution:
    """Exact conditional distribution p(query | evidence) by variable elimination.

    Raises :class:`InconsistentEvidenceError` when the evidence has zero
    probability under the model; never divides by zero.
    """
    check_evidence(net, evidence)
    qvar = net.variable(query)

    if query in evidence:
        if _evidence_mass(net, evidence) <= 0.0:
            raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability 0")
        probs = [1.0 if s == evidence[query] else 0.0 for s in qvar.states]
        return Distribution(query, qvar.states, probs)

    factors = [
        _reduce_factor(_Factor(c.scope, c.table), evidence, net) for c in net.cpts
    ]
    to_eliminate = {
        v.id for v in net.variables if v.id != query and v.id not in evidence
    }
    order = _min_degree_order((f.scope for f in factors), to_eliminate)
    out = _eliminate(factors, order)

    result = np.ones(len(qvar.states))
    for f in out:
        if f.scope == (query,):
            result = result * f.values
        else:  # scalar factor from a disconnected or fully-observed component
            result = result * float(f.values)
    total = float(result.sum())
    if total <= 0.0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability 0")
    return Distribution(query, qvar.states, (result / total).tolist())


def prior(net: Network, query: str) -> Distribution:
    return posterior(net, {}, query)


# ---------------------------------------------------------------------------
# Exhaustive enumeration (independent cross-check path)


def _full_joint(net: Network) -> np.ndarray:
    """Joint probability table with one axis per variable, in declaration order."""
    order = net.var_ids
    axis = {v: i for i, v in enumerate(order)}
    cards = tuple(net.card(v) for v in order)
    joint = np.ones(cards)
    for cpt in net.cpts:
        scope_axes = sorted(axis[v] for v in cpt.scope)
        # transpose the CPT so its axes follow joint axis order, then pad
        src_axes = [axis[v] for v in cpt.scope]
        perm = sorted(range(len(src_axes)), key=lambda i: src_axes[i])
        arr = np.transpose(cpt.table, perm)
        shape = [1] * len(order)
        for a, full_axis in enumerate(scope_axes):
            shape[full_axis] = arr.shape[a]
        joint = joint * arr.reshape(shape)
    return joint


def enumerate_posterior(net: Network, evidence: Evidence, query: str) -> Distribution:
    """Same contract as :func:`posterior`, by summing the full joint table.

    Used as a brute-force oracle; refuses joint spaces larger than ``2**20``.
    """
    if net.joint_size() > ENUM_CAP:
        raise StateSpaceTooLargeError(
            f"joint space {net.joint_size()} exceeds cap {ENUM_CAP}"
        )
    check_evidence(net, evidence)
    qvar = net.variable(query)

    joint = _full_joint(net)
    order = net.var_ids
    index: list[object] = [slice(None)] * len(order)
    for var_id, state in evidence.items():
        index[order.index(var_id)] = net.variable(var_id).index(state)
    sliced = joint[tuple(index)]

    remaining = [v for v in order if v not in evidence]
    q_axis = remaining.index(query) if query in remaining else None
    if q_axis is None:  # query itself observed
        if float(sliced.sum()) <= 0.0:
            raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability 0")
        probs = [1.0 if s == evidence[query] else 0.0 for s in qvar.states]
        return Distribution(query, qvar.states, probs)

    other_axes = tuple(i for i in range(sliced.ndim) if i != q_axis)
    marginal = sliced.sum(axis=other_axes) if other_axes else sliced
    total = float(marginal.sum())
    if total <= 0.0:
        raise InconsistentEvidenceError(f"evidence {dict(evidence)} has probability 0")
    return Distribution(query, qvar.states, (marginal / total).tolist())


# ---------------------------------------------------------------------------
# Pruning


def prune_network(net: Network, spec: PruneSpec) -> Network:
    """Build a reduced network by dropping edges and removing variables.

    When a parent is dropped from a child's CPT (directly or because the
    parent is removed), the child's rows are averaged over the parent's prior
    marginal in the *original* network. This keeps every row normalized and
    preserves the child's marginal when the dropped parent is independent of
    the remaining parents.
    """
    ids = set(net.var_ids)
    for v in spec.remove_vars:
        if v not in ids:
            raise ValueError(f"prune spec: unknown variable {v!r}")
        if v == net.hypothesis_var:
            raise ValueError("prune spec: cannot remove the hypothesis variable")
    for parent, child in spec.remove_edges:
        if parent not in ids or child not in ids:
            raise ValueError(f"prune spec: unknown edge ({parent!r}, {child!r})")
        if parent not in net.cpt(child).parents:
            raise ValueError(f"prune spec: no edge {parent!r} -> {child!r}")

    # weights always come from the unmodified input network
    weight_vars = {p for p, _ in spec.remove_edges} | set(spec.remove_vars)
    weights = {v: np.asarray(posterior(net, {}, v).probs) for v in weight_vars}

    cpts = {c.child: c for c in net.cpts}

    def drop_parent(cpt: Cpt, parent: str) -> Cpt:
        axis = cpt.parents.index(parent)
        w = weights[parent].reshape(
            (1,) * axis + (-1,) + (1,) * (cpt.table.ndim - axis - 1)
        )
        table = (cpt.table * w).sum(axis=axis)
        parents = cpt.parents[:axis] + cpt.parents[axis + 1 :]
        return Cpt(cpt.child, parents, table)

    for parent, child in spec.remove_edges:
        cpts[child] = drop_parent(cpts[child], parent)

    for removed in spec.remove_vars:
        if removed not in cpts:
            continue
        del cpts[removed]
        for child, cpt in list(cpts.items()):
            if removed in cpt.parents:
                cpts[child] = drop_parent(cpt, removed)

    kept = [v for v in net.variables if v.id in cpts]
    pruned = Network(
        variables=tuple(kept),
        cpts=tuple(cpts[v.id] for v in kept),
        hypothesis_var=net.hypothesis_var,
        evidence_vars=tuple(e for e in net.evidence_vars if e in cpts),
    )
    problems = validate_network(pruned)
    if problems:  # pragma: no cover - guarded by construction
        raise ValueError(f"pruning produced an invalid network: {problems}")
    return pruned
