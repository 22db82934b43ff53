"""Built-in models and scenarios used by the test suite, CLI docs, and demos.

Every number here is a fixture invention chosen for internal consistency
and convenient hand-checking; none of them describe a real vehicle.

Fixture families:

* ``mini``: two binary sensors on one binary fault, time-constant utilities.
  Small enough that every posterior is checkable by hand.
* ``mini_t``: the same plant with a halt utility that decays linearly with
  delay, for net-value and simulation timing behavior.
* ``triage``: three sensors with asymmetric diagnostic strength and three
  actions, built so highlight values are distinct and nonzero.
* ``oms``: a 13-node bipropellant-inspired plant (helium pressurant feeding
  two propellant branches, sensor validity included) with three actions.
* ``chain4``: a 4-variable chain for pruning and repair arithmetic.
"""

from __future__ import annotations

from .bayesnet import Cpt, Network, PruneSpec, Variable
from .decision import ActionDef, DecisionModel, TimedUtility
from .policy import Context, EvidencePartition, Template
from .simulator import FailureMode, PhaseSpan, Scenario, SensorSpec
from .user_model import (
    ActionMapping,
    UserResponseModel,
    build_pruned_user_model,
)

# ---------------------------------------------------------------------------
# mini: one fault, two sensors


def mini_network() -> Network:
    return Network(
        variables=(
            Variable("H", "plant condition", ("nominal", "leak")),
            Variable("S1", "primary pressure sensor", ("low", "high")),
            Variable("S2", "backup pressure sensor", ("low", "high")),
        ),
        cpts=(
            Cpt("H", (), [0.8, 0.2]),
            Cpt("S1", ("H",), [[0.9, 0.1], [0.1, 0.9]]),
            Cpt("S2", ("H",), [[0.9, 0.1], [0.1, 0.9]]),
        ),
        hypothesis_var="H",
        evidence_vars=("S1", "S2"),
    )


def mini_model() -> DecisionModel:
    return DecisionModel(
        network=mini_network(),
        actions=(
            ActionDef("continue", "continue operation"),
            ActionDef("halt", "halt operation"),
        ),
        utility=TimedUtility.constant(
            {
                "continue": {"nominal": 1.0, "leak": 0.0},
                "halt": {"nominal": 0.6, "leak": 0.6},
            }
        ),
    )


def mini_t_model() -> DecisionModel:
    """The mini plant where halting late is worth less than halting now."""
    return DecisionModel(
        network=mini_network(),
        actions=(
            ActionDef("continue", "continue operation"),
            ActionDef("halt", "halt operation"),
        ),
        utility=TimedUtility(
            {
                ("continue", "nominal"): ((0.0, 1.0),),
                ("continue", "leak"): ((0.0, 0.0),),
                ("halt", "nominal"): ((0.0, 0.6), (10.0, 0.0)),
                ("halt", "leak"): ((0.0, 0.6), (10.0, 0.0)),
            }
        ),
    )


def mini_templates() -> tuple[Template, ...]:
    return (Template("plant", (frozenset({"S1"}), frozenset({"S1", "S2"}))),)


def mini_partition() -> EvidencePartition:
    return EvidencePartition(
        core=frozenset({"S1"}), aux_clusters={"backup": frozenset({"S2"})}
    )


_MINI_EMISSION = {
    "nominal": {"low": 0.9, "high": 0.1},
    "leak": {"low": 0.1, "high": 0.9},
}


def _mini_scenario(
    model: DecisionModel,
    seed: int,
    truth: str,
    horizon: int,
    name: str,
    s2_failure: FailureMode | None = None,
) -> Scenario:
    return Scenario(
        seed=seed,
        model=model,
        ground_truth=truth,
        onset=0,
        sensors=(
            SensorSpec("S1", _MINI_EMISSION),
            SensorSpec("S2", _MINI_EMISSION, failure=s2_failure),
        ),
        horizon=horizon,
        templates=mini_templates(),
        partition=mini_partition(),
        phases=(PhaseSpan(0, horizon, Context(phase="burn", highlight_n=2)),),
        null_action="continue",
        name=name,
    )


def mini_scenario(seed: int = 7) -> Scenario:
    """Leak from frame 0, both sensors healthy, constant utilities."""
    return _mini_scenario(mini_model(), seed, "leak", 8, "mini-leak")


def mini_nominal_scenario(seed: int = 7) -> Scenario:
    """No fault at all; the null action should be held to the horizon."""
    return _mini_scenario(mini_model(), seed, "nominal", 6, "mini-nominal")


def mini_t_scenario(seed: int = 7) -> Scenario:
    """Leak from frame 0 under the decaying halt utility."""
    return _mini_scenario(mini_t_model(), seed, "leak", 8, "mini-t-leak")


def mini_t_family(episodes: int, base_seed: int = 100) -> list[Scenario]:
    return [mini_t_scenario(base_seed + i) for i in range(episodes)]


def mini_stuck_scenario(seed: int = 7) -> Scenario:
    """Leak with the backup sensor stuck reading low from frame 0."""
    return _mini_scenario(
        mini_model(),
        seed,
        "leak",
        8,
        "mini-stuck",
        s2_failure=FailureMode("stuck", onset=0, state="low"),
    )


def mini_novice_user() -> UserResponseModel:
    """An operator who cannot interpret the primary sensor at all."""
    model = mini_model()
    return UserResponseModel(
        belief=build_pruned_user_model(
            model.network, PruneSpec(remove_vars=("S1",)), "novice"
        ),
        mapping=ActionMapping(kind="argmax", user_utility=model.utility),
        actions=model.action_ids,
    )


def mini_trainee_user(temperature: float = 5.0) -> UserResponseModel:
    """An operator who sees the backup sensor but treats it as noise."""
    model = mini_model()
    return UserResponseModel(
        belief=build_pruned_user_model(
            model.network, PruneSpec(remove_edges=(("H", "S2"),)), "trainee"
        ),
        mapping=ActionMapping(
            kind="monotone", user_utility=model.utility, temperature=temperature
        ),
        actions=model.action_ids,
    )


# ---------------------------------------------------------------------------
# triage: asymmetric sensors so highlight values are distinct


def triage_model() -> DecisionModel:
    network = Network(
        variables=(
            Variable("H", "line condition", ("nominal", "leak")),
            Variable("P", "feed pressure", ("low", "high")),
            Variable("Q", "flow balance", ("low", "high")),
            Variable("R", "tank temperature", ("low", "high")),
        ),
        cpts=(
            Cpt("H", (), [0.8, 0.2]),
            Cpt("P", ("H",), [[0.9, 0.1], [0.1, 0.9]]),
            Cpt("Q", ("H",), [[0.77, 0.23], [0.3, 0.7]]),
            Cpt("R", ("H",), [[0.8, 0.2], [0.48, 0.52]]),
        ),
        hypothesis_var="H",
        evidence_vars=("P", "Q", "R"),
    )
    return DecisionModel(
        network=network,
        actions=(
            ActionDef("run", "keep running"),
            ActionDef("pause", "pause the line"),
            ActionDef("stop", "stop and vent"),
        ),
        utility=TimedUtility.constant(
            {
                "run": {"nominal": 1.0, "leak": 0.0},
                "pause": {"nominal": 0.7, "leak": 0.35},
                "stop": {"nominal": 0.2, "leak": 0.9},
            }
        ),
    )


# ---------------------------------------------------------------------------
# oms: helium pressurant feeding two propellant branches

_OMS_FAULTS = ("nominal", "he_leak", "left_leak", "right_leak")


def oms_network() -> Network:
    pl = ("nominal", "low")  # pressure-like state pair
    variables = (
        Variable("fault", "propulsion fault", _OMS_FAULTS),
        Variable("he_press", "helium tank pressure", pl),
        Variable("v_he", "helium sensor validity", ("ok", "faulty")),
        Variable("left_press", "left propellant pressure", pl),
        Variable("right_press", "right propellant pressure", pl),
        Variable("left_pc", "left chamber pressure", pl),
        Variable("right_pc", "right chamber pressure", pl),
        Variable("s_he", "helium pressure readout", pl),
        Variable("s_he_trend", "helium pressure trend", ("flat", "down", "erratic")),
        Variable("s_left", "left propellant readout", pl),
        Variable("s_right", "right propellant readout", pl),
        Variable("s_left_pc", "left chamber readout", pl),
        Variable("s_right_pc", "right chamber readout", pl),
    )
    branch = {
        # rows indexed by (fault, he_press) for the fault's own branch
        "own": [[0.08, 0.92], [0.03, 0.97]],
        "other": [[0.97, 0.03], [0.15, 0.85]],
        "nominal": [[0.98, 0.02], [0.15, 0.85]],
        "he_leak": [[0.9, 0.1], [0.1, 0.9]],
    }
    cpts = (
        Cpt("fault", (), [0.94, 0.02, 0.02, 0.02]),
        Cpt(
            "he_press",
            ("fault",),
            [[0.98, 0.02], [0.05, 0.95], [0.9, 0.1], [0.9, 0.1]],
        ),
        Cpt("v_he", (), [0.97, 0.03]),
        Cpt(
            "left_press",
            ("fault", "he_press"),
            [branch["nominal"], branch["he_leak"], branch["own"], branch["other"]],
        ),
        Cpt(
            "right_press",
            ("fault", "he_press"),
            [branch["nominal"], branch["he_leak"], branch["other"], branch["own"]],
        ),
        Cpt("left_pc", ("left_press",), [[0.97, 0.03], [0.1, 0.9]]),
        Cpt("right_pc", ("right_press",), [[0.97, 0.03], [0.1, 0.9]]),
        Cpt(
            "s_he",
            ("he_press", "v_he"),
            [[[0.97, 0.03], [0.5, 0.5]], [[0.05, 0.95], [0.5, 0.5]]],
        ),
        Cpt(
            "s_he_trend",
            ("he_press", "v_he"),
            [
                [[0.92, 0.05, 0.03], [0.2, 0.2, 0.6]],
                [[0.15, 0.8, 0.05], [0.15, 0.25, 0.6]],
            ],
        ),
        Cpt("s_left", ("left_press",), [[0.95, 0.05], [0.07, 0.93]]),
        Cpt("s_right", ("right_press",), [[0.95, 0.05], [0.07, 0.93]]),
        Cpt("s_left_pc", ("left_pc",), [[0.94, 0.06], [0.12, 0.88]]),
        Cpt("s_right_pc", ("right_pc",), [[0.94, 0.06], [0.12, 0.88]]),
    )
    return Network(
        variables=variables,
        cpts=cpts,
        hypothesis_var="fault",
        evidence_vars=(
            "s_he",
            "s_he_trend",
            "s_left",
            "s_right",
            "s_left_pc",
            "s_right_pc",
        ),
    )


def oms_model() -> DecisionModel:
    return DecisionModel(
        network=oms_network(),
        actions=(
            ActionDef("continue", "continue the burn"),
            ActionDef("halt", "halt the burn"),
            ActionDef("crossfeed", "feed from the other branch"),
        ),
        utility=TimedUtility.constant(
            {
                "continue": {
                    "nominal": 1.0,
                    "he_leak": 0.0,
                    "left_leak": 0.1,
                    "right_leak": 0.1,
                },
                "halt": {
                    "nominal": 0.55,
                    "he_leak": 0.7,
                    "left_leak": 0.6,
                    "right_leak": 0.6,
                },
                "crossfeed": {
                    "nominal": 0.5,
                    "he_leak": 0.3,
                    "left_leak": 0.85,
                    "right_leak": 0.85,
                },
            }
        ),
    )


def oms_templates() -> tuple[Template, ...]:
    return (
        Template("helium", (frozenset({"s_he"}), frozenset({"s_he", "s_he_trend"}))),
        Template(
            "left_oms", (frozenset({"s_left_pc"}), frozenset({"s_left_pc", "s_left"}))
        ),
        Template(
            "right_oms",
            (frozenset({"s_right_pc"}), frozenset({"s_right_pc", "s_right"})),
        ),
    )


def oms_partition() -> EvidencePartition:
    return EvidencePartition(
        core=frozenset({"s_he", "s_left_pc", "s_right_pc"}),
        aux_clusters={
            "trend": frozenset({"s_he_trend"}),
            "pressures": frozenset({"s_left", "s_right"}),
        },
    )


_OMS_EMISSIONS = {
    "s_he": {
        "nominal": {"nominal": 0.95, "low": 0.05},
        "he_leak": {"nominal": 0.10, "low": 0.90},
        "left_leak": {"nominal": 0.88, "low": 0.12},
        "right_leak": {"nominal": 0.88, "low": 0.12},
    },
    "s_he_trend": {
        "nominal": {"flat": 0.90, "down": 0.06, "erratic": 0.04},
        "he_leak": {"flat": 0.15, "down": 0.78, "erratic": 0.07},
        "left_leak": {"flat": 0.80, "down": 0.15, "erratic": 0.05},
        "right_leak": {"flat": 0.80, "down": 0.15, "erratic": 0.05},
    },
    "s_left": {
        "nominal": {"nominal": 0.94, "low": 0.06},
        "he_leak": {"nominal": 0.25, "low": 0.75},
        "left_leak": {"nominal": 0.10, "low": 0.90},
        "right_leak": {"nominal": 0.85, "low": 0.15},
    },
    "s_right": {
        "nominal": {"nominal": 0.94, "low": 0.06},
        "he_leak": {"nominal": 0.25, "low": 0.75},
        "left_leak": {"nominal": 0.85, "low": 0.15},
        "right_leak": {"nominal": 0.10, "low": 0.90},
    },
    "s_left_pc": {
        "nominal": {"nominal": 0.93, "low": 0.07},
        "he_leak": {"nominal": 0.30, "low": 0.70},
        "left_leak": {"nominal": 0.12, "low": 0.88},
        "right_leak": {"nominal": 0.80, "low": 0.20},
    },
    "s_right_pc": {
        "nominal": {"nominal": 0.93, "low": 0.07},
        "he_leak": {"nominal": 0.30, "low": 0.70},
        "left_leak": {"nominal": 0.80, "low": 0.20},
        "right_leak": {"nominal": 0.12, "low": 0.88},
    },
}


def oms_scenario(seed: int = 11, truth: str = "left_leak") -> Scenario:
    return Scenario(
        seed=seed,
        model=oms_model(),
        ground_truth=truth,
        onset=2,
        sensors=tuple(
            SensorSpec(sid, _OMS_EMISSIONS[sid]) for sid in sorted(_OMS_EMISSIONS)
        ),
        horizon=12,
        templates=oms_templates(),
        partition=oms_partition(),
        phases=(
            PhaseSpan(0, 2, Context(phase="prestart", highlight_n=3)),
            PhaseSpan(2, 12, Context(phase="burn", highlight_n=3)),
        ),
        null_action="continue",
        name=f"oms-{truth}",
    )


def oms_novice_user() -> UserResponseModel:
    """An operator without the trend display or the sensor-validity concept."""
    model = oms_model()
    return UserResponseModel(
        belief=build_pruned_user_model(
            model.network,
            PruneSpec(remove_vars=("s_he_trend", "v_he")),
            "novice",
        ),
        mapping=ActionMapping(kind="argmax", user_utility=model.utility),
        actions=model.action_ids,
    )


# ---------------------------------------------------------------------------
# chain4: pruning arithmetic


def chain4_network() -> Network:
    return Network(
        variables=(
            Variable("A", "root cause", ("t", "f")),
            Variable("B", "intermediate one", ("t", "f")),
            Variable("C", "intermediate two", ("t", "f")),
            Variable("D", "observable", ("t", "f")),
        ),
        cpts=(
            Cpt("A", (), [0.7, 0.3]),
            Cpt("B", ("A",), [[0.8, 0.2], [0.3, 0.7]]),
            Cpt("C", ("B",), [[0.9, 0.1], [0.2, 0.8]]),
            Cpt("D", ("C",), [[0.6, 0.4], [0.25, 0.75]]),
        ),
        hypothesis_var="A",
        evidence_vars=("C", "D"),
    )
