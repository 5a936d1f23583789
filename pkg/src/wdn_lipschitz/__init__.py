"""Lipschitz and one-sided-Lipschitz constants for water distribution
network hydraulics.

The package parses an EPANET-style network description, builds the
difference-algebraic model of its hydraulics, and bounds the Lipschitz
constant of the head-loss nonlinearity over a box of attainable flows three
ways: exactly in closed form, from above by certified interval
branch-and-bound, and from below by quasi-Monte-Carlo sampling.
"""

from .analytical import (
    diag_log_norm,
    k_network,
    k_pipes,
    k_pumps,
    k_valves,
    osl_network,
    pump_shortcut,
)
from .bnb import (
    BnbResult,
    Box,
    bnb_max,
    jac_entry_bounds,
    k_upper_max,
    k_upper_sqrt,
    make_max_objective,
    make_sqrt_objective,
    osl_upper,
)
from .bounds import (
    FlowBox,
    box_from_intervals,
    default_box,
    load_bounds,
    loads_bounds,
    pump_max_flow,
    save_bounds,
)
from .dae import (
    DaeLayout,
    DaeSystem,
    TripletMatrix,
    build_dae,
    dae_residual,
    export_dae,
)
from .errors import (
    AssumptionError,
    BoundsError,
    DimensionTooLarge,
    DuplicateId,
    DuplicateLink,
    InpError,
    InvertedInterval,
    MalformedSection,
    MissingLink,
    MissingRequiredSection,
    NonPositiveFlow,
    NoPumps,
    ParameterOutOfRange,
    PumpNonpositiveLower,
    UnknownLink,
    UnknownNodeRef,
    WdnError,
)
from .estimates import LipschitzEstimate
from .inp import NetworkDescription, fit_pump_curve, parse_inp
from .intervals import Interval
from .network import (
    FlowVector,
    Network,
    build_network,
    eval_f,
    eval_f_batch,
    eval_jacobian_diag,
    headgain_pump,
    headloss_pipe,
    headloss_valve,
    jacobian_diag_batch,
    junction_residual,
    tank_step,
)
from .report import AnalysisReport, load_report_schema
from .sampling import (
    SampleSequence,
    halton,
    k_lower,
    k_lower_trace,
    random_points,
    sobol,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "AssumptionError",
    "BnbResult",
    "BoundsError",
    "Box",
    "DaeLayout",
    "DaeSystem",
    "DimensionTooLarge",
    "DuplicateId",
    "DuplicateLink",
    "FlowBox",
    "FlowVector",
    "InpError",
    "Interval",
    "InvertedInterval",
    "LipschitzEstimate",
    "MalformedSection",
    "MissingLink",
    "MissingRequiredSection",
    "Network",
    "NetworkDescription",
    "NonPositiveFlow",
    "NoPumps",
    "ParameterOutOfRange",
    "PumpNonpositiveLower",
    "SampleSequence",
    "TripletMatrix",
    "UnknownLink",
    "UnknownNodeRef",
    "WdnError",
    "bnb_max",
    "box_from_intervals",
    "build_dae",
    "build_network",
    "dae_residual",
    "default_box",
    "diag_log_norm",
    "eval_f",
    "eval_f_batch",
    "eval_jacobian_diag",
    "export_dae",
    "fit_pump_curve",
    "halton",
    "headgain_pump",
    "headloss_pipe",
    "headloss_valve",
    "jac_entry_bounds",
    "jacobian_diag_batch",
    "junction_residual",
    "k_lower",
    "k_lower_trace",
    "k_network",
    "k_pipes",
    "k_pumps",
    "k_upper_max",
    "k_upper_sqrt",
    "k_valves",
    "load_bounds",
    "load_report_schema",
    "loads_bounds",
    "make_max_objective",
    "make_sqrt_objective",
    "osl_network",
    "osl_upper",
    "parse_inp",
    "pump_max_flow",
    "pump_shortcut",
    "random_points",
    "save_bounds",
    "sobol",
    "tank_step",
]
