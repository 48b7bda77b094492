"""Path-entangled interferometry, Lorentz event ordering and RDM Monte Carlo, with verdict reports."""

from .measurement import (ConsumedSlot, ImpossibleOutcome, MeasurementOutcome, attach_ancilla,
                          make_rng, probability, project, sample_counts, sample_labels,
                          sample_outcome)
from .notation import (BenchPlan, KetExpr, ParseError, compile_and_run, format_ket, parse_bench,
                       parse_ket, parse_ket_expr)
from .optics import (BeamSplitterKind, ModeMap, apply_to_slot, compose, identity,
                     make_beam_splitter, make_mirror, make_phase)
from .relativity import (Frame, IntervalClass, SpacetimeEvent, boost, boosted_time_closed_form,
                         interval_class, order_in_frame, simultaneity_velocity)
from .scenarios import ScenarioReport, run_scenario
from .state import (Ket, OccupationKet, ProbabilityTable, basis, canonicalize, distribution,
                    equal_exact, equal_up_to_phase, ket_make, occupation_pair_expectation,
                    superpose, tensor)

__version__ = "0.1.0"

__all__ = [
    "BeamSplitterKind", "BenchPlan", "ConsumedSlot", "Frame", "ImpossibleOutcome",
    "IntervalClass", "Ket", "KetExpr", "MeasurementOutcome", "ModeMap", "OccupationKet",
    "ParseError", "ProbabilityTable", "ScenarioReport", "SpacetimeEvent", "apply_to_slot",
    "attach_ancilla", "basis", "boost", "boosted_time_closed_form", "canonicalize",
    "compile_and_run", "compose", "distribution", "equal_exact", "equal_up_to_phase",
    "format_ket", "identity", "interval_class", "ket_make", "make_beam_splitter",
    "make_mirror", "make_phase", "make_rng", "occupation_pair_expectation", "order_in_frame",
    "parse_bench", "parse_ket", "parse_ket_expr", "probability", "project", "run_scenario",
    "sample_counts", "sample_labels", "sample_outcome", "simultaneity_velocity", "superpose",
    "tensor",
]
