"""Distribute centralised transition systems into reconfigurable agents."""

from .bisim import CLOSED, OPEN, BisimWitness, is_bisimulation, quotient_partition, strong_bisimilar
from .composition import compose, reachable
from .decomposition import AgentBundle, InterfacePartition, agent_vs_rest, trivial_decompose
from .errors import *  # noqa: F401,F403
from .reconfig import (Compression, IndexedRelationFamily, SummaryPartition, agree, apply_F,
                       compress, compression, distribute, greatest_reconfig_bisim,
                       iterate_fixpoint, summary_partition, verify_distribution)
from .synthesis import (IsoCheckResult, MealyMachine, SynthesisReport, bounded_language_iso,
                        mealy_to_ts, teamwork_synthesize)
from .ts import (Interface, Label, TransitionSystem, Violation, initiates, is_communication_closed,
                 is_deterministic, is_valid, reacts, validate)

__version__ = "0.1.0"
