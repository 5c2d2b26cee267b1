from .bell import BellState, identify_bell, prepare_bell
from .bsa import (
    BsaOutcome,
    IncompleteAnalyzerError,
    bell_ensemble_survival,
    bell_survival,
    bsa_type1,
    bsa_type1_branches,
    bsa_type2,
    bsa_type2_branches,
    derive_table,
    enumerate_outcomes,
    phi_branch_overlap,
)
from .echo import EchoResult, spin_echo_sim
from .link import LinkModel, LinkResult, loss_resistance_mc
from .teleport import (
    SwapRecord,
    TeleportRecord,
    derive_teleport_corrections,
    swap_type1,
    swap_type1_branches,
    swap_type2,
    swap_type2_branches,
    teleport_type1,
    teleport_type1_branches,
    teleport_type2,
    teleport_type2_branches,
)

__all__ = [
    "BellState", "identify_bell", "prepare_bell",
    "BsaOutcome", "IncompleteAnalyzerError", "bell_ensemble_survival", "bell_survival",
    "bsa_type1", "bsa_type1_branches", "bsa_type2", "bsa_type2_branches", "derive_table",
    "enumerate_outcomes", "phi_branch_overlap",
    "EchoResult", "spin_echo_sim",
    "LinkModel", "LinkResult", "loss_resistance_mc",
    "SwapRecord", "TeleportRecord", "derive_teleport_corrections",
    "swap_type1", "swap_type1_branches", "swap_type2", "swap_type2_branches",
    "teleport_type1", "teleport_type1_branches", "teleport_type2", "teleport_type2_branches",
]
