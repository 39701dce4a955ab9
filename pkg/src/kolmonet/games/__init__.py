"""Constructor-versus-enumerator games for the network (e) and (f) gap theorems."""
from .adversaries import (
    GreedyAdversary,
    RandomAdversary,
    ScriptedAdversary,
    corner_case_scripts,
    greedy_adversary,
    random_adversary,
    scripted_adversary,
)
from .engine import (
    HORIZON,
    RUNNING,
    STUCK,
    Game,
    InvalidSpec,
    Tighten,
    Verdict,
    ViolationCount,
    all_counts,
    apply_event,
    count_violations,
    new_game,
    replay,
    run_game,
    select_candidate,
    verdict,
)
from .params import THEOREMS, GameSpec, default_spec, inequalities, spec_from_params, validate_params
from .tables import AGraph, BoundTable, BudgetError, CapacityExhausted, MonotonicityError, export_agraph
from .transcript import read_transcript, write_transcript

__all__ = [name for name in dir() if not name.startswith("_")]
