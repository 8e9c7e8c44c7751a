"""Solvers for zero-sum single-team single-adversary extensive-form games.

Three equilibrium notions by the team's communication power: TMECom
(preplay and intraplay communication via a mediator), TMECor (preplay
correlation over joint reduced plans), TME (fully independent play);
plus generators for benchmark families and an experiment harness for
the uncorrelation inefficiency indices.
"""

from .analysis import (
    DegenerateGameError,
    ExperimentConfig,
    PoUReport,
    SolutionRecord,
    compute_pou,
    normalize_payoffs,
    run_experiment,
    solve_one,
)
from .evaluation import backward_induction, best_response, expected_team_value
from .game import (
    GameError,
    GameTree,
    RecallError,
    StructureError,
    TeamSpec,
    is_spy,
    validate_perfect_recall,
)
from .generators import (
    CnfFormula,
    RandomGameConfig,
    build_example1,
    build_example2,
    build_maxsat_game,
    generate_random,
    parse_dimacs,
    random_cnf,
)
from .observable import FoldedGame, ObservableGame, fold_team, force_t_observability
from .sequence_form import (
    RealizationPlan,
    SequenceForm,
    behavioral_to_realization,
    build_sequence_form,
    realization_to_behavioral,
    uniform_realization,
)
from .serialize import SchemaError, load_game, save_game
from .tme import TMESolution, solve_tme_exact_small, solve_tme_local
from .tmecom import TMEComSolution, extract_recommendations, replay_value, solve_tmecom
from .tmecor import (
    JointReducedPlan,
    TMECorSolution,
    br_oracle_approx,
    br_oracle_exact,
    hybrid_maxmin,
    hybrid_minmax,
    solve_tmecor,
)

__version__ = "0.1.0"

__all__ = [
    "CnfFormula",
    "DegenerateGameError",
    "ExperimentConfig",
    "FoldedGame",
    "GameError",
    "GameTree",
    "JointReducedPlan",
    "ObservableGame",
    "PoUReport",
    "RandomGameConfig",
    "RealizationPlan",
    "RecallError",
    "SchemaError",
    "SequenceForm",
    "SolutionRecord",
    "StructureError",
    "TMEComSolution",
    "TMECorSolution",
    "TMESolution",
    "TeamSpec",
    "backward_induction",
    "behavioral_to_realization",
    "best_response",
    "br_oracle_approx",
    "br_oracle_exact",
    "build_example1",
    "build_example2",
    "build_maxsat_game",
    "build_sequence_form",
    "compute_pou",
    "expected_team_value",
    "extract_recommendations",
    "fold_team",
    "force_t_observability",
    "generate_random",
    "hybrid_maxmin",
    "hybrid_minmax",
    "is_spy",
    "load_game",
    "normalize_payoffs",
    "parse_dimacs",
    "random_cnf",
    "realization_to_behavioral",
    "replay_value",
    "run_experiment",
    "save_game",
    "solve_one",
    "solve_tme_exact_small",
    "solve_tme_local",
    "solve_tmecom",
    "solve_tmecor",
    "uniform_realization",
    "validate_perfect_recall",
]
