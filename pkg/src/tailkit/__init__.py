"""Minimization and synthesis of the tail machine in a cascade composition.

A cascade feeds the outputs of a head Mealy machine into a tail machine.
This package finds smallest replacement tails (exact, SAT-backed), decides
and solves the synthesis problem of a tail realizing a target model through
a given head, and ships generators and a benchmark harness for both.
"""
from .machines import (
    Alphabet,
    MachineError,
    MealyMachine,
    Nfa,
    ObservationMachine,
    Run,
    Verdict,
    canonical_form,
    compose_cascade,
    degree,
    equivalent,
    run_machine,
    trace,
)
from .textio import ParseError, parse_machine, serialize_machine
from .observation import (
    InconsistentMachineError,
    image_automaton,
    implements,
    is_consistent,
    om_size,
    require_consistent,
    restriction,
)
from .sat import (
    ENV_SOLVER,
    SAT,
    TIMEOUT,
    UNSAT,
    Cnf,
    SatOutcome,
    SolverError,
    parse_solver_output,
    solve,
    to_dimacs,
)
from .minimize import (
    CompatibilityRelation,
    CompatibleCover,
    CoverError,
    MinimizationResult,
    MinimizationTimeout,
    PartialSolution,
    cover_to_machine,
    encode_cover,
    encode_replacement_naive,
    greedy_clique,
    incompatibility,
    machine_to_cover,
    minimize_om,
    minimize_om_result,
    minimize_tail,
    minimize_tail_naive,
    minimize_tail_naive_result,
    minimize_tail_result,
    verify_replacement,
)
from .synthesis import (
    FeasibilityVerdict,
    InfeasibleError,
    SolutionSizeError,
    feasible,
    minimal_solution,
    solution_om,
    some_solution,
)
from .generators import (
    exp_family,
    np_reduction,
    random_mealy,
    split_om,
)
from .bench import (
    CSV_HEADER,
    BenchRecord,
    bench_bimodal,
    bench_compare,
    parse_report,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "MachineError",
    "MealyMachine",
    "Nfa",
    "ObservationMachine",
    "Run",
    "Verdict",
    "canonical_form",
    "compose_cascade",
    "degree",
    "equivalent",
    "run_machine",
    "trace",
    "ParseError",
    "parse_machine",
    "serialize_machine",
    "InconsistentMachineError",
    "image_automaton",
    "implements",
    "is_consistent",
    "om_size",
    "require_consistent",
    "restriction",
    "ENV_SOLVER",
    "SAT",
    "TIMEOUT",
    "UNSAT",
    "Cnf",
    "SatOutcome",
    "SolverError",
    "parse_solver_output",
    "solve",
    "to_dimacs",
    "CompatibilityRelation",
    "CompatibleCover",
    "CoverError",
    "MinimizationResult",
    "MinimizationTimeout",
    "PartialSolution",
    "cover_to_machine",
    "encode_cover",
    "encode_replacement_naive",
    "greedy_clique",
    "incompatibility",
    "machine_to_cover",
    "minimize_om",
    "minimize_om_result",
    "minimize_tail",
    "minimize_tail_naive",
    "minimize_tail_naive_result",
    "minimize_tail_result",
    "verify_replacement",
    "FeasibilityVerdict",
    "InfeasibleError",
    "SolutionSizeError",
    "feasible",
    "minimal_solution",
    "solution_om",
    "some_solution",
    "exp_family",
    "np_reduction",
    "random_mealy",
    "split_om",
    "CSV_HEADER",
    "BenchRecord",
    "bench_bimodal",
    "bench_compare",
    "parse_report",
    "__version__",
]
