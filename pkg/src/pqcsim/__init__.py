"""Desk-scale simulator for parallel quantum computing on an ensemble quantum computer."""

from .engine import CircuitProgram, ExecPolicy, ProgramOp, derive_stream, execute
from .grover import (BudgetError, GroverParams, ResourceBudget, SearchReport,
                     grover_iteration, grover_params, grover_program,
                     rpa_majority_vote, rpa_one_iteration_distribution,
                     run_pqc_grover, sweep_tradeoff)
from .registers import (CapacityError, ConstituentState, Ensemble, FullStateVector,
                        NormalizationError, RegisterLayout, apply_unitary_n2f,
                        evolve_full, expand_full, flip_function_if_marked,
                        hadamard_n2, phase_on_marked, phase_on_zero_n2,
                        prepare_general_ensemble, prepare_uniform_ensemble,
                        project_constituent, read_ensemble, write_ensemble)
from .shor import (Advisory, PeriodReport, ShorParams, extract_period, modexp,
                   modexp_into_function, n1_validity_check, qft_n2, run_pqc_shor,
                   shor_params)
from .spectrometer import (CouplingConfig, Peak, Spectrum, default_couplings,
                           frequency_of, measure_expected, measure_sampled)

__version__ = "0.1.0"
