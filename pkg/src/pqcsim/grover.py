"""Zero-failure Grover search over sub-databases, plus the repetition baseline.

The mixed n1-register splits an N-item database into N1 sub-databases of N2
items searched simultaneously, one per constituent.  Each constituent runs a
phase-matched Grover variant in which both phase rotations use the same angle
phi, chosen so that after exactly J iterations the marked sub-database holds
its marked item with probability exactly 1.  A single final query then flips
the ancilla on the marked state and one ensemble measurement reads the answer
off the one downward peak.

Sub-databases without the marked item are provably unaffected: the three
non-oracle steps act on the uniform state as a global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import CircuitProgram, ExecPolicy, ProgramOp, derive_stream, execute
from .registers import (ConstituentState, Ensemble, RegisterLayout, hadamard_n2,
                        phase_on_marked, phase_on_zero_n2, prepare_uniform_ensemble)
from .spectrometer import Spectrum, default_couplings, measure_expected

#: ratio floor is taken on the true value; at N2 = 4 the float quotient lands
#: a hair under the exact integer 1, so nudge before flooring.
_FLOOR_GUARD = 1e-9


class BudgetError(ValueError):
    """Requested n1 exceeds what the molecule budget can populate."""


@dataclass(frozen=True)
class ResourceBudget:
    """Molecule accounting: every constituent needs at least one logical molecule."""

    molecules: float = 6.022e23       # N_E, default one mole
    molecules_per_logical: int = 1    # N_s

    def __post_init__(self):
        if self.molecules <= 0 or self.molecules_per_logical < 1:
            raise ValueError("budget requires positive molecule counts")

    @property
    def max_n1(self) -> int:
        # Rounded, not floored: the qubit bound log2(N_E) is quoted to the
        # nearest qubit (one mole ~ 2^78.995 reads as 79).
        return round(math.log2(self.molecules / self.molecules_per_logical))

    def check(self, n1: int) -> None:
        if n1 > self.max_n1:
            raise BudgetError(f"n1={n1} exceeds budget limit of {self.max_n1} mixed qubits")


@dataclass(frozen=True)
class GroverParams:
    """Derived iteration count and matched phase for one sub-database size."""

    sub_db_size: int          # N2
    beta: float               # arcsin(1/sqrt(N2))
    iterations: int           # J
    phi: float | None         # matched phase; None for the trivial N2 = 1 search


def grover_params(sub_db_size: int, iterations: int | None = None) -> GroverParams:
    """Iteration count J = floor((pi/2 - beta)/(2 beta)) + 1 and its exact phase.

    phi = 2 arcsin(sqrt(N2) sin(pi / (4J + 2))) drives the marked amplitude to
    exactly 1 after J iterations; it exists (arcsin argument <= 1) for every
    J >= ceil((pi/2 - beta)/(2 beta)), which the default J always satisfies.
    An explicit `iterations` override below that threshold is rejected.
    """
    n2_size = sub_db_size
    if n2_size < 1 or n2_size & (n2_size - 1):
        raise ValueError(f"sub-database size {n2_size} is not a power of two")
    if n2_size == 1:
        if iterations not in (None, 0):
            raise ValueError("a one-item sub-database takes zero iterations")
        return GroverParams(1, math.pi / 2, 0, None)
    beta = math.asin(1.0 / math.sqrt(n2_size))
    ratio = (math.pi / 2 - beta) / (2 * beta)
    if iterations is None:
        iterations = math.floor(ratio + _FLOOR_GUARD) + 1
    elif iterations < math.ceil(ratio - _FLOOR_GUARD):
        raise ValueError(
            f"{iterations} iterations cannot reach certainty for N2={n2_size} "
            f"(minimum {math.ceil(ratio - _FLOOR_GUARD)})")
    phi = 2 * math.asin(math.sqrt(n2_size) * math.sin(math.pi / (4 * iterations + 2)))
    return GroverParams(n2_size, beta, iterations, phi)


def grover_iteration(state: ConstituentState, marked_full: int,
                     params: GroverParams) -> ConstituentState:
    """One search iteration: oracle phase, H on n2, phase on |0..0>, H on n2."""
    state = phase_on_marked(state, marked_full, params.phi)
    state = hadamard_n2(state)
    state = phase_on_zero_n2(state, params.phi)
    return hadamard_n2(state)


def grover_program(marked_full: int, params: GroverParams) -> CircuitProgram:
    """J iterations followed by the final marking query that flips the ancilla."""
    ops: list[ProgramOp] = []
    for _ in range(params.iterations):
        ops.extend([
            ProgramOp("phase_on_marked", {"marked_full": marked_full, "phi": params.phi}),
            ProgramOp("hadamard_n2", {}),
            ProgramOp("phase_on_zero_n2", {"phi": params.phi}),
            ProgramOp("hadamard_n2", {}),
        ])
    ops.append(ProgramOp("flip_function_if_marked",
                         {"marked_full": marked_full, "target_qubit": 0}))
    return CircuitProgram(ops)


@dataclass
class SearchReport:
    marked_full: int
    queries_used: int
    success_probability: float
    spectrum: Spectrum

    def to_json_dict(self) -> dict:
        return {
            "marked": self.marked_full,
            "queries": self.queries_used,
            "p_success": self.success_probability,
            "spectrum": self.spectrum.to_json_dict(),
        }


def run_pqc_grover(layout: RegisterLayout, marked_full: int,
                   budget: ResourceBudget | None = None,
                   policy: ExecPolicy | None = None,
                   iterations: int | None = None) -> tuple[Ensemble, SearchReport]:
    """Search all N1 sub-databases in parallel and read out the expected spectrum.

    The single function qubit doubles as the readout ancilla, so the layout
    must declare m = 0: the final query flips the ancilla itself.
    """
    if layout.m != 0:
        raise ValueError("search layouts use the ancilla as the function qubit (m = 0)")
    j1_mark, j2_mark = layout.split_marked(marked_full)
    if budget is not None:
        budget.check(layout.n1)
    params = grover_params(layout.N2, iterations)
    ensemble = prepare_uniform_ensemble(layout)
    final = execute(ensemble, grover_program(marked_full, params), policy)
    marked_state = final.constituents[j1_mark]
    success = float(np.abs(marked_state.amplitudes[layout.N2 + j2_mark]) ** 2)
    spectrum = measure_expected(final, default_couplings(layout.n), target="argument")
    report = SearchReport(marked_full, params.iterations + 1, success, spectrum)
    return final, report


# -- query/molecule trade-off ------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n1: int
    N1: int
    nq_asym: float        # pi * sqrt(N / N1) / 4
    nq_real: int          # J + 1
    product_asym: float   # pi^2 N / 16, identical for every split by algebra
    product_real: int     # (J + 1)^2 * N1


def sweep_tradeoff(n: int, n1_values=None) -> list[SweepRow]:
    """Evaluate the queries-vs-molecules trade across register splits of n qubits."""
    if n < 1:
        raise ValueError("need at least one argument qubit")
    splits = list(range(n + 1)) if n1_values is None else sorted(set(int(v) for v in n1_values))
    if any(not 0 <= v <= n for v in splits):
        raise ValueError("every n1 must lie in [0, n]")
    total = 1 << n
    product_asym = math.pi ** 2 * total / 16
    rows = []
    for n1 in splits:
        n1_count = 1 << n1
        n2_count = total // n1_count
        queries = grover_params(n2_count).iterations + 1
        rows.append(SweepRow(
            n1=n1, N1=n1_count,
            nq_asym=math.pi * math.sqrt(n2_count) / 4,
            nq_real=queries,
            product_asym=product_asym,
            product_real=queries ** 2 * n1_count))
    return rows


SWEEP_CSV_HEADER = "n1,N1,Nq_asym,Nq_real,product"


def sweep_csv(rows: list[SweepRow], realized: bool = False) -> str:
    """Delimited table; the product column is asymptotic unless `realized`."""
    lines = [SWEEP_CSV_HEADER]
    for r in rows:
        product = r.product_real if realized else r.product_asym
        lines.append(f"{r.n1},{r.N1},{r.nq_asym!r},{r.nq_real},{product!r}")
    return "\n".join(lines) + "\n"


# -- repetition-parallel baseline --------------------------------------------


def rpa_state_probs(db_size: int, marked: int = 0) -> np.ndarray:
    """Born probabilities after one standard Grover iteration on a pure state.

    Simulated through the same primitive gates on an all-pure layout
    (n1 = 0), with the standard phase phi = pi.
    """
    if db_size < 4 or db_size & (db_size - 1):
        raise ValueError("database size must be a power of two >= 4")
    if not 0 <= marked < db_size:
        raise ValueError(f"marked state {marked} out of range")
    layout = RegisterLayout(n1=0, n2=int(math.log2(db_size)))
    state = prepare_uniform_ensemble(layout).constituents[0]
    params = GroverParams(db_size, math.asin(db_size ** -0.5), 1, math.pi)
    state = grover_iteration(state, marked, params)
    return np.abs(state.amplitudes[:db_size]) ** 2


def rpa_one_iteration_distribution(db_size: int, marked: int = 0) -> tuple[float, float]:
    """(p_marked, p_other) read off the simulated state vector, not closed forms."""
    probs = rpa_state_probs(db_size, marked)
    other = (marked + 1) % db_size
    return float(probs[marked]), float(probs[other])


def rpa_trial_counts(db_size: int, k: int, seed: int | None,
                     marked: int = 0, trial: int = 0) -> np.ndarray:
    """Outcome counts of k one-iteration computers measured simultaneously."""
    if k < 1:
        raise ValueError("need at least one repetition")
    probs = rpa_state_probs(db_size, marked)
    rng = derive_stream(seed, trial, "rpa")
    return rng.multinomial(k, probs / probs.sum())


def rpa_majority_vote(db_size: int, k: int, seed: int | None,
                      marked: int = 0, trial: int = 0) -> tuple[int, bool]:
    """Sample k one-iteration computers and return the modal outcome.

    Ties break toward the smallest state index.  Each trial draws from its
    own derived RNG substream.
    """
    counts = rpa_trial_counts(db_size, k, seed, marked, trial)
    winner = int(np.argmax(counts))
    return winner, winner == marked
