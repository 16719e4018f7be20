"""Order finding with a mixed n1-register and a partial Fourier transform.

Modular exponentiation writes a^x mod N_b into the function register with
x = j1*N2 + j2, so each constituent evaluates the same multiplicative cycle
shifted by the constant a^(j1*N2).  The Fourier transform then runs on the
n2-register alone; the shift only relabels function values, which makes the
n2 measurement distribution identical across constituents, with support on
multiples of N2/r whenever the order r divides N2.  Period recovery falls
back to continued fractions when it does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .engine import CircuitProgram, ExecPolicy, ProgramOp, execute
from .registers import ConstituentState, Ensemble, RegisterLayout, prepare_uniform_ensemble
from .spectrometer import Spectrum, default_couplings, measure_expected, measure_sampled


@dataclass(frozen=True)
class ShorParams:
    """Problem instance: order of `base` modulo `modulus`, register split n1 + n2."""

    modulus: int   # N_b, the number to factor
    base: int      # a, coprime to the modulus
    n1: int
    n2: int
    n: int         # argument width, N_b^2 < 2^n < 2 N_b^2
    m: int         # function width, 2^m >= N_b

    def __post_init__(self):
        nb = self.modulus
        if nb < 3 or nb & (nb - 1) == 0:
            raise ValueError("modulus must be >= 3 and not a power of two")
        if not 1 <= self.base < nb:
            raise ValueError(f"base must lie in [1, {nb})")
        if math.gcd(self.base, nb) != 1:
            raise ValueError(f"base {self.base} shares a factor with modulus {nb}")
        if not nb ** 2 < (1 << self.n) < 2 * nb ** 2:
            raise ValueError(f"argument width {self.n} violates N_b^2 < 2^n < 2 N_b^2")
        if (1 << self.m) < nb:
            raise ValueError(f"function width {self.m} cannot hold values mod {nb}")
        if self.n1 < 0 or self.n2 < 0 or self.n1 + self.n2 != self.n:
            raise ValueError(f"split {self.n1}+{self.n2} does not sum to n={self.n}")

    @property
    def N2(self) -> int:
        return 1 << self.n2

    @property
    def layout(self) -> RegisterLayout:
        return RegisterLayout(n1=self.n1, n2=self.n2, m=self.m)


def shor_params(modulus: int, base: int, n1: int | None = None,
                n2: int | None = None) -> ShorParams:
    """Derive register widths from the modulus and resolve the n1/n2 split."""
    if modulus < 3:
        raise ValueError("modulus must be >= 3")
    n = (modulus ** 2).bit_length()
    m = (modulus - 1).bit_length()
    if n1 is None and n2 is None:
        n1 = 0
    if n1 is None:
        n1 = n - n2
    elif n2 is None:
        n2 = n - n1
    return ShorParams(modulus=modulus, base=base, n1=n1, n2=n2, n=n, m=m)


# -- constituent-level operations --------------------------------------------


def modexp(state: ConstituentState, base: int, modulus: int) -> ConstituentState:
    """Map |j2>|0> to |j2>|a^(j1*N2 + j2) mod N_b>; a basis permutation.

    Requires the function register in |0>, which holds after preparation.
    """
    layout = state.layout
    if math.gcd(base, modulus) != 1:
        raise ValueError(f"base {base} shares a factor with modulus {modulus}")
    if (1 << layout.m) < modulus:
        raise ValueError("function register too small for this modulus")
    grid = state.amplitudes.reshape(2, 1 << layout.m, layout.N2)
    residue = float(np.sum(np.abs(grid[:, 1:, :]) ** 2))
    if residue > 1e-12:
        raise ValueError(f"function register not in |0> (residual mass {residue:.3e})")
    values = np.empty(layout.N2, dtype=np.int64)
    current = pow(base, state.j1_label * layout.N2, modulus)
    for j2 in range(layout.N2):
        values[j2] = current
        current = current * base % modulus
    new_grid = np.zeros_like(grid)
    cols = np.arange(layout.N2)
    new_grid[:, values, cols] = grid[:, 0, cols]
    return ConstituentState(state.j1_label, new_grid.reshape(-1), state.weight, layout)


def qft_n2(state: ConstituentState) -> ConstituentState:
    """Size-N2 Fourier transform on the n2 index: |j> -> sum_k e^{2 pi i jk/N2} |k> / sqrt(N2)."""
    layout = state.layout
    if layout.n2 == 0:
        return state
    blocks = state.amplitudes.reshape(-1, layout.N2)
    out = np.fft.ifft(blocks, axis=1, norm="ortho")
    return ConstituentState(state.j1_label, out.reshape(-1), state.weight, layout)


engine.register_op("modexp", modexp)
engine.register_op("qft_n2", qft_n2)


def modexp_into_function(ensemble: Ensemble, params: ShorParams,
                         policy: ExecPolicy | None = None) -> Ensemble:
    """Apply the modular-exponentiation permutation to every constituent."""
    if ensemble.layout != params.layout:
        raise ValueError("ensemble layout does not match parameters")
    program = CircuitProgram([ProgramOp("modexp", {"base": params.base,
                                                   "modulus": params.modulus})])
    return execute(ensemble, program, policy)


# -- classical post-processing ------------------------------------------------


def _prime_factors(value: int) -> list[int]:
    factors = []
    d = 2
    while d * d <= value:
        if value % d == 0:
            factors.append(d)
            while value % d == 0:
                value //= d
        d += 1 if d == 2 else 2
    if value > 1:
        factors.append(value)
    return factors


def _order_from_multiple(base: int, modulus: int, multiple: int) -> int:
    """Reduce a verified multiple of the order to the order itself."""
    order = multiple
    for p in _prime_factors(multiple):
        while order % p == 0 and pow(base, order // p, modulus) == 1:
            order //= p
    return order


def _convergents(num: int, den: int):
    """Continued-fraction convergents (h, k) of num/den."""
    coeffs = []
    x, y = num, den
    while y:
        q, x, y = x // y, y, x % y
        coeffs.append(q)
    out = []
    h0, k0, h1, k1 = 1, 0, 0, 1
    for q in coeffs:
        h0, k0, h1, k1 = q * h0 + h1, q * k0 + k1, h0, k0
        out.append((h0, k0))
    return out


def _cf_denominators(position: int, n2_size: int, bound: int) -> list[int]:
    """Candidate orders: convergent denominators k < bound with |pos/N2 - h/k| <= 1/(2 N2)."""
    out = []
    for h, k in _convergents(position, n2_size):
        if 1 <= k < bound and 2 * abs(position * k - h * n2_size) <= k:
            out.append(k)
    return out


@dataclass
class PeriodReport:
    modulus: int
    base: int
    peak_positions: list[int]
    r: int | None
    factors: tuple[int, int] | None
    transitions_observed: int
    method: str                    # "gcd" | "cf"
    failure_reason: str | None = None

    @property
    def success(self) -> bool:
        return self.factors is not None

    def to_json_dict(self) -> dict:
        return {
            "Nb": self.modulus,
            "a": self.base,
            "r": self.r,
            "factors": list(self.factors) if self.factors else None,
            "peaks": self.peak_positions,
            "transitions": self.transitions_observed,
            "method": self.method,
        }


def _factors_from_order(base: int, modulus: int, order: int):
    """gcd(a^(r/2) +/- 1, N_b) when the order is even and a^(r/2) != -1 mod N_b."""
    if order <= 1:
        return None, "trivial order r=1; retry with a different base"
    if order % 2:
        return None, "odd order; retry with a different base"
    half = pow(base, order // 2, modulus)
    if half == modulus - 1:
        return None, "a^(r/2) = -1 (mod N_b); retry with a different base"
    d = math.gcd(half - 1, modulus)
    if d in (1, modulus):
        d = math.gcd(half + 1, modulus)
    if d in (1, modulus):
        return None, "gcd produced only trivial divisors"
    return tuple(sorted((d, modulus // d))), None


def extract_period(peak_positions, n2_size: int, params: ShorParams, *,
                   transitions: int = 0) -> PeriodReport:
    """Recover the order from measured n2 peak positions, then split the modulus.

    `peak_positions` must be ordered most intense first.  When the support is
    exactly the multiples of N2/r the order is read off the gcd of the
    positions; otherwise the most intense ceil(2 log2 N_b) peaks go through
    continued fractions with denominators bounded by the modulus.
    """
    positions = [int(p) for p in peak_positions]
    if not positions:
        raise ValueError("need at least one peak position")
    base, modulus = params.base, params.modulus
    distinct = sorted(set(positions))

    g = math.gcd(*distinct) if len(distinct) > 1 else distinct[0]
    if g == 0:
        return PeriodReport(modulus, base, distinct, 1, None, transitions, "gcd",
                            "trivial order r=1; retry with a different base")
    if n2_size % g == 0 and pow(base, n2_size // g, modulus) == 1:
        order = _order_from_multiple(base, modulus, n2_size // g)
        factors, reason = _factors_from_order(base, modulus, order)
        return PeriodReport(modulus, base, distinct, order, factors, transitions,
                            "gcd", reason)

    top = [p for p in positions if p][: math.ceil(2 * math.log2(modulus))]
    candidates: set[int] = set()
    for pos in top:
        candidates.update(_cf_denominators(pos, n2_size, modulus))
    candidates.update(
        lcm for a in candidates for b in candidates
        if (lcm := math.lcm(a, b)) < modulus)
    for cand in sorted(candidates):
        if pow(base, cand, modulus) == 1:
            order = _order_from_multiple(base, modulus, cand)
            factors, reason = _factors_from_order(base, modulus, order)
            return PeriodReport(modulus, base, sorted(set(top)), order, factors,
                                transitions, "cf", reason)
    return PeriodReport(modulus, base, sorted(set(top)), None, None, transitions,
                        "cf", "no candidate order verified; retry with a different base")


@dataclass(frozen=True)
class Advisory:
    level: str      # "ok" | "warn" | "fail"
    message: str


def n1_validity_check(params: ShorParams) -> Advisory:
    """Advisory on whether N2 is large enough for sharp destructive interference.

    Never blocks a run: N2 >= N_b^2 is clean, N2 >= N_b is a warning, below
    that the transform cannot resolve the period reliably.
    """
    n2_size, nb = params.N2, params.modulus
    if n2_size >= nb * nb:
        return Advisory("ok", f"N2={n2_size} >= N_b^2={nb * nb}; full resolution")
    if n2_size >= nb:
        return Advisory("warn", f"N2={n2_size} below N_b^2={nb * nb}; period recovery "
                                "may need the continued-fraction path")
    return Advisory("fail", f"N2={n2_size} below N_b={nb}; n1 is too large for this modulus")


def run_pqc_shor(params: ShorParams, seed: int | None = None, mode: str = "expected",
                 samples: int = 4096,
                 policy: ExecPolicy | None = None) -> tuple[Ensemble, Spectrum, PeriodReport]:
    """Prepare, exponentiate, transform the n2-register, and read off the period.

    The readout couples the ancilla to the n2 qubits only.  Expected mode uses
    exact intensities; sampled mode draws `samples` molecules per constituent
    and keeps the most intense peaks.
    """
    layout = params.layout
    ensemble = prepare_uniform_ensemble(layout)
    program = CircuitProgram([
        ProgramOp("modexp", {"base": params.base, "modulus": params.modulus}),
        ProgramOp("qft_n2", {}),
    ])
    final = execute(ensemble, program, policy)
    config = default_couplings(layout.n2)
    weights: dict[int, float] = {}
    if mode == "expected":
        spectrum = measure_expected(final, config, target="n2")
        for p in spectrum.peaks:
            weights[p.source_state] = weights.get(p.source_state, 0.0) + p.intensity
    elif mode == "sampled":
        spectrum = measure_sampled(final, config, samples, seed, target="n2")
        for p in spectrum.peaks:
            weights[p.source_state] = weights.get(p.source_state, 0.0) + p.count
    else:
        raise ValueError(f"unknown measurement mode {mode!r}")
    ordered = sorted(weights, key=lambda v: (-weights[v], v))
    if mode == "sampled":
        ordered = ordered[: math.ceil(2 * math.log2(params.modulus))]
    report = extract_period(ordered, layout.N2, params,
                            transitions=spectrum.transition_count)
    return final, spectrum, report
