"""Ancilla-qubit spectrum readout.

The ancilla's transition frequency is split by its coupling to each observed
qubit: a register basis state |i_1 .. i_L> shows up at

    omega_0 + sum_k pi * J_k * (-1)^(i_k)   [rad/s]

and the peak points up when the ancilla sits in |0>, down for |1>.  Reading
one molecule therefore collapses its coherent subspace and emits exactly one
signed peak whose frequency names the collapsed basis state.

Couplings are kept as exact rationals so frequencies are exact multiples of
pi: peaks aggregate and serialize without float drift.  A nonzero omega_0 is
folded in through its (deterministic) float quotient by pi and is exact only
when it is zero, which is the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import derive_stream
from .registers import Ensemble

EXPECTED_INTENSITY_FLOOR = 1e-14

#: which qubits the ancilla coupling reads, and how a basis label is formed
COUPLING_TARGETS = ("argument", "n2", "function_argument")


class CouplingConfig:
    """Frequency map parameters: offset omega_0 (rad/s) and couplings J_k (Hz).

    Coupling k = 1..L addresses the k-th observed qubit, most significant
    first.  Construction verifies the map from L-bit states to frequencies is
    injective (super-increasing couplings are proven directly; otherwise the
    2^L subset sums are enumerated, which is only attempted for L <= 20).
    """

    def __init__(self, omega0: float, couplings):
        self.omega0 = float(omega0)
        self.couplings = tuple(Fraction(j) for j in couplings)
        if any(j == 0 for j in self.couplings):
            raise ValueError("all couplings must be nonzero")
        self.n_bits = len(self.couplings)
        self.den = math.lcm(*(j.denominator for j in self.couplings)) if self.couplings else 1
        self._nums = tuple(int(j * self.den) for j in self.couplings)
        self.omega0_over_pi = Fraction(self.omega0 / math.pi) if self.omega0 else Fraction(0)
        self._check_injective()
        self._num_table: np.ndarray | None = None

    def _check_injective(self) -> None:
        mags = sorted((abs(p) for p in self._nums), reverse=True)
        if all(mags[i] > sum(mags[i + 1:]) for i in range(len(mags))):
            return  # super-increasing magnitudes: subset sums provably distinct
        if self.n_bits > 20:
            raise ValueError("cannot verify injectivity beyond 20 non-super-increasing couplings")
        sums = [0]
        for p in self._nums:
            sums = sums + [s + 2 * p for s in sums]
        if len(set(sums)) != 1 << self.n_bits:
            raise ValueError("couplings do not map states to frequencies injectively")

    def shift_lookup(self):
        """Callable state -> signed-sum numerator, table-backed when affordable."""
        if self.n_bits > 22:
            return self.shift_numerator
        table = self.shift_table()
        return lambda v: int(table[v])

    def shift_table(self) -> np.ndarray:
        """Signed-sum numerators over self.den for every L-bit state (cached)."""
        if self._num_table is None:
            if self.n_bits > 22:
                raise ValueError("frequency table limited to 22 observed qubits")
            size = 1 << self.n_bits
            bound = sum(abs(p) for p in self._nums)
            if bound >= 2 ** 62:  # keep exactness for extreme coupling denominators
                table = np.array([self.shift_numerator(v) for v in range(size)], dtype=object)
            else:
                states = np.arange(size)
                table = np.zeros(size, dtype=np.int64)
                for k, p in enumerate(self._nums):
                    bit = (states >> (self.n_bits - 1 - k)) & 1
                    table += np.where(bit, -p, p)
            self._num_table = table
        return self._num_table

    def shift_numerator(self, state: int) -> int:
        total = 0
        for k, p in enumerate(self._nums):
            total += -p if (state >> (self.n_bits - 1 - k)) & 1 else p
        return total

    def freq_over_pi(self, state: int) -> Fraction:
        return Fraction(self.shift_numerator(state), self.den) + self.omega0_over_pi

    def frequency(self, state: int) -> float:
        return self.omega0 + math.pi * self.shift_numerator(state) / self.den


def _as_state_int(bits, config: CouplingConfig) -> int:
    if isinstance(bits, str):
        if len(bits) != config.n_bits:
            raise ValueError(f"expected {config.n_bits} bits, got {len(bits)}")
        return int(bits, 2) if bits else 0
    if isinstance(bits, (list, tuple, np.ndarray)):
        if len(bits) != config.n_bits:
            raise ValueError(f"expected {config.n_bits} bits, got {len(bits)}")
        value = 0
        for b in bits:
            value = (value << 1) | int(b)
        return value
    value = int(bits)
    if not 0 <= value < 1 << config.n_bits:
        raise ValueError(f"state {value} outside [0, 2^{config.n_bits})")
    return value


def frequency_of(bits, config: CouplingConfig) -> float:
    """Transition frequency (rad/s) of the ancilla against an L-bit register state."""
    return config.frequency(_as_state_int(bits, config))


def default_couplings(n: int) -> CouplingConfig:
    """omega_0 = 0 and J_k = 2^(n-k) Hz: frequency/pi = 2^n - 1 - 2*state, a bijection."""
    if n < 0:
        raise ValueError("need a nonnegative qubit count")
    return CouplingConfig(0.0, [1 << (n - k) for k in range(1, n + 1)])


@dataclass
class Peak:
    """One spectral line: exact frequency, direction, and its weight or count."""

    freq_num: int
    freq_den: int
    direction: str            # "up" iff the ancilla collapsed to |0>
    source_state: int         # the collapsed L-bit label behind this frequency
    n_bits: int
    intensity: float | None = None   # expected mode
    count: int | None = None         # sampled mode
    j1: int | None = None            # owning constituent (expected mode only)

    @property
    def frequency(self) -> float:
        return math.pi * self.freq_num / self.freq_den

    @property
    def state_bits(self) -> str:
        return format(self.source_state, f"0{self.n_bits}b")


@dataclass
class Spectrum:
    peaks: list[Peak]
    mode: str                 # "expected" | "sampled"
    seed: int | None
    config: CouplingConfig
    target: str
    transition_count: int = 0   # distinct (constituent, line) pairs

    def to_json_dict(self) -> dict:
        peaks = []
        for p in self.peaks:
            frac = Fraction(p.freq_num, p.freq_den) + self.config.omega0_over_pi
            entry = {
                "freq_over_pi": [frac.numerator, frac.denominator],
                "dir": p.direction,
                "state_bits": p.state_bits,
            }
            if self.mode == "sampled":
                entry["count"] = p.count
            else:
                entry["intensity"] = p.intensity
            peaks.append(entry)
        return {"mode": self.mode, "seed": self.seed, "peaks": peaks}

    def summary_lines(self) -> list[str]:
        """One human-readable line per peak: frequency in units of pi, direction, weight."""
        lines = []
        for p in self.peaks:
            frac = Fraction(p.freq_num, p.freq_den) + self.config.omega0_over_pi
            shown = str(frac.numerator) if frac.denominator == 1 else str(frac)
            value = f"count={p.count}" if self.mode == "sampled" else f"intensity={p.intensity:.6f}"
            lines.append(f"freq/pi={shown:>8}  {p.direction:<4}  {value}")
        return lines


def _target_geometry(ensemble: Ensemble, config: CouplingConfig, target: str):
    """Validate the coupling width and describe how basis labels are assembled."""
    layout = ensemble.layout
    widths = {
        "argument": layout.n,
        "n2": layout.n2,
        "function_argument": layout.m + layout.n,
    }
    if target not in widths:
        raise ValueError(f"unknown coupling target {target!r}; expected one of {COUPLING_TARGETS}")
    if config.n_bits != widths[target]:
        raise ValueError(
            f"coupling count {config.n_bits} does not match {target} width {widths[target]}")
    return layout


def _label_of(target: str, layout, j1: int, f, j2) -> np.ndarray:
    if target == "argument":
        return j1 * layout.N2 + j2
    if target == "n2":
        return j2
    return (f << layout.n) | (j1 * layout.N2 + j2)


def measure_expected(ensemble: Ensemble, config: CouplingConfig,
                     target: str = "argument") -> Spectrum:
    """Noise-free spectrum: one line per (constituent, observable label, direction).

    Intensity is weight * |amplitude|^2 summed over qubits the coupling does
    not observe; lines below 1e-14 are pruned.
    """
    layout = _target_geometry(ensemble, config, target)
    shift = config.shift_lookup()
    peaks: list[Peak] = []
    for c in sorted(ensemble.constituents, key=lambda c: c.j1_label):
        probs = (np.abs(c.amplitudes) ** 2).reshape(2, 1 << layout.m, layout.N2)
        if target != "function_argument":
            probs = probs.sum(axis=1)  # couplings do not see the function register
        grid = c.weight * probs.reshape(2, -1)
        anc, pos = np.nonzero(grid > EXPECTED_INTENSITY_FLOOR)
        f, j2 = np.divmod(pos, layout.N2) if target == "function_argument" else (None, pos)
        labels = _label_of(target, layout, c.j1_label, f, j2)
        for a, v, inten in zip(anc, labels, grid[anc, pos]):
            v = int(v)
            peaks.append(Peak(
                freq_num=shift(v), freq_den=config.den,
                direction="up" if a == 0 else "down",
                source_state=v, n_bits=config.n_bits,
                intensity=float(inten), j1=c.j1_label))
    peaks.sort(key=lambda p: (-p.freq_num, p.direction, p.j1))
    return Spectrum(peaks, "expected", None, config, target, transition_count=len(peaks))


def measure_sampled(ensemble: Ensemble, config: CouplingConfig,
                    molecules_per_constituent: int, seed: int | None,
                    target: str = "argument") -> Spectrum:
    """Born-rule sampling: each simulated molecule contributes one counted peak.

    Every constituent draws from its own RNG substream keyed by (seed, j1),
    so results do not depend on scheduling.  Equal (frequency, direction)
    lines merge across constituents, as they would on a real spectrometer.
    """
    if molecules_per_constituent < 1:
        raise ValueError("need at least one molecule per constituent")
    layout = _target_geometry(ensemble, config, target)
    shift = config.shift_lookup()
    merged: dict[tuple[int, int], int] = {}
    transitions = 0
    for c in sorted(ensemble.constituents, key=lambda c: c.j1_label):
        probs = np.abs(c.amplitudes) ** 2
        rng = derive_stream(seed, c.j1_label, "measure")
        draws = rng.choice(probs.size, size=molecules_per_constituent, p=probs / probs.sum())
        idx, counts = np.unique(draws, return_counts=True)
        anc = idx >> (layout.m + layout.n2)
        f = (idx >> layout.n2) & ((1 << layout.m) - 1)
        j2 = idx & (layout.N2 - 1)
        labels = _label_of(target, layout, c.j1_label, f, j2)
        local: dict[tuple[int, int], int] = {}
        for a, v, cnt in zip(anc, labels, counts):
            key = (int(v), int(a))
            local[key] = local.get(key, 0) + int(cnt)
        transitions += len(local)
        for key, cnt in local.items():
            merged[key] = merged.get(key, 0) + cnt
    peaks = [
        Peak(freq_num=shift(v), freq_den=config.den,
             direction="up" if a == 0 else "down",
             source_state=v, n_bits=config.n_bits, count=cnt)
        for (v, a), cnt in merged.items()
    ]
    peaks.sort(key=lambda p: (-p.freq_num, p.direction))
    return Spectrum(peaks, "sampled", seed, config, target, transition_count=transitions)
