"""Register layout and the exact ensemble state representation.

An ensemble quantum computer holds one molecule per classical label of the
mixed part of its argument register.  No gate in the instruction set ever
creates coherence between distinct labels, so the full density matrix is
stored exactly as a weighted list of labeled pure states ("constituents"):
each constituent pins the n1-register to a basis state and keeps a complex
amplitude vector over the coherent (ancilla, function, n2) subspace only.
This costs O(N1 * 2^(1+m+n2)) memory instead of a 2^(1+m+n1+n2) square
density matrix and is exact, not an approximation.

Qubit order is fixed throughout: ancilla (most significant), then the m
function qubits, then the n1-register, then the n2-register (least
significant).  A combined argument label therefore reads j1*N2 + j2, and a
constituent's stored vector is indexed by anc*(2^m * N2) + f*N2 + j2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

NORM_ATOL = 1e-12           # amplitude-level comparisons
INPUT_NORM_ATOL = 1e-9      # user-supplied preparation data is less precise
MAX_CONSTITUENT_AMPS = 1 << 22
MAX_TOTAL_AMPS = 1 << 25
MAX_FULL_QUBITS = 16        # full-space expansion is a test oracle only


class CapacityError(ValueError):
    """Requested state exceeds the configured memory bounds."""


class NormalizationError(ValueError):
    """Input amplitudes are not normalized."""


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit partition: 1 ancilla | m function qubits | n1 mixed | n2 coherent."""

    n1: int
    n2: int
    m: int = 0
    has_ancilla: bool = True

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0 or self.m < 0:
            raise ValueError("qubit counts must be nonnegative")
        if self.n1 + self.n2 < 1:
            raise ValueError("argument register needs at least one qubit")
        if not self.has_ancilla:
            raise ValueError("the ancilla qubit is required for readout")

    @property
    def N1(self) -> int:
        return 1 << self.n1

    @property
    def N2(self) -> int:
        return 1 << self.n2

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def constituent_dim(self) -> int:
        """Length of a constituent's stored vector: 2^(1 + m + n2)."""
        return 1 << (1 + self.m + self.n2)

    @property
    def full_dim(self) -> int:
        """Length of a fully expanded vector over all 1 + m + n qubits."""
        return 1 << (1 + self.m + self.n)

    def split_marked(self, marked_full: int) -> tuple[int, int]:
        """Decompose a combined argument label into (j1, j2)."""
        if not 0 <= marked_full < self.N1 * self.N2:
            raise ValueError(f"marked state {marked_full} outside [0, {self.N1 * self.N2})")
        return divmod(marked_full, self.N2)


@dataclass
class ConstituentState:
    """One molecule class: classical n1 label plus a pure coherent-subspace vector."""

    j1_label: int
    amplitudes: np.ndarray
    weight: float
    layout: RegisterLayout

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def check(self, atol: float = NORM_ATOL) -> None:
        if not 0 <= self.j1_label < self.layout.N1:
            raise ValueError(f"j1 label {self.j1_label} outside [0, {self.layout.N1})")
        if self.amplitudes.shape != (self.layout.constituent_dim,):
            raise ValueError("amplitude vector length does not match layout")
        if self.weight < 0:
            raise ValueError("constituent weight must be nonnegative")
        if abs(self.norm_sq() - 1.0) > atol:
            raise NormalizationError(f"constituent j1={self.j1_label} has norm^2 {self.norm_sq()}")


def _with_amps(state: ConstituentState, amps: np.ndarray) -> ConstituentState:
    return ConstituentState(state.j1_label, amps, state.weight, state.layout)


@dataclass
class Ensemble:
    """Weighted list of constituents; the exact mixed state of the whole EQC."""

    layout: RegisterLayout
    constituents: list[ConstituentState]

    def check(self, atol: float = NORM_ATOL) -> None:
        labels = [c.j1_label for c in self.constituents]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate j1 labels in ensemble")
        total = sum(c.weight for c in self.constituents)
        if abs(total - 1.0) > atol:
            raise NormalizationError(f"ensemble weights sum to {total}")
        for c in self.constituents:
            if c.layout != self.layout:
                raise ValueError("constituent layout differs from ensemble layout")
            c.check(atol)

    def constituent(self, j1: int) -> ConstituentState:
        for c in self.constituents:
            if c.j1_label == j1:
                return c
        raise KeyError(f"no constituent with j1={j1}")

    def to_json_dict(self) -> dict:
        return {
            "n1": self.layout.n1,
            "n2": self.layout.n2,
            "m": self.layout.m,
            "constituents": [
                {
                    "j1": c.j1_label,
                    "weight": c.weight,
                    "amps": [[float(a.real), float(a.imag)] for a in c.amplitudes],
                }
                for c in self.constituents
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> Ensemble:
        layout = RegisterLayout(n1=int(doc["n1"]), n2=int(doc["n2"]), m=int(doc["m"]))
        constituents = []
        for entry in doc["constituents"]:
            amps = np.array([complex(re, im) for re, im in entry["amps"]], dtype=np.complex128)
            constituents.append(
                ConstituentState(int(entry["j1"]), amps, float(entry["weight"]), layout)
            )
        ens = cls(layout, constituents)
        ens.check(atol=INPUT_NORM_ATOL)
        return ens


def write_ensemble(ensemble: Ensemble, path) -> None:
    with open(path, "w") as fh:
        json.dump(ensemble.to_json_dict(), fh)
        fh.write("\n")


def read_ensemble(path) -> Ensemble:
    with open(path) as fh:
        return Ensemble.from_json_dict(json.load(fh))


# -- preparation -----------------------------------------------------------


def _check_capacity(layout: RegisterLayout,
                    max_constituent_amps: int = MAX_CONSTITUENT_AMPS,
                    max_total_amps: int = MAX_TOTAL_AMPS) -> None:
    dim = layout.constituent_dim
    if dim > max_constituent_amps:
        raise CapacityError(
            f"constituent vector of {dim} amplitudes exceeds bound {max_constituent_amps}")
    if layout.N1 * dim > max_total_amps:
        raise CapacityError(
            f"ensemble of {layout.N1} x {dim} amplitudes exceeds bound {max_total_amps}")


def prepare_uniform_ensemble(layout: RegisterLayout, *,
                             max_constituent_amps: int = MAX_CONSTITUENT_AMPS,
                             max_total_amps: int = MAX_TOTAL_AMPS) -> Ensemble:
    """N1 equal-weight constituents: ancilla and function in |0>, n2-register uniform."""
    _check_capacity(layout, max_constituent_amps, max_total_amps)
    n1_count, n2_count = layout.N1, layout.N2
    weight = 1.0 / n1_count
    amp = 1.0 / np.sqrt(n2_count)
    constituents = []
    for j1 in range(n1_count):
        amps = np.zeros(layout.constituent_dim, dtype=np.complex128)
        amps[:n2_count] = amp  # ancilla=0, function=0 block occupies the lowest indices
        constituents.append(ConstituentState(j1, amps, weight, layout))
    return Ensemble(layout, constituents)


def prepare_general_ensemble(layout: RegisterLayout, coefficients) -> Ensemble:
    """Constituents carrying caller-supplied n2 amplitude rows, one row per j1 label."""
    coeffs = np.asarray(coefficients, dtype=np.complex128)
    if coeffs.shape != (layout.N1, layout.N2):
        raise ValueError(f"coefficient table must have shape ({layout.N1}, {layout.N2})")
    _check_capacity(layout)
    row_norms = np.sum(np.abs(coeffs) ** 2, axis=1)
    bad = np.nonzero(np.abs(row_norms - 1.0) > INPUT_NORM_ATOL)[0]
    if bad.size:
        raise NormalizationError(
            f"rows not normalized for j1 in {bad.tolist()} (norms {row_norms[bad].tolist()})")
    weight = 1.0 / layout.N1
    constituents = []
    for j1 in range(layout.N1):
        amps = np.zeros(layout.constituent_dim, dtype=np.complex128)
        amps[:layout.N2] = coeffs[j1]
        constituents.append(ConstituentState(j1, amps, weight, layout))
    return Ensemble(layout, constituents)


# -- primitive gates on a constituent ---------------------------------------


def _wht_inplace(blocks: np.ndarray) -> None:
    """Unnormalized fast Walsh-Hadamard transform over the last axis."""
    size = blocks.shape[-1]
    h = 1
    while h < size:
        view = blocks.reshape(-1, size // (2 * h), 2, h)
        top = view[:, :, 0, :].copy()
        view[:, :, 0, :] += view[:, :, 1, :]
        view[:, :, 1, :] = top - view[:, :, 1, :]
        h *= 2


_HADAMARD_CACHE: dict[int, np.ndarray] = {}
_HADAMARD_DENSE_MAX = 256  # one matmul beats the butterfly on small registers


def _hadamard_matrix(size: int) -> np.ndarray:
    if size not in _HADAMARD_CACHE:
        h = np.array([[1]], dtype=np.complex128)
        block = np.array([[1, 1], [1, -1]], dtype=np.complex128)
        while h.shape[0] < size:
            h = np.kron(h, block)
        _HADAMARD_CACHE[size] = h * size ** -0.5
    return _HADAMARD_CACHE[size]


def hadamard_n2(state: ConstituentState) -> ConstituentState:
    """Tensor-product Hadamard on every n2 qubit (identity when n2 = 0)."""
    layout = state.layout
    if layout.n2 == 0:
        return state
    if layout.N2 <= _HADAMARD_DENSE_MAX:
        # symmetric matrix: no transpose needed on the right
        amps = state.amplitudes.reshape(-1, layout.N2) @ _hadamard_matrix(layout.N2)
    else:
        amps = state.amplitudes.reshape(-1, layout.N2).copy()
        _wht_inplace(amps)
        amps *= layout.N2 ** -0.5
    return _with_amps(state, amps.reshape(-1))


def phase_on_marked(state: ConstituentState, marked_full: int, phi: float) -> ConstituentState:
    """Multiply the marked argument state's amplitudes by e^{i phi}.

    The oracle addresses the whole argument register; on a constituent it
    reduces to classical conditioning on the n1 label plus a phase on the
    matching n2 slice.
    """
    layout = state.layout
    j1_mark, j2_mark = layout.split_marked(marked_full)
    if state.j1_label != j1_mark:
        return state
    amps = state.amplitudes.copy()
    amps.reshape(-1, layout.N2)[:, j2_mark] *= np.exp(1j * phi)
    return _with_amps(state, amps)


def phase_on_zero_n2(state: ConstituentState, phi: float) -> ConstituentState:
    """Multiply amplitudes whose n2 index is 0 by e^{i phi} (identity when n2 = 0)."""
    layout = state.layout
    if layout.n2 == 0:
        return state
    amps = state.amplitudes.copy()
    amps.reshape(-1, layout.N2)[:, 0] *= np.exp(1j * phi)
    return _with_amps(state, amps)


def flip_function_if_marked(state: ConstituentState, marked_full: int,
                            target_qubit: int = 0) -> ConstituentState:
    """X on one ancilla/function qubit, restricted to the marked argument state.

    target_qubit 0 is the ancilla; 1..m are function qubits, most significant
    first.
    """
    layout = state.layout
    if not 0 <= target_qubit <= layout.m:
        raise ValueError(f"target qubit {target_qubit} outside ancilla/function range")
    j1_mark, j2_mark = layout.split_marked(marked_full)
    if state.j1_label != j1_mark:
        return state
    # Row index over (ancilla, function) is anc*2^m + f; the target occupies
    # bit m (ancilla) or bit m - target_qubit (function qubit).
    bit = layout.m if target_qubit == 0 else layout.m - target_qubit
    rows = np.arange(1 << (1 + layout.m))
    amps = state.amplitudes.copy()
    view = amps.reshape(-1, layout.N2)
    view[:, j2_mark] = view[rows ^ (1 << bit), j2_mark]
    return _with_amps(state, amps)


def apply_unitary_n2f(state: ConstituentState, unitary: np.ndarray,
                      check: bool = True) -> ConstituentState:
    """Dense unitary over the (function x n2) subspace, applied per ancilla slice."""
    layout = state.layout
    dim = 1 << (layout.m + layout.n2)
    mat = np.asarray(unitary, dtype=np.complex128)
    if mat.shape != (dim, dim):
        raise ValueError(f"unitary must be {dim} x {dim} for this layout")
    if check:
        defect = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
        if defect > 1e-10:
            raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
    blocks = state.amplitudes.reshape(2, dim)
    return _with_amps(state, (blocks @ mat.T).reshape(-1))


# -- full-space oracle plumbing ---------------------------------------------


@dataclass
class FullStateVector:
    """One constituent expanded over all 1 + m + n qubits (n1 qubits pinned)."""

    amplitudes: np.ndarray
    layout: RegisterLayout


def expand_full(state: ConstituentState, *, max_qubits: int = MAX_FULL_QUBITS) -> FullStateVector:
    """Embed a constituent into the full register, n1 qubits in basis state j1."""
    layout = state.layout
    total_qubits = 1 + layout.m + layout.n
    if total_qubits > max_qubits:
        raise CapacityError(f"full expansion of {total_qubits} qubits exceeds limit {max_qubits}")
    full = np.zeros((2, 1 << layout.m, layout.N1, layout.N2), dtype=np.complex128)
    full[:, :, state.j1_label, :] = state.amplitudes.reshape(2, 1 << layout.m, layout.N2)
    return FullStateVector(full.reshape(-1), layout)


def project_constituent(full: FullStateVector, j1_label: int,
                        weight: float = 1.0, atol: float = NORM_ATOL) -> ConstituentState:
    """Inverse of expand_full; requires all amplitude mass on the given j1 label."""
    layout = full.layout
    grid = full.amplitudes.reshape(2, 1 << layout.m, layout.N1, layout.N2)
    outside = np.delete(grid, j1_label, axis=2)
    leak = float(np.sum(np.abs(outside) ** 2))
    if leak > atol:
        raise ValueError(f"amplitude mass {leak} outside n1 basis state {j1_label}")
    return ConstituentState(j1_label, grid[:, :, j1_label, :].reshape(-1).copy(), weight, full.layout)


def evolve_full(full: FullStateVector, unitary: np.ndarray) -> FullStateVector:
    """Apply a dense unitary over the entire 1 + m + n qubit space (test oracle)."""
    dim = full.layout.full_dim
    mat = np.asarray(unitary, dtype=np.complex128)
    if mat.shape != (dim, dim):
        raise ValueError(f"unitary must be {dim} x {dim}")
    return FullStateVector(mat @ full.amplitudes, full.layout)
