"""Deterministic data-parallel execution of per-constituent circuits.

Constituents never interact, so a circuit applied to an ensemble is a pure
fork-join over immutable inputs: the same instruction stream runs against
every labeled molecule class.  Parallelism exists only across constituents;
the arithmetic order inside one constituent is fixed, which makes results a
pure function of (program, ensemble) regardless of worker count or
scheduling.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import registers
from .registers import ConstituentState, Ensemble, RegisterLayout


@dataclass(frozen=True)
class ProgramOp:
    op: str
    args: dict = field(default_factory=dict)


@dataclass
class CircuitProgram:
    """Ordered list of primitive constituent-level operations."""

    ops: list[ProgramOp]

    def to_json_list(self) -> list[dict]:
        return [{"op": op.op, "args": _encode_args(op.op, op.args)} for op in self.ops]

    @classmethod
    def from_json_list(cls, doc: list[dict]) -> CircuitProgram:
        return cls([ProgramOp(entry["op"], _decode_args(entry["op"], entry.get("args", {})))
                    for entry in doc])


def _encode_args(name: str, args: dict) -> dict:
    out = dict(args)
    if name == "apply_unitary_n2f":
        mat = np.asarray(out["unitary"])
        out["unitary"] = [[[float(v.real), float(v.imag)] for v in row] for row in mat]
    return out


def _decode_args(name: str, args: dict) -> dict:
    out = dict(args)
    if name == "apply_unitary_n2f" and "unitary" in out:
        out["unitary"] = np.array(
            [[complex(re, im) for re, im in row] for row in out["unitary"]],
            dtype=np.complex128)
    return out


# Registry of constituent-level operations usable in programs.  Core gates are
# registered here; algorithm modules may add their own (e.g. modexp, qft_n2).
OPS: dict[str, object] = {
    "hadamard_n2": registers.hadamard_n2,
    "phase_on_marked": registers.phase_on_marked,
    "phase_on_zero_n2": registers.phase_on_zero_n2,
    "flip_function_if_marked": registers.flip_function_if_marked,
    "apply_unitary_n2f": registers.apply_unitary_n2f,
}


def register_op(name: str, fn) -> None:
    OPS[name] = fn


def validate_program(program: CircuitProgram, layout: RegisterLayout) -> None:
    n_states = layout.N1 * layout.N2
    for op in program.ops:
        if op.op not in OPS:
            raise ValueError(f"unknown operation {op.op!r}")
        if "marked_full" in op.args and not 0 <= op.args["marked_full"] < n_states:
            raise ValueError(f"marked state {op.args['marked_full']} invalid for layout")
        if "target_qubit" in op.args and not 0 <= op.args["target_qubit"] <= layout.m:
            raise ValueError(f"target qubit {op.args['target_qubit']} invalid for layout")


@dataclass(frozen=True)
class ExecPolicy:
    """Worker configuration; never affects results, only wall-clock."""

    workers: int = 1
    chunk_size: int | None = None
    master_seed: int | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        if self.chunk_size is not None and self.chunk_size < 1:
            raise ValueError("chunk size must be >= 1")


def _run_chunk(chunk: list[ConstituentState], compiled) -> list[ConstituentState]:
    out = []
    for state in chunk:
        for fn, kwargs in compiled:
            state = fn(state, **kwargs)
        out.append(state)
    return out


def execute(ensemble: Ensemble, program: CircuitProgram,
            policy: ExecPolicy | None = None) -> Ensemble:
    """Evolve every constituent through the program; output ordered by j1 label."""
    policy = policy or ExecPolicy()
    validate_program(program, ensemble.layout)
    compiled = [(OPS[op.op], op.args) for op in program.ops]
    ordered = sorted(ensemble.constituents, key=lambda c: c.j1_label)
    if policy.workers == 1:
        result = _run_chunk(ordered, compiled)
    else:
        size = policy.chunk_size or max(1, -(-len(ordered) // policy.workers))
        chunks = [ordered[i:i + size] for i in range(0, len(ordered), size)]
        with ThreadPoolExecutor(max_workers=policy.workers) as pool:
            parts = list(pool.map(lambda ch: _run_chunk(ch, compiled), chunks))
        result = [state for part in parts for state in part]
    return Ensemble(ensemble.layout, result)


def derive_stream(master_seed: int | None, j1_label: int, purpose_tag: str) -> np.random.Generator:
    """Reproducible RNG substream keyed by (seed, constituent label, purpose).

    The tag is folded through SHA-256 so distinct purposes can never collide;
    a None seed yields a fresh nondeterministic stream.
    """
    tag_key = int.from_bytes(hashlib.sha256(purpose_tag.encode()).digest()[:8], "big")
    if master_seed is None:
        seq = np.random.SeedSequence(spawn_key=(j1_label, tag_key))
    else:
        seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(j1_label, tag_key))
    return np.random.Generator(np.random.PCG64(seq))
