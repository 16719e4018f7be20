"""Independent full-register oracles for cross-checking the constituent engine.

Everything here evolves the expanded (ancilla, function, n1, n2) tensor
directly, treating the argument register as one block the way the abstract
gates are defined, with no knowledge of the labeled-constituent shortcut.
Dense matrices are built by explicit Kronecker products.
"""

import numpy as np

from pqcsim.registers import FullStateVector, RegisterLayout

H2 = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def kron_chain(mats):
    out = np.array([[1.0]], dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def _grid(full: FullStateVector):
    lay = full.layout
    return full.amplitudes.reshape(2, 1 << lay.m, lay.N1, lay.N2)


def _pack(grid, layout) -> FullStateVector:
    return FullStateVector(np.ascontiguousarray(grid).reshape(-1), layout)


def full_hadamard_n2(full: FullStateVector) -> FullStateVector:
    lay = full.layout
    if lay.n2 == 0:
        return full
    hn = kron_chain([H2] * lay.n2)
    grid = _grid(full)
    return _pack(np.einsum("kl,afnl->afnk", hn, grid), lay)


def full_phase_on_marked(full: FullStateVector, marked: int, phi: float) -> FullStateVector:
    lay = full.layout
    phases = np.ones(lay.N1 * lay.N2, dtype=np.complex128)
    phases[marked] = np.exp(1j * phi)
    grid = _grid(full).reshape(2, 1 << lay.m, lay.N1 * lay.N2) * phases
    return _pack(grid.reshape(2, 1 << lay.m, lay.N1, lay.N2), lay)


def full_phase_on_zero_n2(full: FullStateVector, phi: float) -> FullStateVector:
    lay = full.layout
    if lay.n2 == 0:
        return full
    grid = _grid(full).copy()
    grid[..., 0] *= np.exp(1j * phi)
    return _pack(grid, lay)


def full_flip_if_marked(full: FullStateVector, marked: int, target: int) -> FullStateVector:
    lay = full.layout
    grid = _grid(full).reshape(2, 1 << lay.m, lay.N1 * lay.N2).copy()
    column = grid[:, :, marked]
    if target == 0:
        grid[:, :, marked] = column[::-1, :]
    else:
        perm = np.arange(1 << lay.m) ^ (1 << (lay.m - target))
        grid[:, :, marked] = column[:, perm]
    return _pack(grid.reshape(2, 1 << lay.m, lay.N1, lay.N2), lay)


def full_apply_unitary_n2f(full: FullStateVector, unitary: np.ndarray) -> FullStateVector:
    lay = full.layout
    fdim = 1 << lay.m
    u4 = np.asarray(unitary, dtype=np.complex128).reshape(fdim, lay.N2, fdim, lay.N2)
    grid = _grid(full)
    return _pack(np.einsum("pqfk,afnk->apnq", u4, grid), lay)


FULL_OPS = {
    "hadamard_n2": lambda full, **kw: full_hadamard_n2(full),
    "phase_on_marked": lambda full, marked_full, phi: full_phase_on_marked(full, marked_full, phi),
    "phase_on_zero_n2": lambda full, phi: full_phase_on_zero_n2(full, phi),
    "flip_function_if_marked":
        lambda full, marked_full, target_qubit: full_flip_if_marked(full, marked_full, target_qubit),
    "apply_unitary_n2f": lambda full, unitary: full_apply_unitary_n2f(full, unitary),
}


def run_full(full: FullStateVector, program) -> FullStateVector:
    for op in program.ops:
        full = FULL_OPS[op.op](full, **op.args)
    return full


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_program(layout: RegisterLayout, rng, length: int = 8):
    """Random sequence over the primitive gate set, valid for the layout."""
    from pqcsim.engine import CircuitProgram, ProgramOp

    names = ["hadamard_n2", "phase_on_marked", "phase_on_zero_n2",
             "flip_function_if_marked", "apply_unitary_n2f"]
    ops = []
    for _ in range(length):
        name = names[rng.integers(len(names))]
        if name == "hadamard_n2":
            args = {}
        elif name == "phase_on_marked":
            args = {"marked_full": int(rng.integers(layout.N1 * layout.N2)),
                    "phi": float(rng.uniform(0, 2 * np.pi))}
        elif name == "phase_on_zero_n2":
            args = {"phi": float(rng.uniform(0, 2 * np.pi))}
        elif name == "flip_function_if_marked":
            args = {"marked_full": int(rng.integers(layout.N1 * layout.N2)),
                    "target_qubit": int(rng.integers(layout.m + 1))}
        else:
            args = {"unitary": random_unitary(1 << (layout.m + layout.n2), rng)}
        ops.append(ProgramOp(name, args))
    return CircuitProgram(ops)


def exhaustive_order(base: int, modulus: int) -> int:
    """Smallest r >= 1 with base^r = 1 mod modulus, by brute force."""
    value = base % modulus
    r = 1
    while value != 1:
        value = value * base % modulus
        r += 1
        if r > modulus:
            raise ValueError("no multiplicative order: base not coprime to modulus")
    return r
