"""Exact linearization of the quantum models into generalized automata.

A channel acting on operators is a linear map on the real space of
Hermitian matrices, so in an orthonormal Hermitian basis every symbol
becomes a real matrix on coordinate vectors.  A hybrid automaton with c
classical states and register dimension q linearizes to a c*q^2-state
GFA; a measure-once automaton is the c = 1 case with unitary channels
and n^2 states.
"""

from __future__ import annotations

import numpy as np

from .automata import FLOAT_MODE, GFA, MOQFA, QCFA
from .opcore import KrausChannel, apply_channel, as_complex_matrix, hermitian_basis


def hermitian_coords(x, basis) -> np.ndarray:
    """Real coordinate vector (Tr(B_i X))_i of X in a Hermitian basis."""
    m = as_complex_matrix(x)
    return np.array([float(np.sum(b.conj() * m).real) for b in basis])


def coords_to_operator(vec, basis) -> np.ndarray:
    """Inverse of hermitian_coords on the basis span."""
    out = np.zeros_like(basis[0], dtype=np.complex128)
    for c, b in zip(vec, basis):
        out = out + c * b
    return out


def channel_transfer_matrix(channel: KrausChannel, basis) -> np.ndarray:
    """Real q^2 x q^2 matrix of the channel in Hermitian coordinates.

    Column j holds the coordinates of the channel applied to basis
    element j, so coords(Phi(X)) = matrix . coords(X) for Hermitian X.
    """
    q = channel.dim_in
    if channel.dim_out != q:
        raise ValueError("transfer matrices need equal input and output dimensions")
    if len(basis) != q * q or basis[0].shape != (q, q):
        raise ValueError(f"basis does not match channel dimension {q}")
    cols = [hermitian_coords(apply_channel(channel, b), basis) for b in basis]
    return np.column_stack(cols)


def qcfa_to_gfa(automaton: QCFA) -> GFA:
    """c*q^2-state GFA with the same acceptance value on every word.

    The coordinate vector concatenates per-classical-block Hermitian
    coordinates of the register state.  Reading a symbol routes block s to
    block delta(s, symbol) through that channel's transfer matrix; the GFA
    stores the transpose so that row vectors evolve by right
    multiplication.  The final vector repeats the coordinates of the
    accepting effect once per block.
    """
    c, q = automaton.classical_states, automaton.quantum_dim
    basis = hermitian_basis(q)
    n = q * q
    dim = c * n
    transitions = {}
    for sym in automaton.alphabet:
        m = np.zeros((dim, dim))
        for s in range(c):
            tgt = automaton.delta[(s, sym)]
            block = channel_transfer_matrix(automaton.channels[(s, sym)], basis)
            m[tgt * n:(tgt + 1) * n, s * n:(s + 1) * n] = block
        transitions[sym] = m.T
    initial = np.zeros(dim)
    s0 = automaton.initial_classical
    initial[s0 * n:(s0 + 1) * n] = hermitian_coords(automaton.initial_quantum, basis)
    final = np.tile(hermitian_coords(automaton.accept, basis), c)
    return GFA(automaton.alphabet, initial, transitions, final, FLOAT_MODE)


def moqfa_to_gfa(automaton: MOQFA) -> GFA:
    """n^2-state GFA for a measure-once automaton, via the one-classical-
    state hybrid view with unitary conjugation channels."""
    n = automaton.dim
    psi = automaton.initial_state
    rho0 = np.outer(psi, psi.conj())
    delta = {(0, sym): 0 for sym in automaton.alphabet}
    channels = {(0, sym): KrausChannel.from_unitary(u)
                for sym, u in automaton.unitaries.items()}
    hybrid = QCFA(
        alphabet=automaton.alphabet,
        classical_states=1,
        quantum_dim=n,
        initial_classical=0,
        initial_quantum=rho0,
        delta=delta,
        channels=channels,
        accept=automaton.accept,
    )
    return qcfa_to_gfa(hybrid)
