"""Shared random generators for automata and channels."""

import numpy as np

from qfasim.automata import MOQFA, QCFA
from qfasim.opcore import KrausChannel


def random_unitary(n: int, rng) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    # fix phases so the factorization is unique
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_state(n: int, rng) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_density(n: int, rng) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_hermitian(n: int, rng) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_effect(n: int, rng) -> np.ndarray:
    u = random_unitary(n, rng)
    return u @ np.diag(rng.uniform(0, 1, size=n)) @ u.conj().T


def random_projector(n: int, rank: int, rng) -> np.ndarray:
    u = random_unitary(n, rng)
    return u[:, :rank] @ u[:, :rank].conj().T


def random_channel(dim: int, n_kraus: int, rng) -> KrausChannel:
    # QR of a tall Gaussian block gives an exact isometry, hence CPTP Kraus
    z = rng.normal(size=(n_kraus * dim, dim)) + 1j * rng.normal(size=(n_kraus * dim, dim))
    q, _ = np.linalg.qr(z)
    return KrausChannel(tuple(q[i * dim:(i + 1) * dim, :] for i in range(n_kraus)))


def random_qcfa(c: int, q: int, alphabet, rng) -> QCFA:
    alphabet = tuple(alphabet)
    delta = {}
    channels = {}
    for s in range(c):
        for sym in alphabet:
            delta[(s, sym)] = int(rng.integers(0, c))
            channels[(s, sym)] = random_channel(q, int(rng.integers(1, 4)), rng)
    return QCFA(
        alphabet=alphabet,
        classical_states=c,
        quantum_dim=q,
        initial_classical=int(rng.integers(0, c)),
        initial_quantum=random_density(q, rng),
        delta=delta,
        channels=channels,
        accept=random_effect(q, rng),
    )


def random_moqfa(n: int, alphabet, rng, rank: int | None = None) -> MOQFA:
    alphabet = tuple(alphabet)
    if rank is None:
        rank = int(rng.integers(1, n))
    return MOQFA(
        alphabet=alphabet,
        initial_state=random_state(n, rng),
        unitaries={sym: random_unitary(n, rng) for sym in alphabet},
        accept=random_projector(n, rank, rng),
    )
