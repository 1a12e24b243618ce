"""Automaton records for the four models and strict-cutpoint membership.

All automata are immutable after construction and evaluation is pure, so a
single automaton can serve many words concurrently.  The classical models
(GFA, PFA) support an exact-rational scalar mode with fractions.Fraction
entries; the quantum models are float only.

Words are sequences of symbol strings.  Symbols are arbitrary strings
("a", "p:3", "tau:++-"), so a bare str is never silently split.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .opcore import (
    TAU_EQ,
    KrausChannel,
    apply_channel,
    as_complex_matrix,
    check_density,
    check_effect,
    check_projector,
    frozen_array,
)

FLOAT_MODE = "float"
EXACT_MODE = "exact"


def as_word(word) -> tuple[str, ...]:
    """Normalize a word to a tuple of symbol strings."""
    if isinstance(word, str):
        raise TypeError(
            "a word is a sequence of symbol strings, not a str; wrap a single "
            "symbol as [symbol]")
    return tuple(str(s) for s in word)


def _check_mode(mode: str) -> str:
    if mode not in (FLOAT_MODE, EXACT_MODE):
        raise ValueError(f"scalar_mode must be {FLOAT_MODE!r} or {EXACT_MODE!r}, got {mode!r}")
    return mode


def exact_scalar(x) -> Fraction:
    """Coerce a scalar to an exact Fraction ("p/q" strings allowed)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def scalar_array(data, mode: str, ndim: int) -> np.ndarray:
    """Read-only numeric array in the requested scalar mode."""
    if mode == FLOAT_MODE:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != ndim:
            raise ValueError(f"expected a {ndim}-d array, got ndim {arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        return frozen_array(arr)
    raw = np.asarray(data, dtype=object)
    if raw.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got ndim {raw.ndim}")
    out = np.empty(raw.shape, dtype=object)
    for idx in np.ndindex(raw.shape):
        out[idx] = exact_scalar(raw[idx])
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CutpointSpec:
    """A strict cutpoint: acceptance means value > threshold, equality rejects."""

    threshold: object
    mode: str = "strict"

    def __post_init__(self):
        if self.mode != "strict":
            raise ValueError("only strict cutpoints are supported")


@dataclass(frozen=True)
class Membership:
    sign: int          # +1 accept, -1 reject
    ambiguous: bool    # float value within tol of the cutpoint


def member(value, cutpoint, tol: float = TAU_EQ) -> Membership:
    """Strict-cutpoint sign of value against cutpoint.

    +1 iff value > cutpoint; equality reports -1.  When either side is a
    float, values within tol of the cutpoint also report -1 but with the
    ambiguous flag set.  Exact scalars (int/Fraction both sides) never flag.
    """
    if isinstance(cutpoint, CutpointSpec):
        cutpoint = cutpoint.threshold
    if isinstance(value, (int, Fraction)) and isinstance(cutpoint, (int, Fraction)):
        return Membership(1 if value > cutpoint else -1, False)
    diff = float(value) - float(cutpoint)
    if abs(diff) < tol:
        return Membership(-1, True)
    return Membership(1 if diff > 0 else -1, False)


def _check_alphabet(alphabet) -> tuple[str, ...]:
    symbols = tuple(str(s) for s in alphabet)
    if len(set(symbols)) != len(symbols):
        raise ValueError("alphabet contains duplicate symbols")
    return symbols


def _check_transition_map(transitions, alphabet, coerce) -> dict:
    out = {}
    for sym in alphabet:
        if sym not in transitions:
            raise ValueError(f"missing transition for symbol {sym!r}")
        out[sym] = coerce(transitions[sym])
    extra = set(transitions) - set(alphabet)
    if extra:
        raise ValueError(f"transitions given for symbols outside the alphabet: {sorted(extra)}")
    return out


@dataclass(frozen=True, eq=False)
class GFA:
    """Generalized finite automaton: initial row vector, one square real
    matrix per symbol, final column vector; the acceptance value of a word
    is the corresponding matrix product."""

    alphabet: tuple[str, ...]
    initial: np.ndarray
    transitions: dict[str, np.ndarray]
    final: np.ndarray
    scalar_mode: str = FLOAT_MODE

    def __post_init__(self):
        mode = _check_mode(self.scalar_mode)
        alphabet = _check_alphabet(self.alphabet)
        initial = scalar_array(self.initial, mode, ndim=1)
        final = scalar_array(self.final, mode, ndim=1)
        k = initial.shape[0]
        if final.shape != (k,):
            raise ValueError(f"final vector has length {final.shape[0]}, expected {k}")

        def mat(a):
            m = scalar_array(a, mode, ndim=2)
            if m.shape != (k, k):
                raise ValueError(f"transition matrix shape {m.shape}, expected {(k, k)}")
            return m

        transitions = _check_transition_map(self.transitions, alphabet, mat)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "final", final)

    @property
    def states(self) -> int:
        return self.initial.shape[0]


def gfa_run(gfa: GFA, word, start=None) -> np.ndarray:
    """Row state vector after reading word (from the initial vector by default)."""
    x = gfa.initial if start is None else start
    for sym in as_word(word):
        mat = gfa.transitions.get(sym)
        if mat is None:
            raise ValueError(f"symbol {sym!r} is not in the alphabet")
        x = np.dot(x, mat)
    return x


def evaluate_gfa(gfa: GFA, word, start=None):
    """Acceptance value of a word (a Fraction in exact mode)."""
    val = np.dot(gfa_run(gfa, word, start), gfa.final)
    if gfa.scalar_mode == EXACT_MODE:
        return val if isinstance(val, Fraction) else Fraction(val)
    return float(val)


def _check_distribution(vec, mode: str, what: str):
    if mode == EXACT_MODE:
        total = sum(vec)
        if any(x < 0 for x in vec):
            raise ValueError(f"{what} has a negative entry")
        if total != 1:
            raise ValueError(f"{what} sums to {total}, expected 1")
    else:
        if float(np.min(vec)) < -1e-12:
            raise ValueError(f"{what} has a negative entry")
        if abs(float(np.sum(vec)) - 1.0) > 1e-12:
            raise ValueError(f"{what} sums to {float(np.sum(vec))!r}, expected 1")


@dataclass(frozen=True, eq=False)
class PFA:
    """One-way probabilistic automaton.  The end-marker matrix is applied
    after the word, before reading off the accepting states, so
    f(w) = initial . P_w . end_marker . 1_F."""

    alphabet: tuple[str, ...]
    initial: np.ndarray
    transitions: dict[str, np.ndarray]
    end_marker: np.ndarray
    accepting: frozenset[int]
    scalar_mode: str = FLOAT_MODE

    def __post_init__(self):
        mode = _check_mode(self.scalar_mode)
        alphabet = _check_alphabet(self.alphabet)
        initial = scalar_array(self.initial, mode, ndim=1)
        m = initial.shape[0]
        _check_distribution(initial, mode, "initial distribution")

        def stochastic(a, what):
            mat = scalar_array(a, mode, ndim=2)
            if mat.shape != (m, m):
                raise ValueError(f"{what} has shape {mat.shape}, expected {(m, m)}")
            for i in range(m):
                _check_distribution(mat[i], mode, f"row {i} of {what}")
            return mat

        transitions = _check_transition_map(
            self.transitions, alphabet, lambda a: stochastic(a, "a transition matrix"))
        end_marker = stochastic(self.end_marker, "the end-marker matrix")
        accepting = frozenset(int(i) for i in self.accepting)
        if any(i < 0 or i >= m for i in accepting):
            raise ValueError("accepting state index out of range")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "end_marker", end_marker)
        object.__setattr__(self, "accepting", accepting)

    @property
    def states(self) -> int:
        return self.initial.shape[0]

    def accept_indicator(self) -> np.ndarray:
        """Column indicator of the accepting set, in the scalar mode."""
        if self.scalar_mode == EXACT_MODE:
            vec = [Fraction(1) if i in self.accepting else Fraction(0)
                   for i in range(self.states)]
            return scalar_array(vec, EXACT_MODE, ndim=1)
        vec = np.zeros(self.states)
        vec[sorted(self.accepting)] = 1.0
        return frozen_array(vec)


def pfa_run(pfa: PFA, word, start=None) -> np.ndarray:
    """State distribution after reading word, before the end-marker."""
    x = pfa.initial if start is None else start
    for sym in as_word(word):
        mat = pfa.transitions.get(sym)
        if mat is None:
            raise ValueError(f"symbol {sym!r} is not in the alphabet")
        x = np.dot(x, mat)
    return x


def evaluate_pfa(pfa: PFA, word, start=None):
    """Acceptance probability including the end-marker step."""
    x = np.dot(pfa_run(pfa, word, start), pfa.end_marker)
    val = np.dot(x, pfa.accept_indicator())
    if pfa.scalar_mode == EXACT_MODE:
        return val if isinstance(val, Fraction) else Fraction(val)
    return float(val)


def _clamp_probability(val: float, what: str) -> float:
    if val < -1e-12 or val > 1.0 + 1e-12:
        raise ValueError(f"{what} produced acceptance value {val!r} outside [0, 1]")
    return min(1.0, max(0.0, val))


@dataclass(frozen=True, eq=False)
class MOQFA:
    """Measure-once automaton: one unitary per symbol acting on a pure
    state, a single projective measurement at the end."""

    alphabet: tuple[str, ...]
    initial_state: np.ndarray
    unitaries: dict[str, np.ndarray]
    accept: np.ndarray

    def __post_init__(self):
        alphabet = _check_alphabet(self.alphabet)
        psi = np.asarray(self.initial_state, dtype=np.complex128)
        if psi.ndim != 1:
            raise ValueError("initial state must be a vector")
        n = psi.shape[0]
        if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
            raise ValueError("initial state is not a unit vector")

        def unitary(u):
            m = as_complex_matrix(u)
            if m.shape != (n, n):
                raise ValueError(f"unitary has shape {m.shape}, expected {(n, n)}")
            if np.linalg.norm(m.conj().T @ m - np.eye(n)) > 1e-10:
                raise ValueError("transition matrix is not unitary")
            return frozen_array(m)

        unitaries = _check_transition_map(self.unitaries, alphabet, unitary)
        accept = check_projector(self.accept)
        if accept.shape != (n, n):
            raise ValueError("accepting projector has the wrong dimension")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "initial_state", frozen_array(psi))
        object.__setattr__(self, "unitaries", unitaries)
        object.__setattr__(self, "accept", frozen_array(accept))

    @property
    def dim(self) -> int:
        return self.initial_state.shape[0]


def moqfa_run(moqfa: MOQFA, word, start=None) -> np.ndarray:
    """State vector after applying the word's unitaries left to right."""
    psi = moqfa.initial_state if start is None else start
    for sym in as_word(word):
        u = moqfa.unitaries.get(sym)
        if u is None:
            raise ValueError(f"symbol {sym!r} is not in the alphabet")
        psi = u @ psi
    return psi


def evaluate_moqfa(moqfa: MOQFA, word, start=None) -> float:
    """Acceptance probability <psi_w| P |psi_w>, clamped to [0, 1]."""
    psi = moqfa_run(moqfa, word, start)
    val = float((psi.conj() @ moqfa.accept @ psi).real)
    return _clamp_probability(val, "measure-once evaluation")


@dataclass(frozen=True, eq=False)
class QCFA:
    """Hybrid automaton: a deterministic classical controller selects a
    CPTP channel per (state, symbol) acting on a fixed quantum register;
    acceptance is a final effect measurement."""

    alphabet: tuple[str, ...]
    classical_states: int
    quantum_dim: int
    initial_classical: int
    initial_quantum: np.ndarray
    delta: dict[tuple[int, str], int]
    channels: dict[tuple[int, str], KrausChannel]
    accept: np.ndarray

    def __post_init__(self):
        alphabet = _check_alphabet(self.alphabet)
        c, q = int(self.classical_states), int(self.quantum_dim)
        if c < 1 or q < 1:
            raise ValueError("state counts must be positive")
        if not 0 <= int(self.initial_classical) < c:
            raise ValueError("initial classical state out of range")
        rho0 = check_density(self.initial_quantum)
        if rho0.shape != (q, q):
            raise ValueError("initial density operator has the wrong dimension")
        accept = check_effect(self.accept)
        if accept.shape != (q, q):
            raise ValueError("accepting effect has the wrong dimension")
        for s in range(c):
            for sym in alphabet:
                key = (s, sym)
                if key not in self.delta:
                    raise ValueError(f"classical transition undefined for {key!r}")
                if not 0 <= int(self.delta[key]) < c:
                    raise ValueError(f"classical transition target out of range for {key!r}")
                chan = self.channels.get(key)
                if chan is None:
                    raise ValueError(f"channel undefined for {key!r}")
                if chan.dim_in != q or chan.dim_out != q:
                    raise ValueError(f"channel for {key!r} does not act on dimension {q}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "classical_states", c)
        object.__setattr__(self, "quantum_dim", q)
        object.__setattr__(self, "initial_classical", int(self.initial_classical))
        object.__setattr__(self, "initial_quantum", frozen_array(rho0))
        object.__setattr__(self, "accept", frozen_array(accept))


def qcfa_run(qcfa: QCFA, word, start=None) -> tuple[int, np.ndarray]:
    """(classical state, density operator) after reading word."""
    if start is None:
        s, rho = qcfa.initial_classical, qcfa.initial_quantum
    else:
        s, rho = start
    for sym in as_word(word):
        key = (s, sym)
        if key not in qcfa.delta:
            raise ValueError(f"symbol {sym!r} is not in the alphabet")
        rho = apply_channel(qcfa.channels[key], rho)
        s = qcfa.delta[key]
    return s, rho


def evaluate_qcfa(qcfa: QCFA, word, start=None) -> float:
    """Acceptance probability Tr(E rho_final), clamped to [0, 1]."""
    _, rho = qcfa_run(qcfa, word, start)
    val = float(np.trace(qcfa.accept @ rho).real)
    return _clamp_probability(val, "hybrid evaluation")


_EVALUATORS = {
    GFA: (gfa_run, evaluate_gfa),
    PFA: (pfa_run, evaluate_pfa),
    MOQFA: (moqfa_run, evaluate_moqfa),
    QCFA: (qcfa_run, evaluate_qcfa),
}


def evaluate(automaton, word, start=None):
    """Model-generic acceptance value of a word."""
    for cls, (_, ev) in _EVALUATORS.items():
        if isinstance(automaton, cls):
            return ev(automaton, word, start)
    raise TypeError(f"not an automaton: {type(automaton).__name__}")


def acceptance_grid(automaton, prefixes, suffixes) -> np.ndarray:
    """Acceptance values f(x + y) over a prefix/suffix grid.

    Prefix states are computed once and threaded into each suffix
    continuation.  The result dtype is object for exact-mode classical
    automata and float64 otherwise.
    """
    for cls, (run, ev) in _EVALUATORS.items():
        if isinstance(automaton, cls):
            break
    else:
        raise TypeError(f"not an automaton: {type(automaton).__name__}")
    prefixes = [as_word(x) for x in prefixes]
    suffixes = [as_word(y) for y in suffixes]
    exact = getattr(automaton, "scalar_mode", FLOAT_MODE) == EXACT_MODE
    values = np.empty((len(prefixes), len(suffixes)), dtype=object if exact else np.float64)
    for i, x in enumerate(prefixes):
        state = run(automaton, x)
        for j, y in enumerate(suffixes):
            values[i, j] = ev(automaton, y, start=state)
    return values
