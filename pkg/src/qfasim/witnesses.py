"""Prepare-test witness automata and their verification.

Two families, both over an alphabet of prepare symbols "p:<index>" and
test symbols "tau:<+/- pattern>":

* a hybrid classical-quantum automaton whose prepare symbols pin one of
  c*q^2 - 1 deterministic register configurations (replacement channels
  plus a classical jump) and whose test symbols realize an arbitrary sign
  pattern on all of them at once through block-diagonal effects built from
  a Hilbert-Schmidt Gram solve;

* a measure-once automaton whose accepting projector is balanced on a
  family of paired-coordinate test states, and whose test symbols rotate
  the projector along its unitary orbit so each state's acceptance moves
  to the prescribed side of 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .automata import MOQFA, QCFA, acceptance_grid, member
from .opcore import (
    TAU_EQ,
    KrausChannel,
    as_complex_matrix,
    check_density,
    check_effect,
    expm,
    frozen_array,
    hermitian_basis,
    hs_inner,
    operator_norm,
)
from .signrank import SignMatrix, all_sign_vectors, sign_pattern_label


def prepare_symbol(index: int) -> str:
    """Name of the prepare symbol for a 1-based configuration index."""
    return f"p:{index}"


def test_symbol(eta) -> str:
    """Name of the test symbol for a sign vector."""
    return "tau:" + sign_pattern_label(eta)


def parse_test_symbol(symbol: str) -> tuple[int, ...]:
    tag, _, body = symbol.partition(":")
    if tag != "tau" or any(ch not in "+-" for ch in body) or not body:
        raise ValueError(f"not a test symbol: {symbol!r}")
    return tuple(1 if ch == "+" else -1 for ch in body)


@dataclass(frozen=True)
class EtaMode:
    """Which sign vectors a witness carries test symbols for: the full
    2^d enumeration, or a seeded uniform sample."""

    kind: str
    count: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("full", "sampled"):
            raise ValueError(f"eta mode must be 'full' or 'sampled', got {self.kind!r}")
        if self.kind == "sampled" and (self.count is None or self.count < 1):
            raise ValueError("sampled mode needs a positive count")

    @classmethod
    def full(cls) -> "EtaMode":
        return cls("full")

    @classmethod
    def sampled(cls, count: int, seed: int = 0) -> "EtaMode":
        return cls("sampled", count=count, seed=seed)

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "EtaMode":
        """Parse the CLI spelling: "full" or "sample:N"."""
        if text == "full":
            return cls.full()
        if text.startswith("sample:"):
            return cls.sampled(int(text.split(":", 1)[1]), seed=seed)
        raise ValueError(f"eta mode must be 'full' or 'sample:N', got {text!r}")


def select_sign_vectors(d: int, mode: EtaMode) -> tuple[tuple[int, ...], ...]:
    """Sign vectors for the requested mode.  Full enumeration is limited
    to d <= 20; sampled draws are deduplicated preserving order, since
    duplicate vectors would name the same test symbol."""
    if mode.kind == "full":
        if d > 20:
            raise ValueError(
                f"full enumeration of 2^{d} sign vectors refused (d > 20); use sampling")
        return tuple(all_sign_vectors(d))
    rng = np.random.default_rng(mode.seed)
    draws = rng.integers(0, 2, size=(mode.count, d)) * 2 - 1
    seen = {}
    for row in draws:
        seen.setdefault(tuple(int(v) for v in row), None)
    return tuple(seen)


def effect_channel(effect, q: int | None = None) -> KrausChannel:
    """Channel whose first-basis-state population reproduces Tr(E rho).

    From the spectral decomposition E = sum_i l_i |v_i><v_i|, the Kraus
    pairs sqrt(l_i)|0><v_i| and sqrt(1 - l_i)|1><v_i| send everything to
    the first two basis states, splitting each eigendirection's weight
    between them; measuring |0><0| afterwards gives the effect statistics.
    Needs register dimension at least 2 for the reject state.
    """
    e = check_effect(as_complex_matrix(effect))
    dim = e.shape[0]
    if q is not None and q != dim:
        raise ValueError(f"effect has dimension {dim}, expected {q}")
    if dim < 2:
        raise ValueError("effect channels need register dimension >= 2")
    vals, vecs = np.linalg.eigh(e)
    vals = np.clip(vals, 0.0, 1.0)
    ops = []
    for lam, vec in zip(vals, vecs.T):
        bra = vec.conj()
        hit = np.zeros((dim, dim), dtype=np.complex128)
        hit[0, :] = np.sqrt(lam) * bra
        miss = np.zeros((dim, dim), dtype=np.complex128)
        miss[1, :] = np.sqrt(1.0 - lam) * bra
        ops.append(hit)
        ops.append(miss)
    return KrausChannel(tuple(ops))


def replacement_channel(state) -> KrausChannel:
    """Channel that discards its input and outputs the fixed density.

    Kraus set sqrt(mu_j)|phi_j><k| over all eigenpairs (mu_j, phi_j) of
    the target and all basis states k.
    """
    rho = check_density(as_complex_matrix(state))
    dim = rho.shape[0]
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    ops = []
    for mu, vec in zip(vals, vecs.T):
        for k in range(dim):
            op = np.zeros((dim, dim), dtype=np.complex128)
            op[:, k] = np.sqrt(mu) * vec
            ops.append(op)
    return KrausChannel(tuple(ops))


def prepare_unitary(start, target) -> np.ndarray:
    """Unitary V with V start = target, for unit vectors of one dimension.

    Both vectors are completed to orthonormal bases by Gram-Schmidt over
    the standard basis (skipping near-parallel directions), and V maps one
    frame onto the other.
    """
    phi = np.asarray(start, dtype=np.complex128)
    psi = np.asarray(target, dtype=np.complex128)
    if phi.shape != psi.shape or phi.ndim != 1:
        raise ValueError("start and target must be vectors of one dimension")
    for name, vec in (("start", phi), ("target", psi)):
        if abs(np.linalg.norm(vec) - 1.0) > 1e-10:
            raise ValueError(f"{name} vector is not a unit vector")
    return _complete_basis(psi) @ _complete_basis(phi).conj().T


def _complete_basis(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    cols = [x / np.linalg.norm(x)]
    for i in range(n):
        if len(cols) == n:
            break
        e = np.zeros(n, dtype=np.complex128)
        e[i] = 1.0
        for c in cols:
            e = e - c * np.dot(c.conj(), e)
        norm = np.linalg.norm(e)
        if norm > 1e-8:
            cols.append(e / norm)
    if len(cols) != n:
        raise ValueError("failed to complete an orthonormal basis")
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class QcfaWitnessBundle:
    """A hybrid witness automaton plus its construction data.

    d = c*q^2 - 1 prepared configurations, margin t with t * m_bound < 1/2,
    configs the (classical index, prepared density) pairs in construction
    order, etas the sign vectors the alphabet carries tests for.
    """

    automaton: QCFA
    d: int
    t: float
    m_bound: float
    configs: tuple[tuple[int, np.ndarray], ...]
    etas: tuple[tuple[int, ...], ...]
    eta_mode: EtaMode

    @property
    def prefixes(self) -> list[tuple[str, ...]]:
        return [(prepare_symbol(i + 1),) for i in range(self.d)]

    @property
    def suffixes(self) -> list[tuple[str, ...]]:
        return [(test_symbol(eta),) for eta in self.etas]

    def expected_signs(self) -> np.ndarray:
        """d x len(etas) sign grid: column nu is the sign vector eta_nu."""
        return np.array(self.etas, dtype=np.int8).T


def build_qcfa_witness(c: int, q: int, eta_mode: EtaMode | None = None) -> QcfaWitnessBundle:
    """Hybrid witness whose d = c*q^2 - 1 prepared configurations get
    shattered at strict cutpoint 1/2 with margin exactly t per test.

    Prepared register states are the maximally mixed state nudged along
    each traceless basis direction; prepare symbols install them with a
    replacement channel and a classical jump.  For each sign vector, a
    Gram solve over the configurations produces a block-diagonal operator
    hitting the prescribed signs, and 1/2 + t times its blocks are effects
    realized by per-block channels; t = 1/(4 * m_bound) with m_bound an
    analytic norm bound covering every sign vector at once.
    """
    if c < 2 or q < 2:
        raise ValueError("the hybrid witness needs c >= 2 and q >= 2")
    mode = eta_mode if eta_mode is not None else EtaMode.full()
    basis = hermitian_basis(q)
    traceless = basis[1:]
    mixed = np.eye(q, dtype=np.complex128) / q
    eps = 1.0 / (2 * q * max(operator_norm(h) for h in traceless))
    for _ in range(10):
        states = [mixed] + [mixed + eps * h for h in traceless]
        if all(float(np.linalg.eigvalsh(s).min()) >= 0.0 for s in states[1:]):
            break
        eps /= 2
    else:
        raise ValueError("could not make the nudged states positive semidefinite")
    d = c * q * q - 1
    # configurations in lexicographic (classical index, state index) order,
    # dropping the final pair
    pairs = [(i, k) for i in range(c) for k in range(q * q)][:d]

    gram = np.zeros((d, d))
    for l1, (i1, k1) in enumerate(pairs):
        for l2, (i2, k2) in enumerate(pairs):
            if i1 == i2:
                gram[l1, l2] = hs_inner(states[k1], states[k2])
    lam_min = float(np.linalg.eigvalsh(gram).min())
    block_norm = max(operator_norm(states[k]) for _, k in pairs)
    m_bound = d * (1.0 / lam_min) * block_norm
    t = 1.0 / (4.0 * m_bound)

    etas = select_sign_vectors(d, mode)
    coeffs = np.linalg.solve(gram, np.array(etas, dtype=np.float64).T)

    alphabet = [prepare_symbol(l + 1) for l in range(d)]
    alphabet += [test_symbol(eta) for eta in etas]
    delta: dict[tuple[int, str], int] = {}
    channels: dict[tuple[int, str], KrausChannel] = {}
    for l, (target, k) in enumerate(pairs):
        sym = prepare_symbol(l + 1)
        chan = replacement_channel(states[k])
        for i in range(c):
            delta[(i, sym)] = target
            channels[(i, sym)] = chan
    half = 0.5 * np.eye(q, dtype=np.complex128)
    for col, eta in enumerate(etas):
        sym = test_symbol(eta)
        blocks = [np.zeros((q, q), dtype=np.complex128) for _ in range(c)]
        for l, (i, k) in enumerate(pairs):
            blocks[i] += coeffs[l, col] * states[k]
        for i in range(c):
            delta[(i, sym)] = i
            channels[(i, sym)] = effect_channel(half + t * blocks[i])
    accept = np.zeros((q, q), dtype=np.complex128)
    accept[0, 0] = 1.0
    automaton = QCFA(
        alphabet=tuple(alphabet),
        classical_states=c,
        quantum_dim=q,
        initial_classical=0,
        initial_quantum=mixed,
        delta=delta,
        channels=channels,
        accept=accept,
    )
    configs = tuple((i, frozen_array(states[k])) for i, k in pairs)
    return QcfaWitnessBundle(automaton, d, t, m_bound, configs, etas, mode)


@dataclass(frozen=True, eq=False)
class MoqfaWitnessBundle:
    """A measure-once witness automaton plus its construction data.

    The accepting projector has rank r on an n-dimensional register,
    s = n - r, and the d = 2*r*s test states are balanced against it;
    t = 1/(4 n^2) is the orbit rotation angle.
    """

    automaton: MOQFA
    n: int
    r: int
    s: int
    d: int
    t: float
    test_states: tuple[np.ndarray, ...]
    etas: tuple[tuple[int, ...], ...]
    eta_mode: EtaMode

    @property
    def prefixes(self) -> list[tuple[str, ...]]:
        return [(prepare_symbol(j + 1),) for j in range(self.d)]

    @property
    def suffixes(self) -> list[tuple[str, ...]]:
        return [(test_symbol(eta),) for eta in self.etas]

    def expected_signs(self) -> np.ndarray:
        return np.array(self.etas, dtype=np.int8).T


def _orbit_test_states(n: int) -> list[np.ndarray]:
    # Each state couples one accepted basis vector with one rejected one;
    # the real-phase family reads the real part of the mixing block, the
    # i-phase family its (negated) imaginary part.
    r, s = n // 2, n - n // 2
    states = []
    for phase in (1.0, 1.0j):
        for a in range(r):
            for b in range(s):
                vec = np.zeros(n, dtype=np.complex128)
                vec[a] = 1.0
                vec[r + b] = phase
                states.append(vec / np.sqrt(2))
    return states


def _mixing_generator(eta, r: int, s: int) -> np.ndarray:
    """Skew-Hermitian block generator from a sign vector: the r x s block
    has entries eta_R - i*eta_I in the test-state ordering."""
    rs = r * s
    x = np.zeros((r, s), dtype=np.complex128)
    for idx in range(rs):
        a, b = divmod(idx, s)
        x[a, b] = eta[idx] - 1j * eta[rs + idx]
    k = np.zeros((r + s, r + s), dtype=np.complex128)
    k[:r, r:] = x
    k[r:, :r] = -x.conj().T
    return k


def build_moqfa_witness(n: int, eta_mode: EtaMode | None = None) -> MoqfaWitnessBundle:
    """Measure-once witness on n dimensions with d = floor(n^2/2) prepared
    states shattered at strict cutpoint 1/2.

    The accepting projector keeps the first r = floor(n/2) coordinates.
    Prepare symbols rotate the initial state onto balanced test states;
    each test symbol applies exp(t K) for the sign vector's mixing
    generator K, moving every test state's acceptance to 1/2 + t*eta_j
    up to a uniform second-order shift and a third-order remainder.
    """
    if n < 2:
        raise ValueError("the measure-once witness needs dimension n >= 2")
    mode = eta_mode if eta_mode is not None else EtaMode.full()
    r, s = n // 2, n - n // 2
    d = 2 * r * s
    t = 1.0 / (4.0 * n * n)
    states = _orbit_test_states(n)
    start = np.zeros(n, dtype=np.complex128)
    start[0] = 1.0
    unitaries: dict[str, np.ndarray] = {}
    for j, psi in enumerate(states):
        unitaries[prepare_symbol(j + 1)] = prepare_unitary(start, psi)
    etas = select_sign_vectors(d, mode)
    for eta in etas:
        unitaries[test_symbol(eta)] = expm(t * _mixing_generator(eta, r, s))
    alphabet = tuple(prepare_symbol(j + 1) for j in range(d))
    alphabet += tuple(test_symbol(eta) for eta in etas)
    accept = np.diag([1.0 + 0.0j] * r + [0.0j] * s)
    automaton = MOQFA(
        alphabet=alphabet,
        initial_state=start,
        unitaries=unitaries,
        accept=accept,
    )
    return MoqfaWitnessBundle(
        automaton, n, r, s, d, t,
        tuple(frozen_array(psi) for psi in states), etas, mode)


def orbit_jacobian(n: int, step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the orbit evaluation map.

    Rows: acceptance probabilities of the d test states; columns: motion
    of the reference projector along the d elementary mixing directions.
    The exact derivative is a signed permutation (identity on the
    real-phase half, minus identity on the i-phase half), so the finite
    difference should be full rank d with unit-scale singular values.
    """
    r, s = n // 2, n - n // 2
    rs = r * s
    d = 2 * rs
    p0 = np.diag([1.0 + 0.0j] * r + [0.0j] * s)
    states = _orbit_test_states(n)
    jac = np.zeros((d, d))
    for mu in range(d):
        a, b = divmod(mu % rs, s)
        x = np.zeros((r, s), dtype=np.complex128)
        x[a, b] = 1.0 if mu < rs else 1.0j
        k = np.zeros((n, n), dtype=np.complex128)
        k[:r, r:] = x
        k[r:, :r] = -x.conj().T
        for sgn in (1.0, -1.0):
            u = expm(sgn * step * k)
            moved = u.conj().T @ p0 @ u
            column = np.array([float((psi.conj() @ moved @ psi).real) for psi in states])
            jac[:, mu] += sgn * column / (2.0 * step)
    return jac


@dataclass(frozen=True, eq=False)
class ShatteringReport:
    """Sign agreement of an automaton's acceptance grid with an expected
    sign pattern."""

    pairs_checked: int
    agreements: int
    min_margin: float
    ambiguous_count: int
    first_mismatch: tuple | None
    values: np.ndarray

    @property
    def passed(self) -> bool:
        return self.pairs_checked > 0 and self.agreements == self.pairs_checked

    def to_json_dict(self) -> dict:
        return {
            "pairs_checked": self.pairs_checked,
            "agreements": self.agreements,
            "min_margin": self.min_margin,
            "ambiguous_count": self.ambiguous_count,
        }


def verify_shattering(automaton, prefixes, suffixes, cutpoint, expected,
                      tol: float = TAU_EQ) -> ShatteringReport:
    """Evaluate every prefix+suffix pair and compare strict-cutpoint signs
    with the expected pattern."""
    expected_arr = expected.signs if isinstance(expected, SignMatrix) else np.asarray(expected)
    values = acceptance_grid(automaton, prefixes, suffixes)
    if expected_arr.shape != values.shape:
        raise ValueError(
            f"expected sign grid has shape {expected_arr.shape}, grid is {values.shape}")
    agreements = 0
    ambiguous = 0
    first = None
    min_margin = np.inf
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            verdict = member(values[i, j], cutpoint, tol)
            ambiguous += verdict.ambiguous
            margin = abs(float(values[i, j]) - float(cutpoint))
            min_margin = min(min_margin, margin)
            if verdict.sign == expected_arr[i, j]:
                agreements += 1
            elif first is None:
                first = (tuple(prefixes[i]), tuple(suffixes[j]))
    total = values.shape[0] * values.shape[1]
    return ShatteringReport(
        pairs_checked=total,
        agreements=agreements,
        min_margin=float(min_margin) if total else 0.0,
        ambiguous_count=ambiguous,
        first_mismatch=first,
        values=values,
    )


@dataclass(frozen=True)
class ExpansionReport:
    """Residual of the acceptance values against the second-order model
    1/2 + t*eta_j + (r-s)*t^2."""

    pairs_checked: int
    max_residual: float
    bound: float
    second_order_shift: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.bound


def verify_moqfa_expansion(bundle: MoqfaWitnessBundle) -> ExpansionReport:
    """Check every (prefix, test) acceptance against the quantitative
    expansion; the residual must stay below 1/(48 n^3)."""
    t = bundle.t
    shift = (bundle.r - bundle.s) * t * t
    values = acceptance_grid(bundle.automaton, bundle.prefixes, bundle.suffixes)
    worst = 0.0
    for j in range(bundle.d):
        for col, eta in enumerate(bundle.etas):
            residual = abs(values[j, col] - 0.5 - t * eta[j] - shift)
            worst = max(worst, float(residual))
    bound = 1.0 / (48.0 * bundle.n ** 3)
    return ExpansionReport(
        pairs_checked=bundle.d * len(bundle.etas),
        max_residual=worst,
        bound=bound,
        second_order_shift=shift,
    )
