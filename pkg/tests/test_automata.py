from fractions import Fraction

import numpy as np
import pytest

from conftest import random_moqfa, random_qcfa
from qfasim.automata import (
    EXACT_MODE,
    GFA,
    MOQFA,
    PFA,
    QCFA,
    CutpointSpec,
    acceptance_grid,
    as_word,
    evaluate,
    evaluate_gfa,
    evaluate_moqfa,
    evaluate_pfa,
    evaluate_qcfa,
    gfa_run,
    member,
    moqfa_run,
    pfa_run,
    qcfa_run,
)
from qfasim.opcore import KrausChannel


def swap_gfa():
    return GFA(("a",), [1.0, 0.0], {"a": [[0.0, 1.0], [1.0, 0.0]]}, [1.0, 0.0])


class TestGfa:
    def test_swap(self):
        g = swap_gfa()
        assert evaluate_gfa(g, ()) == 1.0
        assert evaluate_gfa(g, ("a",)) == 0.0
        assert evaluate_gfa(g, ("a", "a")) == 1.0

    def test_scalar_doubling(self):
        g = GFA(("a",), [1.0], {"a": [[2.0]]}, [1.0])
        for length in range(8):
            assert evaluate_gfa(g, ("a",) * length) == 2.0 ** length

    def test_exact_mode_returns_fractions(self):
        g = GFA(("a",), [Fraction(1, 3)], {"a": [["1/2"]]}, [1], EXACT_MODE)
        value = evaluate_gfa(g, ("a", "a"))
        assert value == Fraction(1, 12)
        assert isinstance(value, Fraction)

    def test_unknown_symbol(self):
        with pytest.raises(ValueError, match="not in the alphabet"):
            evaluate_gfa(swap_gfa(), ("b",))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            GFA(("a",), [1.0, 0.0], {"a": [[1.0]]}, [1.0, 0.0])

    def test_word_must_not_be_a_str(self):
        with pytest.raises(TypeError):
            evaluate_gfa(swap_gfa(), "aa")


class TestPfa:
    def test_identity_end_marker_all_accepting(self):
        p = PFA(("a",), [0.5, 0.5], {"a": [[0.0, 1.0], [1.0, 0.0]]},
                np.eye(2), frozenset({0, 1}))
        for length in range(4):
            assert evaluate_pfa(p, ("a",) * length) == pytest.approx(1.0)

    def test_single_state_empty_accepting(self):
        p = PFA(("a",), [1.0], {"a": [[1.0]]}, [[1.0]], frozenset())
        assert evaluate_pfa(p, ("a",)) == 0.0

    def test_exact_values_stay_on_simplex(self):
        half = Fraction(1, 2)
        p = PFA(("a",), [half, half],
                {"a": [[Fraction(1, 3), Fraction(2, 3)], [1, 0]]},
                [[1, 0], [0, 1]], frozenset({0}), EXACT_MODE)
        for length in range(6):
            dist = pfa_run(p, ("a",) * length)
            assert sum(dist) == 1
            assert all(x >= 0 for x in dist)
            value = evaluate_pfa(p, ("a",) * length)
            assert isinstance(value, Fraction)
            assert 0 <= value <= 1

    def test_rejects_non_stochastic_rows(self):
        with pytest.raises(ValueError):
            PFA(("a",), [1.0], {"a": [[0.9]]}, [[1.0]], frozenset({0}))

    def test_rejects_bad_initial(self):
        with pytest.raises(ValueError):
            PFA(("a",), [0.7, 0.7], {"a": np.eye(2)}, np.eye(2), frozenset({0}))


class TestMoqfa:
    def test_stationary_accept(self):
        q = MOQFA(("a",), [1.0, 0.0], {"a": np.eye(2)}, np.diag([1.0, 0.0]))
        assert evaluate_moqfa(q, ()) == pytest.approx(1.0)
        assert evaluate_moqfa(q, ("a",) * 5) == pytest.approx(1.0)

    def test_norm_preserved_over_long_words(self):
        rng = np.random.default_rng(21)
        q = random_moqfa(3, ("a", "b"), rng)
        word = tuple(rng.choice(["a", "b"], size=100))
        assert abs(np.linalg.norm(moqfa_run(q, word)) - 1.0) <= 1e-10

    def test_rejects_non_unit_initial(self):
        with pytest.raises(ValueError):
            MOQFA(("a",), [1.0, 1.0], {"a": np.eye(2)}, np.diag([1.0, 0.0]))

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            MOQFA(("a",), [1.0, 0.0], {"a": np.ones((2, 2))}, np.diag([1.0, 0.0]))


class TestQcfa:
    def test_mixed_start_projective_accept(self):
        q = 3
        chan = KrausChannel.identity(q)
        accept = np.zeros((q, q), dtype=complex)
        accept[0, 0] = 1.0
        a = QCFA(("a",), 1, q, 0, np.eye(q) / q, {(0, "a"): 0}, {(0, "a"): chan}, accept)
        assert evaluate_qcfa(a, ()) == pytest.approx(1.0 / q)

    def test_identity_channels_keep_value_constant(self):
        rng = np.random.default_rng(22)
        q = random_qcfa(2, 2, ("a", "b"), rng)
        idchan = KrausChannel.identity(2)
        frozen = QCFA(q.alphabet, q.classical_states, q.quantum_dim,
                      q.initial_classical, q.initial_quantum,
                      q.delta, {k: idchan for k in q.channels}, q.accept)
        base = evaluate_qcfa(frozen, ())
        for word in [("a",), ("b", "a"), ("a", "a", "b")]:
            assert evaluate_qcfa(frozen, word) == pytest.approx(base, abs=1e-12)

    def test_state_stays_physical_along_the_run(self):
        rng = np.random.default_rng(23)
        a = random_qcfa(3, 2, ("x", "y"), rng)
        word = tuple(rng.choice(["x", "y"], size=12))
        for cut in range(len(word) + 1):
            _, rho = qcfa_run(a, word[:cut])
            assert abs(np.trace(rho).real - 1.0) <= 1e-10
            assert np.linalg.eigvalsh(rho).min() >= -1e-10

    def test_rejects_partial_delta(self):
        chan = KrausChannel.identity(2)
        with pytest.raises(ValueError):
            QCFA(("a",), 2, 2, 0, np.eye(2) / 2, {(0, "a"): 0},
                 {(0, "a"): chan, (1, "a"): chan}, np.diag([1.0, 0.0]))


class TestMember:
    def test_above(self):
        assert member(0.6, 0.5) == member(0.6, CutpointSpec(0.5))
        assert member(0.6, 0.5).sign == 1

    def test_equality_rejects(self):
        exact = member(Fraction(1, 2), Fraction(1, 2))
        assert exact.sign == -1 and not exact.ambiguous
        floats = member(0.5, 0.5)
        assert floats.sign == -1 and floats.ambiguous

    def test_band_is_ambiguous(self):
        verdict = member(0.5 + 1e-12, 0.5)
        assert verdict.sign == -1 and verdict.ambiguous

    def test_exact_hairline_is_not_ambiguous(self):
        assert member(Fraction(1, 2) + Fraction(1, 10 ** 30), Fraction(1, 2)).sign == 1

    def test_only_strict_mode(self):
        with pytest.raises(ValueError):
            CutpointSpec(0.5, mode="isolated")


class TestThreading:
    def test_gfa_run_composes(self):
        g = swap_gfa()
        w1, w2 = ("a",), ("a", "a")
        mid = gfa_run(g, w1)
        assert evaluate_gfa(g, w1 + w2) == evaluate_gfa(g, w2, start=mid)

    def test_moqfa_run_composes(self):
        rng = np.random.default_rng(24)
        q = random_moqfa(3, ("a", "b"), rng)
        w1, w2 = ("a", "b"), ("b", "a", "a")
        mid = moqfa_run(q, w1)
        assert evaluate_moqfa(q, w1 + w2) == pytest.approx(
            evaluate_moqfa(q, w2, start=mid), abs=1e-12)

    def test_qcfa_run_composes(self):
        rng = np.random.default_rng(25)
        a = random_qcfa(2, 2, ("a", "b"), rng)
        w1, w2 = ("b",), ("a", "b")
        mid = qcfa_run(a, w1)
        assert evaluate_qcfa(a, w1 + w2) == pytest.approx(
            evaluate_qcfa(a, w2, start=mid), abs=1e-12)

    def test_acceptance_grid_matches_direct_evaluation(self):
        rng = np.random.default_rng(26)
        a = random_qcfa(2, 2, ("a", "b"), rng)
        prefixes = [(), ("a",), ("b", "b")]
        suffixes = [(), ("b",), ("a", "a")]
        grid = acceptance_grid(a, prefixes, suffixes)
        for i, x in enumerate(prefixes):
            for j, y in enumerate(suffixes):
                assert grid[i, j] == pytest.approx(evaluate(a, x + y), abs=1e-12)


def test_as_word_normalizes_sequences():
    assert as_word(["p:1", "tau:+-"]) == ("p:1", "tau:+-")
    with pytest.raises(TypeError):
        as_word("ab")


def test_concurrent_evaluation_of_a_shared_automaton():
    from concurrent.futures import ThreadPoolExecutor

    rng = np.random.default_rng(27)
    a = random_qcfa(2, 2, ("a", "b"), rng)
    words = [tuple(rng.choice(["a", "b"], size=int(rng.integers(0, 8))))
             for _ in range(64)]
    expected = [evaluate_qcfa(a, w) for w in words]
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(lambda w: evaluate_qcfa(a, w), words))
    assert got == pytest.approx(expected, abs=1e-12)
