import itertools

import numpy as np
import pytest

from conftest import random_channel, random_density, random_moqfa, random_qcfa, random_unitary
from qfasim.automata import QCFA, evaluate_gfa, evaluate_moqfa, evaluate_qcfa
from qfasim.linearize import (
    channel_transfer_matrix,
    coords_to_operator,
    hermitian_coords,
    moqfa_to_gfa,
    qcfa_to_gfa,
)
from qfasim.opcore import KrausChannel, apply_channel, hermitian_basis
from qfasim.witnesses import replacement_channel


def words_up_to(alphabet, max_len):
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


class TestTransferMatrix:
    def test_identity_channel(self):
        basis = hermitian_basis(3)
        t = channel_transfer_matrix(KrausChannel.identity(3), basis)
        np.testing.assert_allclose(t, np.eye(9), atol=1e-13)

    def test_columns_match_channel_action(self):
        rng = np.random.default_rng(41)
        basis = hermitian_basis(2)
        chan = random_channel(2, 3, rng)
        t = channel_transfer_matrix(chan, basis)
        for j, b in enumerate(basis):
            np.testing.assert_allclose(
                t[:, j], hermitian_coords(apply_channel(chan, b), basis), atol=1e-12)
        x = random_density(2, rng)
        np.testing.assert_allclose(
            t @ hermitian_coords(x, basis),
            hermitian_coords(apply_channel(chan, x), basis), atol=1e-10)

    def test_replacement_channel_is_rank_one(self):
        rng = np.random.default_rng(42)
        q = 2
        basis = hermitian_basis(q)
        theta = random_density(q, rng)
        t = channel_transfer_matrix(replacement_channel(theta), basis)
        trace_row = np.zeros(q * q)
        trace_row[0] = np.sqrt(q)
        expected = np.outer(hermitian_coords(theta, basis), trace_row)
        np.testing.assert_allclose(t, expected, atol=1e-12)
        assert np.linalg.matrix_rank(t, tol=1e-10) == 1

    def test_unitary_conjugation_is_orthogonal(self):
        rng = np.random.default_rng(43)
        basis = hermitian_basis(3)
        u = random_unitary(3, rng)
        t = channel_transfer_matrix(KrausChannel.from_unitary(u), basis)
        assert np.abs(t.T @ t - np.eye(9)).max() <= 1e-9

    def test_composition(self):
        rng = np.random.default_rng(44)
        basis = hermitian_basis(2)
        c1 = random_channel(2, 2, rng)
        c2 = random_channel(2, 3, rng)
        composed = KrausChannel(tuple(k2 @ k1 for k2 in c2.kraus for k1 in c1.kraus))
        t = channel_transfer_matrix(composed, basis)
        np.testing.assert_allclose(
            t,
            channel_transfer_matrix(c2, basis) @ channel_transfer_matrix(c1, basis),
            atol=1e-9)

    def test_coords_roundtrip(self):
        rng = np.random.default_rng(45)
        basis = hermitian_basis(3)
        x = random_density(3, rng)
        np.testing.assert_allclose(
            coords_to_operator(hermitian_coords(x, basis), basis), x, atol=1e-12)


class TestQcfaLinearization:
    def test_trivial_hybrid(self):
        q = 2
        accept = np.zeros((q, q), dtype=complex)
        accept[0, 0] = 1.0
        rho0 = accept.copy()
        a = QCFA(("a",), 1, q, 0, rho0, {(0, "a"): 0},
                 {(0, "a"): KrausChannel.identity(q)}, accept)
        g = qcfa_to_gfa(a)
        assert g.states == q * q
        for length in range(5):
            assert evaluate_gfa(g, ("a",) * length) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("c,q", [(1, 2), (2, 2), (3, 2), (2, 3)])
    def test_state_count(self, c, q):
        rng = np.random.default_rng(100 + c * 10 + q)
        a = random_qcfa(c, q, ("a", "b"), rng)
        assert qcfa_to_gfa(a).states == c * q * q

    def test_matches_hybrid_evaluation(self):
        rng = np.random.default_rng(46)
        a = random_qcfa(3, 2, ("a", "b"), rng)
        g = qcfa_to_gfa(a)
        worst = max(abs(evaluate_gfa(g, w) - evaluate_qcfa(a, w))
                    for w in words_up_to(("a", "b"), 4))
        assert worst <= 1e-9

    def test_final_vector_reads_off_the_effect(self):
        rng = np.random.default_rng(47)
        a = random_qcfa(2, 2, ("a",), rng)
        basis = hermitian_basis(2)
        v_acc = hermitian_coords(a.accept, basis)
        for _ in range(10):
            rho = random_density(2, rng)
            assert np.dot(v_acc, hermitian_coords(rho, basis)) == pytest.approx(
                float(np.trace(a.accept @ rho).real), abs=1e-10)


class TestMoqfaLinearization:
    def test_identity_dynamics(self):
        from qfasim.automata import MOQFA
        q = MOQFA(("a",), [1.0, 0.0], {"a": np.eye(2)}, np.diag([1.0, 0.0]))
        g = moqfa_to_gfa(q)
        assert g.states == 4
        for length in range(4):
            assert evaluate_gfa(g, ("a",) * length) == pytest.approx(
                evaluate_moqfa(q, ()), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_measure_once_evaluation(self, n):
        rng = np.random.default_rng(200 + n)
        q = random_moqfa(n, ("a", "b"), rng)
        g = moqfa_to_gfa(q)
        assert g.states == n * n
        worst = max(abs(evaluate_gfa(g, w) - evaluate_moqfa(q, w))
                    for w in words_up_to(("a", "b"), 5))
        assert worst <= 1e-9
