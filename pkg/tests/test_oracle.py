import numpy as np
import pytest

from entcheck.core.bipartite import sum_criterion
from entcheck.core.oracle import (
    numeric_rank,
    oracle_factorized,
    oracle_verdict,
    random_product_state,
    random_state,
    schmidt,
    schmidt_tensor,
    unfold,
)
from entcheck.core.phase import modulus_phase_criterion
from entcheck.core.tensor import CoeffTensor
from entcheck.core.verdict import Criterion, Outcome, reconstruction_residual
from entcheck.errors import ArityError, ContractError, IndexRangeError


def test_unfold_shapes():
    t = random_state((2, 3, 4), 1)
    assert unfold(t, 1).shape == (2, 12)
    assert unfold(t, 2).shape == (3, 8)
    assert unfold(t, 3).shape == (4, 6)
    assert unfold(t, 2)[1, 5] == t.entries[1, 1, 1]
    with pytest.raises(IndexRangeError):
        unfold(t, 4)


def test_numeric_rank(tol):
    assert numeric_rank(np.eye(3), tol) == 3
    assert numeric_rank(np.outer([1, 2j, 3], [1, -1]), tol) == 1
    assert numeric_rank(np.array([[1, 2], [2, 4 + 1e-13]]), tol) == 1
    assert numeric_rank(np.array([[1, 2], [2, 4.5]]), tol) == 2
    with pytest.raises(ContractError):
        numeric_rank(np.zeros((2, 2)), tol)
    with pytest.raises(ContractError):
        numeric_rank(np.ones(3), tol)


def test_oracle_on_bundled_states(product_3x3, degenerate_product, degenerate_entangled, ghz, tol):
    assert oracle_factorized(product_3x3, tol)
    assert oracle_factorized(degenerate_product, tol)
    assert not oracle_factorized(degenerate_entangled, tol)
    assert not oracle_factorized(ghz, tol)


def test_oracle_verdict(product_3x3, ghz, tol):
    v = oracle_verdict(ghz, tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.ORACLE
    assert v.witness.index == (1,)
    assert v.witness.lhs == 2
    assert v.witness.scaled_residual == pytest.approx(1)

    v = oracle_verdict(product_3x3, tol)
    assert v.is_factorized
    assert reconstruction_residual(product_3x3, v.factors) < 1e-12


def test_schmidt(product_3x3, tol):
    t = CoeffTensor(np.diag([3.0, 2.0, 1.0]))
    form = schmidt(t, tol)
    assert form.schmidt_rank == 3
    np.testing.assert_allclose(form.values, [3, 2, 1])
    np.testing.assert_allclose(form.reconstruct(), t.entries, atol=1e-12)
    assert schmidt(product_3x3, tol).schmidt_rank == 1
    with pytest.raises(ArityError):
        schmidt(random_state((2, 2, 2), 0), tol)


def test_sum_criterion_on_schmidt_coefficients(degenerate_entangled, product_3x3, tol):
    replay = schmidt_tensor(schmidt(degenerate_entangled, tol))
    assert replay.dims == (2, 2)
    assert sum_criterion(replay, tol).is_entangled
    assert sum_criterion(schmidt_tensor(schmidt(product_3x3, tol)), tol).is_factorized


def test_generators_are_deterministic():
    a = random_product_state((3, 4), 11, zero_avoidance=True)
    b = random_product_state((3, 4), 11, zero_avoidance=True)
    np.testing.assert_array_equal(a.entries, b.entries)
    assert np.abs(a.entries).min() >= 0.01
    assert random_state((2, 5), 3).dims == (2, 5)
    np.testing.assert_array_equal(random_state((2, 5), 3).entries, random_state((2, 5), 3).entries)


def test_product_completeness(tol):
    rng = np.random.default_rng(4)
    for k in range(1000):
        dims = tuple(int(d) for d in rng.integers(1, 9, size=2))
        t = random_product_state(dims, int(rng.integers(2**32)), zero_avoidance=True)
        v = sum_criterion(t, tol)
        if not v.is_factorized:
            v = modulus_phase_criterion(t, tol)
        assert v.is_factorized, (k, dims)
        assert reconstruction_residual(t, v.factors) < 1e-8


def test_entangled_soundness(tol):
    rng = np.random.default_rng(5)
    disagreements = 0
    for _ in range(1000):
        dims = tuple(int(d) for d in rng.integers(2, 7, size=2))
        t = random_state(dims, int(rng.integers(2**32)))
        rank = numeric_rank(unfold(t, 1), tol)
        for verdict in (sum_criterion(t, tol), modulus_phase_criterion(t, tol)):
            if verdict.is_entangled and rank < 2:
                disagreements += 1
            if verdict.is_factorized and rank != 1:
                disagreements += 1
    assert disagreements == 0


def test_schmidt_values_of_bundled_states(product_3x3, degenerate_product, tol):
    form = schmidt(product_3x3, tol)
    assert form.schmidt_rank == 1
    # ‖(1, −2, 3)‖·‖(4, −3i, 5)‖ = √14·√50
    assert form.values[0] == pytest.approx(np.sqrt(700))

    form = schmidt(degenerate_product, tol)
    assert form.schmidt_rank == 1
    assert form.values[0] == pytest.approx(2)


def test_schmidt_reconstruction_and_orthonormality(tol):
    rng = np.random.default_rng(7)
    for k in range(500):
        dims = tuple(int(d) for d in rng.integers(1, 9, size=2))
        if k % 2:
            t = random_product_state(dims, int(rng.integers(2**32)))
        else:
            t = random_state(dims, int(rng.integers(2**32)))
        form = schmidt(t, tol)
        np.testing.assert_allclose(form.reconstruct(), t.entries, atol=100 * tol.eps_mag)
        left = np.column_stack(form.left_vectors)
        right = np.vstack(form.right_vectors)
        eye = np.eye(form.schmidt_rank)
        np.testing.assert_allclose(left.conj().T @ left, eye, atol=1e-12)
        np.testing.assert_allclose(right @ right.conj().T, eye, atol=1e-12)
        assert np.all(np.diff(form.values) <= 0)
        assert form.schmidt_rank == numeric_rank(unfold(t, 1), tol), (k, dims)


def test_random_states_are_entangled(tol):
    rng = np.random.default_rng(8)
    entangled = 0
    for _ in range(1000):
        dims = tuple(int(d) for d in rng.integers(2, 7, size=2))
        t = random_state(dims, int(rng.integers(2**32)))
        entangled += numeric_rank(unfold(t, 1), tol) >= 2
    assert entangled >= 999


@pytest.mark.parametrize("scale", [1e-9, 1e160])
def test_oracle_does_not_depend_on_scale(scale, product_3x3, ghz, tol):
    t = CoeffTensor(product_3x3.entries * scale)
    v = oracle_verdict(t, tol)
    assert v.is_factorized
    assert reconstruction_residual(t, v.factors) <= 1e-12 * t.max_abs

    v = oracle_verdict(CoeffTensor(ghz.entries * scale), tol)
    assert v.is_entangled
    assert v.witness.scaled_residual == pytest.approx(1)

    t = CoeffTensor(np.multiply.outer(np.outer([1, 2j], [3, -1, 1]), [0.5, 2]) * scale)
    v = oracle_verdict(t, tol)
    assert v.is_factorized
    assert reconstruction_residual(t, v.factors) <= 1e-12 * t.max_abs
