import time

import numpy as np
import pytest

from entcheck.core.bipartite import (
    equivalence_scalar,
    equivalence_scalars,
    extract_local_parts,
    sign_flip_recover,
    sum_criterion,
    vanishing_sum_criterion,
)
from entcheck.core.oracle import random_product_state, random_state
from entcheck.core.tensor import CoeffTensor
from entcheck.core.verdict import (
    Criterion,
    LocalFactors,
    Outcome,
    Verdict,
    reconstruction_residual,
)
from entcheck.errors import ArityError, ContractError


def test_product_3x3_factorized(product_3x3, tol):
    v = sum_criterion(product_3x3, tol)
    assert v.outcome is Outcome.FACTORIZED
    assert v.decided_by is Criterion.SUM
    halves = LocalFactors.of([0.5, -1, 1.5], [8, -6j, 10])
    assert equivalence_scalar(v.factors, halves, tol) == pytest.approx(1, abs=1e-9)
    simpler = LocalFactors.of([1, -2, 3], [4, -3j, 5])
    assert equivalence_scalar(v.factors, simpler, tol) == pytest.approx(2, abs=1e-9)
    assert reconstruction_residual(product_3x3, v.factors) < 1e-12


def test_product_3x3_runtime(product_3x3, tol):
    best = float("inf")
    for _ in range(50):
        t0 = time.perf_counter()
        sum_criterion(product_3x3, tol)
        best = min(best, time.perf_counter() - t0)
    assert best < 1e-3


def test_extract_local_parts(product_3x3, degenerate_product):
    parts = extract_local_parts(product_3x3)
    np.testing.assert_allclose(parts.factors[0], [0.5, -1, 1.5], atol=1e-12)
    np.testing.assert_allclose(parts.factors[1], [8, -6j, 10], atol=1e-12)
    with pytest.raises(ContractError):
        extract_local_parts(degenerate_product)


def test_degenerate_cases_are_inconclusive(degenerate_product, degenerate_entangled, tol):
    for t in (degenerate_product, degenerate_entangled):
        v = sum_criterion(t, tol)
        assert v.outcome is Outcome.INCONCLUSIVE
        assert v.decided_by is Criterion.DEGENERATE
        assert vanishing_sum_criterion(t, tol).outcome is Outcome.INCONCLUSIVE


def test_vanishing_sum_entangled(tol):
    t = CoeffTensor.from_array([[1, 0], [0, -1]])
    v = vanishing_sum_criterion(t, tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.VANISHING_SUM
    assert v.witness.index == (0, 0)
    assert sum_criterion(t, tol).decided_by is Criterion.VANISHING_SUM


def test_vanishing_sum_requires_zero_sum(product_3x3):
    with pytest.raises(ContractError):
        vanishing_sum_criterion(product_3x3)


def test_sign_flip_on_degenerate_entangled(degenerate_entangled, tol):
    v = sign_flip_recover(degenerate_entangled, tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.SUM
    # primer vector invertido que saca del caso degenerado: ψ_1
    assert v.flip == (2, 0)
    assert v.witness.index == (0, 2)
    assert v.witness.residual == pytest.approx(2)
    # fila 2, columna 3 contando desde 1
    assert (1, 2) in v.violations


def test_sign_flip_on_degenerate_product_stays_degenerate(degenerate_product, tol):
    v = sign_flip_recover(degenerate_product, tol)
    assert v.outcome is Outcome.INCONCLUSIVE
    assert v.decided_by is Criterion.DEGENERATE


def test_sign_flip_maps_factors_back(tol):
    # (1, −1) ⊗ (1, 2, 3): Σ = 0 y todos los productos fila·columna nulos
    t = CoeffTensor(np.outer([1, -1], [1, 2, 3]))
    assert sum_criterion(t, tol).decided_by is Criterion.DEGENERATE
    v = sign_flip_recover(t, tol)
    assert v.outcome is Outcome.FACTORIZED
    assert v.flip == (1, 0)
    assert reconstruction_residual(t, v.factors) < 1e-12


def test_sign_flip_requires_zero_sum(product_3x3):
    with pytest.raises(ContractError):
        sign_flip_recover(product_3x3)


@pytest.mark.parametrize("k", range(2, 9))
def test_schmidt_diagonal_is_entangled(k, tol):
    rng = np.random.default_rng(k)
    lambdas = rng.uniform(0.5, 2.0, size=k)
    v = sum_criterion(CoeffTensor(np.diag(lambdas)), tol)
    assert v.outcome is Outcome.ENTANGLED
    # c_12 = 0 (uno-basado) es la entrada del argumento clásico y siempre viola la
    # identidad; el testigo es la primera violación lexicográfica, λ_1·Σλ ≠ λ_1² en (0, 0)
    assert (0, 1) in v.violations
    assert v.witness.index == (0, 0)


def test_single_positive_weight_is_factorized(tol):
    assert sum_criterion(CoeffTensor.from_array([[2.5]]), tol).is_factorized


def test_equivalence_scalar(tol):
    f1 = LocalFactors.of([1, 2j], [3, -1])
    s = 2 - 1j
    f2 = LocalFactors.of(np.array([1, 2j]) * s, np.array([3, -1]) / s)
    assert equivalence_scalar(f1, f2, tol) == pytest.approx(s)
    other = LocalFactors.of([1, 2j], [3, 1])
    assert equivalence_scalar(f1, other, tol) is None


def test_equivalence_scalar_skips_zero_coordinates(tol):
    f1 = LocalFactors.of([0, 1], [1, 1])
    f2 = LocalFactors.of([0, 3], [1 / 3, 1 / 3])
    assert equivalence_scalar(f1, f2, tol) == pytest.approx(3)


def test_equivalence_scalars_multipartite(tol):
    f1 = LocalFactors.of([1, 2], [1, -1], [2j, 1])
    f2 = LocalFactors.of([2, 4], [3, -3], np.array([2j, 1]) / 6)
    scalars = equivalence_scalars(f1, f2, tol)
    assert scalars == pytest.approx((2, 3))
    with pytest.raises(ArityError):
        equivalence_scalar(f1, f2, tol)
    with pytest.raises(ContractError):
        equivalence_scalars(f1, LocalFactors.of([1], [1]), tol)


def test_normalized_factors():
    f = LocalFactors.of([0, -2j, 2], [3, 4])
    unit, scalar = f.normalized()
    for v in unit.factors:
        assert np.linalg.norm(v) == pytest.approx(1)
    assert np.angle(unit.factors[0][1]) == pytest.approx(0)
    np.testing.assert_allclose(scalar * unit.outer(), f.outer(), atol=1e-12)


def test_local_factors_contract():
    with pytest.raises(ContractError):
        LocalFactors.of([0, 0], [1, 2])
    with pytest.raises(ContractError):
        Verdict(Outcome.FACTORIZED, Criterion.SUM)
    with pytest.raises(ContractError):
        Verdict(Outcome.ENTANGLED, Criterion.SUM)


def test_transpose_symmetry():
    for seed in range(200):
        dims = (2 + seed % 4, 1 + seed % 5)
        if seed % 2:
            t = random_product_state(dims, seed, zero_avoidance=True)
        else:
            t = random_state(dims, seed)
        transposed = CoeffTensor(t.entries.T)
        assert sum_criterion(t).outcome is sum_criterion(transposed).outcome


def test_global_phase_invariance():
    for seed in range(200):
        dims = (1 + seed % 5, 2 + seed % 3)
        if seed % 2:
            t = random_product_state(dims, seed, zero_avoidance=True)
        else:
            t = random_state(dims, seed)
        phase = np.exp(1j * 0.37 * seed)
        assert sum_criterion(t).outcome is sum_criterion(CoeffTensor(t.entries * phase)).outcome


@pytest.mark.parametrize("scale", [1e-9, 1e-6, 1e160])
def test_sum_criterion_does_not_depend_on_scale(scale, product_3x3, tol):
    bell = CoeffTensor(scale * np.eye(2))
    v = sum_criterion(bell, tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.witness.index == (0, 0)

    t = CoeffTensor(product_3x3.entries * scale)
    v = sum_criterion(t, tol)
    assert v.is_factorized
    assert reconstruction_residual(t, v.factors) <= 1e-12 * t.max_abs
    unit, _ = v.factors.normalized()
    for f in unit.factors:
        assert np.linalg.norm(f) == pytest.approx(1)


@pytest.mark.parametrize("scale", [1e-9, 1e160])
def test_vanishing_sum_does_not_depend_on_scale(scale, degenerate_product, degenerate_entangled, tol):
    t = CoeffTensor.from_array(np.array([[1, 0], [0, -1]]) * scale)
    assert vanishing_sum_criterion(t, tol).decided_by is Criterion.VANISHING_SUM
    t = CoeffTensor(degenerate_product.entries * scale)
    assert sum_criterion(t, tol).decided_by is Criterion.DEGENERATE

    v = sign_flip_recover(CoeffTensor(degenerate_entangled.entries * scale), tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.flip == (2, 0)
    # el testigo se reporta en unidades de max|c|
    assert v.witness.residual == pytest.approx(2)


def test_vanishing_sum_examples(tol):
    v = vanishing_sum_criterion(CoeffTensor.from_array([[2, -1], [-1, 0]]), tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.VANISHING_SUM

    v = vanishing_sum_criterion(CoeffTensor.from_array([[1, -1], [1, -1]]), tol)
    assert v.outcome is Outcome.INCONCLUSIVE
    assert v.decided_by is Criterion.DEGENERATE


def test_equivalence_scalar_rejects_unreciprocated_scaling(tol):
    # a escalado por 2 sin dividir b por 2
    f1 = LocalFactors.of([1, 0], [1, 1])
    f2 = LocalFactors.of([2, 0], [1, 1])
    assert equivalence_scalar(f1, f2, tol) is None
