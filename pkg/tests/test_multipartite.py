import numpy as np
import pytest

from entcheck.core.bipartite import equivalence_scalars, sign_flip_recover, sum_criterion
from entcheck.core.multipartite import multipartite_criterion, reconstruct
from entcheck.core.oracle import random_product_state
from entcheck.core.tensor import CoeffTensor, total_sum
from entcheck.core.verdict import Criterion, LocalFactors, Outcome, reconstruction_residual
from entcheck.errors import ContractError


def test_ghz_is_entangled(ghz, tol):
    v = multipartite_criterion(ghz, tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.MULTIPARTITE_SUM
    assert v.witness.index == (0, 0, 0)
    assert v.witness.lhs == pytest.approx(4)
    assert v.witness.rhs == pytest.approx(1)
    assert v.witness.residual == pytest.approx(3)


def test_three_party_product(tol):
    a, b, c = [1, 2], [1j, -1, 3], [2, 0.5]
    t = CoeffTensor(reconstruct(LocalFactors.of(a, b, c)).entries)
    v = multipartite_criterion(t, tol)
    assert v.is_factorized
    assert equivalence_scalars(v.factors, LocalFactors.of(a, b, c), tol) is not None
    assert reconstruction_residual(t, v.factors) < 1e-12


def test_bipartite_case_matches_sum_criterion(product_3x3, degenerate_entangled, tol):
    assert multipartite_criterion(product_3x3, tol).is_factorized
    assert sum_criterion(product_3x3, tol).is_factorized
    assert multipartite_criterion(degenerate_entangled, tol).decided_by is Criterion.DEGENERATE


def test_zero_sum_is_inconclusive(tol):
    entries = np.zeros((2, 2, 2))
    entries[0, 0, 0], entries[1, 1, 1] = 1, -1
    v = multipartite_criterion(CoeffTensor(entries), tol)
    assert v.outcome is Outcome.INCONCLUSIVE
    assert v.decided_by is Criterion.DEGENERATE


def test_sign_flip_recovers_three_parties(tol):
    entries = np.zeros((2, 2, 2))
    entries[0, 0, 0], entries[1, 1, 1] = 1, -1
    v = sign_flip_recover(CoeffTensor(entries), tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.decided_by is Criterion.MULTIPARTITE_SUM
    assert v.flip == (1, 0)


def test_reconstruct_checks_dims():
    f = LocalFactors.of([1, 2], [3, 4, 5])
    assert reconstruct(f, (2, 3)).dims == (2, 3)
    with pytest.raises(ContractError):
        reconstruct(f, (3, 2))


@pytest.mark.parametrize("parties", [3, 4])
def test_product_completeness(parties, tol):
    rng = np.random.default_rng(parties)
    for k in range(250):
        dims = tuple(int(d) for d in rng.integers(1, 4, size=parties))
        t = random_product_state(dims, int(rng.integers(2**32)), zero_avoidance=True)
        assert abs(total_sum(t)) >= 1e-6
        v = multipartite_criterion(t, tol)
        assert v.is_factorized, (k, dims)
        assert reconstruction_residual(t, v.factors) < 1e-8


@pytest.mark.parametrize("scale", [1e-9, 1e160])
def test_multipartite_does_not_depend_on_scale(scale, ghz, tol):
    v = multipartite_criterion(CoeffTensor(ghz.entries * scale), tol)
    assert v.outcome is Outcome.ENTANGLED
    assert v.witness.residual == pytest.approx(3)

    for f in (
        LocalFactors.of([1, 2], [1j, -1, 3], [2, 0.5]),
        LocalFactors.of([1, 1], [1, 2], [1, -1j], [0.5, 1]),
    ):
        t = CoeffTensor(f.outer() * scale)
        v = multipartite_criterion(t, tol)
        assert v.is_factorized
        assert reconstruction_residual(t, v.factors) <= 1e-12 * t.max_abs
