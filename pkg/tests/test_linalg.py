import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextkit.errors import DimensionError, NormalizationError
from contextkit.linalg import (
    Projector,
    QuantumState,
    Ray,
    basis_state,
    born_probability,
    inner_product,
    projector_of,
    random_state,
    validate_context,
)

S = 1 / math.sqrt(2)


def test_inner_product_examples():
    assert inner_product(Ray([1, 0, 0, 0]), Ray([0, 1, 0, 0])) == 0
    assert inner_product(Ray([1, 0]), Ray([1, 0])) == 1
    assert inner_product(Ray([S, S]), Ray([1, 0])) == pytest.approx(0.7071067811865476, abs=1e-12)


def test_inner_product_conjugates_first_argument():
    a = Ray([1j, 0])
    b = Ray([1, 0])
    assert inner_product(a, b) == pytest.approx(-1j)
    assert inner_product(b, a) == pytest.approx(1j)


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner_product(Ray([1, 0]), Ray([1, 0, 0]))


def test_ray_rejects_bad_input():
    with pytest.raises(NormalizationError):
        Ray([1, 1])
    with pytest.raises(NormalizationError):
        Ray([np.nan, 1])
    with pytest.raises(DimensionError):
        Ray([1])


def test_ray_equality_is_exact_not_projective():
    assert Ray([1, 0]) == Ray([1, 0])
    assert Ray([1, 0]) != Ray([-1, 0])


@pytest.mark.parametrize(
    "v, expected",
    [
        ([1, 0], [[1, 0], [0, 0]]),
        ([0, 1, 0], np.diag([0, 1, 0])),
        ([S, S], [[0.5, 0.5], [0.5, 0.5]]),
    ],
)
def test_projector_of_examples(v, expected):
    p = projector_of(Ray(v))
    np.testing.assert_allclose(p.matrix, expected, atol=1e-12)
    assert p.is_valid()


def test_projector_of_rejects_unnormalized():
    fake = Ray([1, 0])
    object.__setattr__(fake, "components", np.array([2.0, 0.0], dtype=complex))
    with pytest.raises(NormalizationError):
        projector_of(fake)


def test_born_probability_examples():
    e0 = QuantumState([1, 0])
    assert born_probability(e0, projector_of(Ray([1, 0]))) == 1
    assert born_probability(e0, projector_of(Ray([0, 1]))) == 0
    assert born_probability(QuantumState([S, S]), projector_of(Ray([1, 0]))) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(DimensionError):
        born_probability(e0, projector_of(Ray([1, 0, 0])))


def test_validate_context_examples(ceg):
    basis = [basis_state(4, k) for k in range(4)]
    assert validate_context(basis).valid
    short = validate_context(basis[:3])
    assert not short.valid
    assert short.completeness_defect == pytest.approx(1.0)
    for ctx in ceg.contexts:
        check = validate_context([ceg.rays[i] for i in ctx])
        assert check.valid
        assert max(check.commutator_norms.values()) <= 1e-9
        assert check.completeness_defect <= 1e-9


def test_validate_context_reports_non_orthogonal_pair():
    check = validate_context([Ray([1, 0]), Ray([S, S])])
    assert not check.valid
    assert check.orthogonality_defects[(0, 1)] == pytest.approx(S)
    assert check.commutator_norms[(0, 1)] > 0.1


def test_validate_context_empty_and_mixed():
    assert not validate_context([]).valid
    assert not validate_context([Ray([1, 0]), Ray([1, 0, 0])]).valid


def test_random_state_deterministic_and_normalized():
    a = random_state(2, 7)
    b = random_state(2, 7)
    assert a == b
    assert np.linalg.norm(random_state(4, 1).components) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(DimensionError):
        random_state(1, 0)


def test_random_state_uniform_on_bloch_sphere():
    # Haar measure on d=2: |<0|psi>|^2 is uniform on [0,1], mean 1/2
    weights = [abs(random_state(2, s).components[0]) ** 2 for s in range(1000)]
    assert abs(np.mean(weights) - 0.5) <= 0.05


# -- properties -------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=8)


@given(dims, seeds, seeds, st.floats(0, 2 * math.pi))
def test_projector_invariant_under_global_phase(d, s1, s2, theta):
    v = random_state(d, s1)
    shifted = Ray(v.components * np.exp(1j * theta))
    np.testing.assert_allclose(projector_of(shifted).matrix, projector_of(v).matrix, atol=1e-9)


@given(dims, seeds, seeds, seeds, st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_inner_product_conjugate_symmetric_and_linear(d, s1, s2, s3, alpha):
    a, b, c = (random_state(d, s) for s in (s1, s2, s3))
    assert inner_product(a, b) == pytest.approx(inner_product(b, a).conjugate(), abs=1e-12)
    combo = alpha * b.components + c.components
    norm = np.linalg.norm(combo)
    if norm < 1e-6:
        return
    lhs = inner_product(a, Ray(combo / norm)) * norm
    rhs = alpha * inner_product(a, b) + inner_product(a, c)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@settings(max_examples=50)
@given(seeds, st.integers(0, 8))
def test_born_probabilities_over_context_sum_to_one(seed, j):
    from contextkit.ks import ceg18

    system = ceg18()
    psi = random_state(4, seed)
    total = sum(born_probability(psi, projector_of(system.rays[i])) for i in system.contexts[j])
    assert total == pytest.approx(1.0, abs=1e-8)


def test_projector_validity_flags_bad_matrix():
    assert not Projector(np.eye(2)).is_valid()
