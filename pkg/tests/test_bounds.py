import math
from fractions import Fraction

import numpy as np
import pytest

from qtransit.bounds import (
    LvParams,
    fef,
    harmonic_number,
    is_steerable_by_fef,
    kv_maxent_lv_bound,
    lv_lower_bound,
    min_k_for_violation,
    min_n_exceeding_one,
    steering_threshold,
    steering_threshold_exact,
)
from qtransit.errors import DomainError
from qtransit.qcore import DensityOp, tensor
from qtransit.states import isotropic, maximally_mixed, w_marginal


def random_two_qubit(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    return DensityOp(m / np.trace(m).real, (2, 2))


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def test_fef_known_values():
    assert abs(fef(w_marginal(3)) - 2.0 / 3.0) < 1e-9
    assert abs(fef(maximally_mixed((2, 2))) - 0.25) < 1e-9
    for F in (0.3, 0.55, 0.8, 1.0):
        assert abs(fef(isotropic(2, F)) - F) < 1e-9


def test_fef_isotropic_higher_dimension():
    for F in (0.4, 0.7):
        value = fef(isotropic(3, F), seed=7, restarts=6)
        assert abs(value - F) < 1e-5


def test_fef_local_unitary_invariance():
    rng = np.random.default_rng(88)
    for _ in range(100):
        rho = random_two_qubit(rng)
        u = random_unitary(rng, 2)
        v = random_unitary(rng, 2)
        w = np.kron(u, v)
        rotated = DensityOp(w @ rho.mat @ w.conj().T, (2, 2))
        assert abs(fef(rho) - fef(rotated)) < 1e-8


def test_fef_floor():
    rng = np.random.default_rng(5)
    for _ in range(25):
        assert fef(random_two_qubit(rng)) >= 0.25 - 1e-12


def test_fef_optimizer_agrees_with_closed_form():
    """The nonconvex search must find the two-qubit optimum."""
    rng = np.random.default_rng(17)
    for i in range(10):
        rho = random_two_qubit(rng)
        exact = fef(rho)
        opt = fef(rho, seed=i, restarts=10, method="optimize")
        assert opt <= exact + 1e-9
        assert abs(exact - opt) < 1e-6


def test_fef_argument_checks():
    with pytest.raises(DomainError):
        fef(maximally_mixed((2, 3)))
    with pytest.raises(DomainError):
        fef(maximally_mixed((3, 3)), method="exact")
    with pytest.raises(ValueError):
        fef(maximally_mixed((2, 2)), method="magic")


def test_copy_thresholds():
    assert lv_lower_bound(LvParams(2.0 / 3.0, 2, 29, "tight")) > 1.0
    assert lv_lower_bound(LvParams(2.0 / 3.0, 2, 28, "tight")) <= 1.0
    assert min_k_for_violation(2.0 / 3.0, 2, "tight") == 29
    assert min_k_for_violation(2.0 / 3.0, 2, "loose") == 31
    assert min_k_for_violation(0.5, 2, "tight") is None
    assert min_k_for_violation(0.5, 2, "loose") is None


def test_lv_bound_degenerate_cases():
    # too few copies for a valid noise rate
    assert lv_lower_bound(LvParams(0.9, 2, 1)) == 0.0
    assert lv_lower_bound(LvParams(0.9, 2, 2)) == 0.0
    # unentangled fraction never certifies, any copy count
    for k in (3, 10, 100, 10_000):
        assert lv_lower_bound(LvParams(0.5, 2, k, "loose")) < 1.0
    assert lv_lower_bound(LvParams(0.0, 2, 50)) == 0.0
    # huge copy counts stay finite objects
    assert lv_lower_bound(LvParams(1.0, 2, 10_000)) == math.inf


def test_lv_bound_monotone_in_fraction():
    for k in (5, 12, 40):
        values = [lv_lower_bound(LvParams(F, 2, k)) for F in np.linspace(0.1, 1.0, 12)]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))


def test_tight_dominates_loose():
    for d in (2, 3, 5):
        for k in (2, 7, 23):
            for F in (0.4, 0.8, 1.0):
                tight = lv_lower_bound(LvParams(F, d, k, "tight"))
                loose = lv_lower_bound(LvParams(F, d, k, "loose"))
                assert tight >= loose - 1e-12


def test_lv_params_validation():
    with pytest.raises(DomainError):
        LvParams(1.2, 2, 3)
    with pytest.raises(DomainError):
        LvParams(0.5, 1, 3)
    with pytest.raises(DomainError):
        LvParams(0.5, 2, 0)
    with pytest.raises(DomainError):
        LvParams(0.5, 2, 3, "medium")


def test_maxent_bound_thresholds():
    assert min_n_exceeding_one("tight") == 66
    assert min_n_exceeding_one("loose") == 541
    assert kv_maxent_lv_bound(4) == (0.0, 0.0)
    tight, loose = kv_maxent_lv_bound(541)
    assert tight >= loose > 1.0
    with pytest.raises(DomainError):
        min_n_exceeding_one("exact")
    with pytest.raises(DomainError):
        kv_maxent_lv_bound(1)


def test_maxent_matches_lv_bound_at_unit_fraction():
    """With F = 1 the copy bound is the maximally entangled bound at n = d^k."""
    for d, k in ((2, 10), (3, 5)):
        tight = lv_lower_bound(LvParams(1.0, d, k, "tight"))
        expected = kv_maxent_lv_bound(d**k).tight
        assert abs(tight - expected) < 1e-9 * expected


def test_steering_thresholds():
    assert steering_threshold_exact(2) == Fraction(5, 8)
    # independent rational oracle: H_3 = 11/6
    h3 = Fraction(1, 1) + Fraction(1, 2) + Fraction(1, 3)
    assert h3 == Fraction(11, 6)
    assert steering_threshold_exact(3) == Fraction(4, 9) * h3 - Fraction(1, 3)
    assert steering_threshold_exact(3) == Fraction(13, 27)
    assert abs(steering_threshold(2) - 0.625) < 1e-15
    assert harmonic_number(4) == Fraction(25, 12)
    assert isinstance(harmonic_number(65), float)
    with pytest.raises(DomainError):
        steering_threshold(1)


def test_steerability_of_w_marginal():
    assert is_steerable_by_fef(w_marginal(3))
    assert not is_steerable_by_fef(maximally_mixed((2, 2)))


def test_tensor_of_marginals_keeps_certifying():
    """Two copies of the W marginal still clear the qubit threshold via the
    single-copy fraction argument; sanity anchor for the analytic route."""
    tau = w_marginal(3)
    two = tensor(tau, tau)
    # reshaped to (4, 4): copies of A together, copies of B together
    from qtransit.qcore import group_subsystems, permute_subsystems

    grouped = group_subsystems(permute_subsystems(two, (0, 2, 1, 3)), ((0, 1), (2, 3)))
    val = fef(grouped, seed=3, restarts=4)
    assert val <= 1.0 + 1e-9
    assert val >= 4.0 / 9.0 - 1e-6  # product of the single-copy overlaps
