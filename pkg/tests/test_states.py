import math

import numpy as np
import pytest

from qtransit.qcore import is_ppt, partial_trace, permute_subsystems, tensor
from qtransit.states import (
    StateSpec,
    bell_ket,
    bv_alternative,
    bv_marginal,
    bv_state,
    cg04_ab_marginal,
    cg04_ac_marginal,
    cg04_state,
    isotropic,
    isotropic_from_weight,
    make_state,
    maximally_mixed,
    phi_d,
    rotated_bell_state,
    sg05_ab_marginal,
    sg05_ac_marginal,
    sg05_state,
    triangle_alternative,
    triangle_marginal,
    triangle_state,
    w_marginal,
    w_state,
)

GRID = np.linspace(0.0, 1.0, 21)

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_w_marginal_n3_entries():
    tau = w_marginal(3).mat
    assert np.allclose(np.diag(tau), [1 / 3, 1 / 3, 1 / 3, 0])
    assert abs(tau[1, 2] - 1 / 3) < 1e-15
    assert abs(tau[0, 3]) == 0


def test_w_marginal_n2_is_bell():
    np.testing.assert_allclose(w_marginal(2).mat, bell_ket("psi+").density().mat, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_w_marginal_matches_partial_trace(n):
    psi = w_state(n)
    for pair in [(0, 1), (0, n - 1), (n - 2, n - 1)]:
        red = partial_trace(psi, pair)
        np.testing.assert_allclose(red.mat, w_marginal(n).mat, atol=1e-12)


def test_w_state_rejects_small_n():
    with pytest.raises(ValueError):
        w_state(1)


@pytest.mark.parametrize("alpha", GRID * (math.pi / 2))
def test_sg05_marginals_match_closed_forms(alpha):
    psi = sg05_state(alpha)
    ab = partial_trace(psi, (0, 1))
    np.testing.assert_allclose(ab.mat, sg05_ab_marginal(alpha).mat, atol=1e-12)
    # C-then-B ordering mirrors A-then-B by the outer swap symmetry
    cb = permute_subsystems(partial_trace(psi, (1, 2)), (1, 0))
    np.testing.assert_allclose(cb.mat, sg05_ab_marginal(alpha).mat, atol=1e-12)
    ac = partial_trace(psi, (0, 2))
    np.testing.assert_allclose(ac.mat, sg05_ac_marginal(alpha).mat, atol=1e-12)


def test_sg05_rejects_out_of_range():
    with pytest.raises(ValueError):
        sg05_state(-0.1)
    with pytest.raises(ValueError):
        sg05_state(math.pi / 2 + 0.1)


@pytest.mark.parametrize("mu", GRID)
def test_cg04_marginals_match_closed_forms(mu):
    psi = cg04_state(mu)
    np.testing.assert_allclose(
        partial_trace(psi, (0, 1)).mat, cg04_ab_marginal(mu).mat, atol=1e-12
    )
    np.testing.assert_allclose(
        partial_trace(psi, (0, 2)).mat, cg04_ac_marginal(mu).mat, atol=1e-12
    )
    # BC marginal is the AB one with the parties swapped
    bc = partial_trace(psi, (1, 2))
    np.testing.assert_allclose(
        bc.mat, permute_subsystems(cg04_ab_marginal(mu), (1, 0)).mat, atol=1e-12
    )


def test_cg04_special_points():
    third = 1 / math.sqrt(3)
    np.testing.assert_allclose(cg04_ac_marginal(third).mat, w_marginal(3).mat, atol=1e-12)
    np.testing.assert_allclose(
        cg04_ac_marginal(0.0).mat, bell_ket("psi+").density().mat, atol=1e-15
    )
    product = cg04_state(1.0)
    assert abs(product.amps[0] - 1.0) < 1e-15
    assert partial_trace(product, (0, 2)).purity() > 1 - 1e-12


@pytest.mark.parametrize("theta", GRID * (math.pi / 2))
def test_bv_marginals_cyclic(theta):
    psi = bv_state(theta)
    m = bv_marginal(theta).mat
    np.testing.assert_allclose(partial_trace(psi, (0, 1)).mat, m, atol=1e-12)
    np.testing.assert_allclose(partial_trace(psi, (1, 2)).mat, m, atol=1e-12)
    ca = permute_subsystems(partial_trace(psi, (0, 2)), (1, 0))
    np.testing.assert_allclose(ca.mat, m, atol=1e-12)


def test_bv_weights_normalized():
    for theta in [0.2, 0.8, 1.3]:
        amps = bv_state(theta).amps
        b2 = math.sin(theta) ** 2 / (2 * math.sin(theta) ** 2 + 1)
        assert abs(np.abs(amps).max() ** 2 - max(1 - 3 * b2, b2)) < 1e-12
        assert abs(np.vdot(amps, amps) - 1) < 1e-12


@pytest.mark.parametrize("theta", [0.3, 0.7, 1.2])
def test_bv_alternative_reproduces_two_marginals(theta):
    alt = bv_alternative(theta)
    m = bv_marginal(theta).mat
    np.testing.assert_allclose(partial_trace(alt, (0, 1)).mat, m, atol=1e-12)
    np.testing.assert_allclose(partial_trace(alt, (1, 2)).mat, m, atol=1e-12)
    ac = partial_trace(alt, (0, 2))
    off = ac.mat - np.diag(np.diag(ac.mat))
    assert np.abs(off).max() < 1e-12  # diagonal, hence separable
    assert is_ppt(ac, (1,))


def test_isotropic_singlet_fraction():
    for d, F in [(2, 0.3), (3, 0.7), (4, 1.0), (3, 1 / 9)]:
        rho = isotropic(d, F)
        phi = phi_d(d)
        got = np.real(phi.amps.conj() @ rho.mat @ phi.amps)
        assert abs(got - F) < 1e-12
    np.testing.assert_allclose(isotropic(3, 1 / 9).mat, np.eye(9) / 9, atol=1e-12)


def test_isotropic_weight_form():
    for d, p in [(2, 0.0), (2, 0.5), (3, 1.0)]:
        F = p + (1 - p) / d**2
        np.testing.assert_allclose(
            isotropic_from_weight(d, p).mat, isotropic(d, F).mat, atol=1e-12
        )


def test_rotated_bell_hits_chsh_maximum_with_fixed_axes():
    rho = rotated_bell_state().density().mat
    E = {}
    for xn, X in [(0, SZ), (1, SX)]:
        for yn, Y in [(0, SZ), (1, SX)]:
            E[xn, yn] = np.trace(rho @ np.kron(X, Y)).real
    chsh = E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1]
    assert abs(chsh - 2 * math.sqrt(2)) < 1e-12
    red = partial_trace(rotated_bell_state(), (0,))
    np.testing.assert_allclose(red.mat, np.eye(2) / 2, atol=1e-12)


def test_triangle_marginals():
    tri = triangle_state()
    assert tri.layout.dims == (4, 4, 4)
    for pair, keep in [("AB", (0, 1)), ("BC", (1, 2)), ("AC", (0, 2))]:
        np.testing.assert_allclose(
            partial_trace(tri, keep).mat, triangle_marginal(pair).mat, atol=1e-12
        )
    with pytest.raises(ValueError):
        triangle_marginal("AD")


def test_triangle_alternative_has_separable_ac():
    alt = triangle_alternative()
    np.testing.assert_allclose(
        partial_trace(alt, (0, 1)).mat, triangle_marginal("AB").mat, atol=1e-12
    )
    np.testing.assert_allclose(
        partial_trace(alt, (1, 2)).mat, triangle_marginal("BC").mat, atol=1e-12
    )
    np.testing.assert_allclose(partial_trace(alt, (0, 2)).mat, np.eye(16) / 16, atol=1e-12)


def test_maximally_mixed():
    rho = maximally_mixed((2, 3))
    assert rho.layout.dims == (2, 3)
    np.testing.assert_allclose(rho.mat, np.eye(6) / 6, atol=0)


def test_state_spec_dispatch():
    rho = make_state("cg04_ac", mu=0.5)
    np.testing.assert_allclose(rho.mat, cg04_ac_marginal(0.5).mat, atol=0)
    assert StateSpec("cg04", {"mu": 1.0}).degenerate
    assert not StateSpec("cg04", {"mu": 0.5}).degenerate
    assert not StateSpec("triangle", {}).degenerate
    with pytest.raises(ValueError):
        make_state("nope")
    with pytest.raises(ValueError):
        make_state("cg04")  # missing mu
    with pytest.raises(ValueError):
        make_state("cg04", mu=0.5, extra=1)


def test_product_states_stay_product():
    a = sg05_ac_marginal(math.pi / 2)
    # the alpha -> pi/2 limit is a classical mixture of |00> and |11>
    np.testing.assert_allclose(a.mat, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)
    assert is_ppt(a, (1,))


def test_tensor_of_family_outputs():
    pair = tensor(w_marginal(3), w_marginal(3))
    assert pair.layout.dims == (2, 2, 2, 2)
    assert abs(np.trace(pair.mat) - 1) < 1e-12
