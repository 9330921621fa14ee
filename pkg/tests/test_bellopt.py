import math

import numpy as np
import pytest

from qtransit.bellopt import (
    Assemblage,
    BellFunctional,
    Correlation,
    Scenario,
    born_correlation,
    correlation_from_dict,
    correlation_to_dict,
    default_restarts,
    horodecki_chsh,
    is_nonsignaling,
    load_correlation,
    local_bound,
    make_functional,
    marginal_of,
    random_projective_povm,
    save_correlation,
    seesaw_optimize,
)
from qtransit.errors import CapacityError, SignalingError
from qtransit.qcore import DensityOp, Ket, Layout, partial_trace
from qtransit.rng import derive_seed
from qtransit.states import (
    bell_ket,
    cg04_ab_marginal,
    cg04_ac_marginal,
    cg04_state,
    rotated_bell_state,
    triangle_marginal,
    w_marginal,
)

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])

ROOT2 = math.sqrt(2.0)


def dichotomic_povm(obs):
    return (np.eye(2) + obs) / 2, (np.eye(2) - obs) / 2


def zx_assemblage():
    row = (dichotomic_povm(SZ), dichotomic_povm(SX))
    return Assemblage((row, row))


def mermin_functional():
    signs = np.zeros((2, 2, 2))
    signs[0, 0, 1] = signs[0, 1, 0] = signs[1, 0, 0] = 1.0
    signs[1, 1, 1] = -1.0
    out = np.array([1.0, -1.0])
    beta = np.einsum("xyz,a,b,c->xyzabc", signs, out, out, out)
    scen = Scenario((2, 2, 2), (2, 2, 2))
    f = BellFunctional(scen, beta, 0.0)
    return BellFunctional(scen, beta, local_bound(f))


def random_two_qubit_state(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = g @ g.conj().T
    return DensityOp(m / np.trace(m), Layout((2, 2)))


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario((2,), (2,))  # single party
    with pytest.raises(ValueError):
        Scenario((2, 2), (2,))
    with pytest.raises(ValueError):
        Scenario((2, 0), (2, 2))
    s = Scenario((3, 2), (2, 4))
    assert s.table_shape == (3, 2, 2, 4)


def test_correlation_validation():
    scen = Scenario((2, 2), (2, 2))
    bad = np.full(scen.table_shape, 0.25)
    bad[0, 0, 0, 0] = -0.1
    with pytest.raises(ValueError):
        Correlation(scen, bad)
    unnorm = np.full(scen.table_shape, 0.3)
    with pytest.raises(ValueError):
        Correlation(scen, unnorm)


def test_named_functional_bounds():
    assert make_functional("chsh").local_bound == 2.0
    assert make_functional("i3322").local_bound == 0.0
    assert make_functional("s_ext").local_bound == 8.0
    with pytest.raises(ValueError):
        make_functional("cglmp")


def test_chsh_coefficients_are_signed_correlators():
    f = make_functional("chsh")
    assert f.coeffs.shape == (2, 2, 2, 2)
    assert set(np.unique(f.coeffs)) == {-1.0, 1.0}
    assert f.coeffs[1, 1, 0, 0] == -1.0
    assert f.coeffs[1, 1, 0, 1] == 1.0


def test_local_bound_capacity_guard():
    scen = Scenario((8, 8), (10, 10))
    f = BellFunctional(scen, np.zeros(scen.table_shape), 0.0)
    with pytest.raises(CapacityError):
        local_bound(f)


def test_local_bound_mermin():
    assert mermin_functional().local_bound == 2.0


def test_game_kind_requires_nonnegative_coeffs():
    scen = Scenario((2, 2), (2, 2))
    with pytest.raises(ValueError):
        BellFunctional(scen, make_functional("chsh").coeffs, 2.0, kind="game")


def test_horodecki_known_values():
    assert abs(horodecki_chsh(bell_ket("psi+").density()) - 2 * ROOT2) < 1e-12
    assert abs(horodecki_chsh(w_marginal(3)) - 4 * ROOT2 / 3) < 1e-12
    mu1 = math.sqrt(1 - 1 / ROOT2)
    assert horodecki_chsh(cg04_ac_marginal(mu1 - 1e-3)) > 2.0
    assert horodecki_chsh(cg04_ac_marginal(mu1 + 1e-3)) < 2.0
    product = DensityOp(np.diag([1.0, 0, 0, 0]), Layout((2, 2)))
    assert horodecki_chsh(product) <= 2.0 + 1e-12
    with pytest.raises(ValueError):
        horodecki_chsh(DensityOp(np.eye(6) / 6, Layout((2, 3))))


def test_born_rotated_bell_reaches_chsh_maximum():
    corr = born_correlation(rotated_bell_state().density(), zx_assemblage())
    f = make_functional("chsh")
    assert abs(f.value(corr) - 2 * ROOT2) < 1e-12
    assert is_nonsignaling(corr, 1e-10)


def test_born_on_white_noise_is_uniform():
    rng = np.random.default_rng(4)
    row = tuple(tuple(random_projective_povm(rng, 2, 2)) for _ in range(2))
    asm = Assemblage((row, row))
    rho = DensityOp(np.eye(4) / 4, Layout((2, 2)))
    corr = born_correlation(rho, asm)
    np.testing.assert_allclose(corr.table, 0.25, atol=1e-12)


def test_born_triangle_s_value():
    # per-qubit sigma_z / sigma_x products on each half of the 4-dim parties
    rows = []
    for x in range(4):
        first = dichotomic_povm(SZ if x >> 1 == 0 else SX)
        second = dichotomic_povm(SZ if x & 1 == 0 else SX)
        rows.append(
            tuple(np.kron(first[a1], second[a2]) for a1 in range(2) for a2 in range(2))
        )
    asm = Assemblage((tuple(rows), tuple(rows)))
    corr = born_correlation(triangle_marginal("AB"), asm)
    f = make_functional("s_ext")
    assert abs(f.value(corr) - 8 * ROOT2) < 1e-10


def test_born_dimension_mismatch():
    with pytest.raises(ValueError):
        born_correlation(w_marginal(3), Assemblage(((dichotomic_povm(SZ),),)) )


def test_signaling_table_detected():
    scen = Scenario((2, 2), (2, 2))
    t = np.zeros(scen.table_shape)
    # Alice's marginal depends on Bob's setting: signaling by construction
    t[:, 0, 0, :] = 0.5
    t[:, 1, 1, :] = 0.5
    corr = Correlation(scen, t)
    assert not is_nonsignaling(corr)
    with pytest.raises(SignalingError):
        marginal_of(corr, (0,))


def test_tripartite_marginal_matches_direct_born():
    rng = np.random.default_rng(9)
    effs = tuple(
        tuple(tuple(random_projective_povm(rng, 2, 2)) for _ in range(2)) for _ in range(3)
    )
    rho = cg04_state(0.6).density()
    corr = born_correlation(rho, Assemblage(effs))
    assert is_nonsignaling(corr, 1e-10)
    got = marginal_of(corr, (0, 1))
    want = born_correlation(partial_trace(rho, (0, 1)), Assemblage((effs[0], effs[1])))
    np.testing.assert_allclose(got.table, want.table, atol=1e-12)
    flipped = marginal_of(corr, (1, 0))
    np.testing.assert_allclose(
        flipped.table, want.table.transpose(1, 0, 3, 2), atol=1e-12
    )


def test_local_models_never_beat_the_chsh_bound():
    f = make_functional("chsh")
    rng = np.random.default_rng(derive_seed("local-models"))
    det = np.array([1.0, -1.0])
    for _ in range(1000):
        n = rng.integers(1, 6)
        weights = rng.dirichlet(np.ones(n))
        table = np.zeros((2, 2, 2, 2))
        for w in weights:
            a = rng.integers(0, 2, size=2)  # outcome per setting of A
            b = rng.integers(0, 2, size=2)
            for x in range(2):
                for y in range(2):
                    table[x, y, a[x], b[y]] += w
        corr = Correlation(f.scenario, table)
        assert f.value(corr) <= f.local_bound + 1e-12


def test_seesaw_chsh_on_bell_state():
    res = seesaw_optimize(bell_ket("phi+").density(), make_functional("chsh"), seed=7)
    assert abs(res.value - 2 * ROOT2) < 1e-6
    assert res.converged
    corr = born_correlation(bell_ket("phi+").density(), res.assemblage)
    assert abs(make_functional("chsh").value(corr) - res.value) < 1e-9
    assert res.best_seed == derive_seed(7, res.best_restart)


def test_seesaw_i3322_qubit_maximum():
    res = seesaw_optimize(
        bell_ket("phi+").density(), make_functional("i3322"), restarts=100, seed=3
    )
    assert abs(res.value - 0.25) < 1e-4


def test_seesaw_finds_i3322_violation_of_cg04():
    res = seesaw_optimize(cg04_ab_marginal(0.852), make_functional("i3322"), restarts=64, seed=11)
    assert res.value > 1e-4


def test_seesaw_agrees_with_horodecki_on_random_states():
    # below 2 the criterion value is not operational (trivial measurements
    # always reach the local bound), so the meeting point is max(2, H)
    f = make_functional("chsh")
    for i in range(100):
        rho = random_two_qubit_state(derive_seed("hor-vs-seesaw", i))
        want = max(2.0, horodecki_chsh(rho))
        got = seesaw_optimize(rho, f, restarts=20, seed=derive_seed("ss", i)).value
        assert got <= want + 1e-7
        assert abs(got - want) < 1e-5


def test_seesaw_scaling_invariance():
    f = make_functional("chsh")
    g = f.scaled(2.5)
    assert abs(g.local_bound - 5.0) < 1e-12
    rho = random_two_qubit_state(21)
    a = seesaw_optimize(rho, f, restarts=12, seed=2)
    b = seesaw_optimize(rho, g, restarts=12, seed=2)
    assert abs(b.value - 2.5 * a.value) < 1e-9
    assert (a.value > f.local_bound) == (b.value > g.local_bound)


def test_seesaw_mermin_on_ghz():
    ghz = Ket(np.array([1, 0, 0, 0, 0, 0, 0, 1]) / ROOT2, Layout((2, 2, 2)))
    res = seesaw_optimize(ghz.density(), mermin_functional(), restarts=8, seed=5)
    assert abs(res.value - 4.0) < 1e-6


def test_seesaw_general_povm_updates_on_s_ext():
    res = seesaw_optimize(
        triangle_marginal("AB"),
        make_functional("s_ext"),
        restarts=2,
        max_iters=60,
        seed=1,
    )
    assert res.value > 11.31
    assert res.value <= 8 * ROOT2 + 1e-6


def test_seesaw_argument_checks():
    f = make_functional("chsh")
    rho = bell_ket("phi+").density()
    with pytest.raises(ValueError):
        seesaw_optimize(rho, f)  # seed missing
    with pytest.raises(ValueError):
        seesaw_optimize(rho, f, seed=1, update_rule="mystery")
    with pytest.raises(ValueError):
        seesaw_optimize(rho, make_functional("s_ext"), seed=1, update_rule="projective")
    with pytest.raises(ValueError):
        seesaw_optimize(cg04_state(0.5).density(), f, seed=1)  # party count mismatch


def test_seesaw_nonconvergence_flag():
    rho = random_two_qubit_state(31)
    res = seesaw_optimize(rho, make_functional("chsh"), restarts=4, max_iters=1, seed=9)
    assert not res.converged
    assert np.isfinite(res.value)


def test_default_restarts_table():
    assert default_restarts(2, 2) == 36
    assert default_restarts(3, 3) == 576
    assert default_restarts(5, 3) == 5184
    assert default_restarts(7, 2) == 100


def test_correlation_wire_roundtrip(tmp_path):
    corr = born_correlation(rotated_bell_state().density(), zx_assemblage())
    d = correlation_to_dict(corr)
    assert d["parties"] == 2 and d["settings"] == [2, 2]
    back = correlation_from_dict(d)
    np.testing.assert_allclose(back.table, corr.table, atol=0)
    path = tmp_path / "corr.json"
    save_correlation(corr, path)
    loaded = load_correlation(path)
    np.testing.assert_allclose(loaded.table, corr.table, atol=0)


def test_assemblage_validation():
    bad = np.array([[0.5, 0.6], [0.6, 0.5]])  # not PSD
    with pytest.raises(ValueError):
        Assemblage((((bad, np.eye(2) - bad),),))
    incomplete = (np.eye(2) * 0.4, np.eye(2) * 0.4)
    with pytest.raises(ValueError):
        Assemblage(((incomplete,),))


def test_random_projective_povm_structure():
    rng = np.random.default_rng(17)
    povm = random_projective_povm(rng, 4, 3)
    total = sum(povm)
    np.testing.assert_allclose(total, np.eye(4), atol=1e-12)
    for e in povm:
        np.testing.assert_allclose(e @ e, e, atol=1e-12)  # projectors
    many = random_projective_povm(rng, 2, 4)
    assert len(many) == 4
    np.testing.assert_allclose(sum(many), np.eye(2), atol=1e-12)
