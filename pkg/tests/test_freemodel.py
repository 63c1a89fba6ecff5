import numpy as np
import pytest

import oracles
from cgmalab.freemodel import (
    CommensurabilityError,
    Left,
    ModelWedgeTag,
    RapidityGrid,
    Right,
    boost_rep,
    build_model,
    modular_flow_model,
    momentum,
    translation_phases,
    translation_rep,
    wedge_conjugation,
)
from cgmalab.tomita import op_distance, op_norm
from cgmalab.wedges import W1, complement, wedge_equal


@pytest.fixture(scope="module")
def grid():
    return RapidityGrid(40, 0.05, 1.0)


def test_momentum_examples():
    g = RapidityGrid(40, np.log(2.0) / 10, 1.0)
    assert np.allclose(momentum(g, 0), [1, 0, 0, 0])
    assert np.allclose(momentum(g, 10), [1.25, 0.75, 0, 0], atol=1e-14)
    p = g.momenta
    assert np.all(p[:, 0] >= np.abs(p[:, 1]))
    assert np.allclose(p, oracles.momentum_grid(1.0, 40, g.h))
    with pytest.raises(IndexError):
        momentum(g, 41)


def test_grid_validation():
    for bad in ((0, 0.05, 1.0), (10, 0.0, 1.0), (10, 0.05, -1.0)):
        with pytest.raises(ValueError):
            RapidityGrid(*bad)
    assert build_model(1, 200, 0.05).dim == 401


def test_translation_examples(grid):
    assert np.array_equal(translation_rep(grid, [0, 0]), np.eye(grid.dim))
    U = translation_rep(grid, [2 * np.pi, 0])
    assert abs(U[grid.K, grid.K] - 1.0) <= 1e-15
    with pytest.raises(ValueError):
        translation_phases(grid, [0, 0, 1, 0])


def test_extended_precision_phases_agree_with_float():
    g = RapidityGrid(200, 0.05, 1.0)
    xi = np.array([0.37, -0.21, 0, 0])
    naive = g.momenta[:, 0] * xi[0] - g.momenta[:, 1] * xi[1]
    diff = np.angle(np.exp(1j * (translation_phases(g, xi) - naive)))
    # float64 products lose a few 1e-12 at the grid edge
    assert np.max(np.abs(diff)) <= 1e-10


def test_boost_examples(grid):
    assert np.array_equal(boost_rep(grid, 0.0).matrix, np.eye(grid.dim))
    B = boost_rep(grid, grid.h)
    e = np.zeros(grid.dim)
    e[grid.K] = 1.0
    assert np.array_equal(B.matrix @ e, np.roll(e, 1))
    assert B.dropped == (grid.K,)
    with pytest.raises(CommensurabilityError) as err:
        boost_rep(grid, grid.h / 2)
    assert err.value.suggestions == (0.0, grid.h)
    assert "nearest commensurate" in str(err.value)


def test_boost_acts_on_momenta(grid):
    from cgmalab.geometry import boost

    n = 3
    B = boost(n * grid.h, [1, 0, 0])[:2, :2]
    k = np.arange(-grid.K, grid.K + 1 - n) + grid.K
    assert np.allclose((B @ grid.momenta[k].T).T, grid.momenta[k + n])


def test_conjugation_is_involution(grid):
    for tag in (Right(), Right(0.3, -0.7), Left(1.0, 2.0)):
        J = wedge_conjugation(grid, tag)
        assert J.involution_residual() <= 1e-14


def test_haag_duality(grid):
    for xi in ((0.0, 0.0), (0.4, -1.1)):
        assert op_distance(wedge_conjugation(grid, Right(*xi)), wedge_conjugation(grid, Left(*xi))) == 0.0


def test_conjugation_covariance(grid):
    xi = np.array([0.3, 0.2])
    U = translation_rep(grid, xi)
    lhs = U @ wedge_conjugation(grid, Right()) @ U.conj().T
    assert op_distance(lhs, wedge_conjugation(grid, Right(*xi))) <= 1e-13


def test_conjugation_inverts_translations(grid):
    J = wedge_conjugation(grid, Right())
    U = translation_rep(grid, [0.5, 0.25])
    assert op_norm((J @ U @ J) - U.conj().T) <= 1e-14


def test_flow_examples(grid):
    assert np.array_equal(modular_flow_model(grid, Right(), 0.0), np.eye(grid.dim))
    t0 = grid.h / (2 * np.pi)
    F = modular_flow_model(grid, Right(), t0)
    assert np.array_equal(F, boost_rep(grid, -grid.h).matrix)
    FL = modular_flow_model(grid, Left(), t0)
    assert np.array_equal(FL, boost_rep(grid, grid.h).matrix)
    with pytest.raises(CommensurabilityError):
        modular_flow_model(grid, Right(), 0.001)


def test_flow_is_translated_boost(grid):
    t0 = grid.h / (2 * np.pi)
    xi = (0.3, 0.2)
    U = translation_rep(grid, xi)
    expected = U @ modular_flow_model(grid, Right(), t0) @ U.conj().T
    assert op_norm(modular_flow_model(grid, Right(*xi), t0) - expected) <= 1e-13


def test_flow_commutes_with_conjugation_on_interior(grid):
    t0 = grid.h / (2 * np.pi)
    tag = Right(0.3, 0.2)
    J = wedge_conjugation(grid, tag)
    F = modular_flow_model(grid, tag, t0)
    mask = grid.interior(2)
    D = (J @ F @ J) - F
    assert op_norm(D[np.ix_(mask, mask)]) <= 1e-13


def test_tag_labels_and_wedges():
    assert wedge_equal(Right().wedge, W1)
    assert wedge_equal(Left().wedge, complement(W1))
    assert Right(0.3, 0.2).label == "R(0.3,0.2)"
    assert ModelWedgeTag.from_wedge(Left(1, 2).wedge) == Left(1, 2)
    assert ModelWedgeTag.from_wedge(W1 + [0, 0, 0, 0]) == Right()
    with pytest.raises(ValueError):
        ModelWedgeTag("X")


def test_identify_flow_recovers_tag():
    model = build_model(1.0, 40, 0.05)
    t = 2 * model.flow_probe
    for tag in (Right(0.3, 0.2), Left(-0.4, 1.5), Right()):
        W = model.identify_flow(model.flow(tag, t), t)
        assert W is not None and wedge_equal(W, tag.wedge, 1e-8)
    assert model.identify_flow(np.eye(model.dim), t) is None
    assert model.identify_flow(model.flow(Right(), t), 0.001) is None


def test_time_reflected_fixture():
    model = build_model(1.0, 40, 0.05, time_reflected=True)
    J = model.conj(Right(0.3, 0.2))
    U = model.U([0.3, 0.2])
    # built with U(-xi): the plain covariance picks up the opposite translation
    assert op_distance(U.conj().T @ model.conj(Right()) @ U, J) <= 1e-13
    W = model.identify_flow(model.flow(Right(0.3, 0.2), model.flow_probe), model.flow_probe)
    assert wedge_equal(W, Right(0.3, 0.2).wedge, 1e-8)
