import numpy as np

from cgmalab.feasibility import chebyshev_margin


def test_unit_box_margin():
    # 0 < x < 2, 0 < y < 2: inscribed radius 1 around (1, 1)
    A = [[1, 0], [-1, 0], [0, 1], [0, -1]]
    b = [0, -2, 0, -2]
    res = chebyshev_margin(A, b)
    assert abs(res.margin - 1.0) <= 1e-12
    assert np.all(np.asarray(A) @ res.witness > b)


def test_empty_and_touching():
    # x > 1 and x < 1: empty
    assert chebyshev_margin([[1], [-1]], [1, -1]).margin == 0.0
    # x > 1 and x < 0: closure empty too
    assert chebyshev_margin([[1], [-1]], [1, 0]).margin < 0
    assert chebyshev_margin([[1], [-1]], [1, 0]).witness is None


def test_unbounded_and_degenerate_rows():
    assert chebyshev_margin([[1, 1]], [5]).margin == np.inf
    assert chebyshev_margin([[0, 0]], [0]).margin == -np.inf
    assert chebyshev_margin([[0, 0], [1, 0]], [-1, 0]).margin == np.inf


def test_random_systems_against_sampling():
    rng = np.random.default_rng(0)
    for _ in range(200):
        A = rng.normal(size=(6, 3))
        b = rng.normal(size=6)
        res = chebyshev_margin(A, b)
        if res.margin > 0:
            assert np.all(A @ res.witness > b)
        else:
            pts = rng.normal(scale=10, size=(20000, 3))
            assert not np.any(np.all(pts @ A.T > b, axis=1))
