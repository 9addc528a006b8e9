import math

import numpy as np
import pytest

import pqw


def test_graph_and_transition_matrix():
    g = pqw.Graph.complete(3)
    assert g.n == 3
    assert g.edges == [(0, 1), (0, 2), (1, 2)]
    p = pqw.transition_matrix(g)
    assert np.allclose(p, (np.ones((3, 3)) - np.eye(3)) / 2)
    assert pqw.Graph.from_spec("cycle:5") == pqw.Graph.odd_cycle(5)
    with pytest.raises(ValueError):
        pqw.Graph(3, [(0, 0)])


def test_walk_operator():
    g = pqw.Graph.odd_cycle(5)
    u = pqw.walk_unitary(g, [0])
    assert u.shape == (25, 25)
    assert np.allclose(u.T @ u, np.eye(25), atol=1e-12)
    psi = pqw.initial_state(g)
    assert np.allclose(pqw.walk_unitary(g) @ psi, psi, atol=1e-12)


def test_bounds_and_hitting_times():
    g = pqw.Graph.complete(3)
    b = pqw.bounds(g, [0])
    assert b["szegedy_bound"] == pytest.approx(100 * math.sqrt(2))
    assert b["p_threshold"] == pytest.approx(math.pi / 2700)
    r = pqw.coherent_qht(g, [0])
    assert r["T_star"] is not None and r["within_bound"]
    assert pqw.coherent_qht(g, [], tcap=50)["T_star"] is None
    d = pqw.decoherent_qht(g, [0], 0.0)
    assert d["T_star"] == r["T_star"]
    assert pqw.classical_hitting_time(g, [0]) == pytest.approx(4 / 3)


def test_averaged_operator_and_sequences():
    g = pqw.Graph.complete(3)
    exact = pqw.averaged_operator(g, [], 0.3)
    assert np.linalg.norm(exact, 2) <= 1 + 1e-12
    mc = pqw.averaged_operator(g, [], 0.3, mode="mc", samples=20000, seed=3)
    assert np.abs(mc - exact).max() < 0.05
    assert pqw.verify_lemma1(g, [0], 0.3, 2, 3) <= 1e-12
    value, method = pqw.exact_mean_p1(g, [0], 0.3, 3)
    assert method == "enumeration"
    assert 0.0 < value < 1.0
    with pytest.raises(RuntimeError):
        pqw.averaged_operator(pqw.Graph.complete(6), [0], 0.2)


def test_detection_and_cli(tmp_path):
    g = pqw.Graph.complete(3)
    report = pqw.detection_campaign(g, [0], 0.0, 16, 2000, seed=1)
    assert report["pass"]
    assert report["mean_p1"] >= 1 / 6
    assert pqw.run_cli(["verify", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "verify_report.json").exists()
    assert pqw.run_cli(["qht", "--graph", "nope:3", "--out", str(tmp_path)]) == 2
