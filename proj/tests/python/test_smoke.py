import json

import numpy as np
import pytest

import stclust


def test_generate_and_cluster_planted():
    net, truth = stclust.generate(seed=7)
    assert (net.N, net.T, net.multiplex) == (20, 21, True)
    run = stclust.cluster(net)
    assert run["packing"]["K"] == 2
    events = stclust.transitions(net, run)
    assert events[0]["kind"] == "appearance"
    ratios = stclust.packing_ratios(net, run, run["a"])
    assert len(ratios) == 2 and max(ratios) > 0


def test_two_slice_spectrum():
    doc = {"N": 2, "T": 2, "layers": [{"t": 1, "edges": [[1, 2, 1]]}, {"t": 2, "edges": [[1, 2, 2]]}]}
    net = stclust.TemporalNetwork.from_json(json.dumps(doc))
    values, vectors, labels = stclust.eigenpairs(net, 1.0, 4)
    assert np.allclose(values, [0, 2, 4 - np.sqrt(2), 4 + np.sqrt(2)], atol=1e-6)
    assert vectors.shape == (4, 4)
    assert len(labels) == 4
    r, c, v, n = stclust.supra_laplacian(net, 1.0)
    L = np.zeros((n, n))
    L[r, c] = v
    assert np.allclose(L, [[2, -1, -1, 0], [-1, 2, 0, -1], [-1, 0, 3, -2], [0, -1, -2, 3]])


def test_seba_and_cover():
    rng = np.random.default_rng(0)
    B = np.zeros((30, 2))
    B[:15, 0] = 1
    B[15:, 1] = 1
    B /= np.linalg.norm(B, axis=0)
    Q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    S, _, _ = stclust.seba(B @ Q)
    supports = sorted(tuple(np.flatnonzero(S[:, j] > 0)) for j in range(2))
    assert supports == [tuple(range(15)), tuple(range(15, 30))]
    C = np.array([[2.5, 2.5, 2.5], [0, 0, 1], [1, 1, 1], [2, 2, 0]])
    _, total = stclust.rmwec(C)
    assert total == pytest.approx(6.5)


def test_validation_error():
    with pytest.raises(stclust.ValidationError):
        stclust.TemporalNetwork.from_json(json.dumps({"N": 2}))
