"""Topology and coupling-matrix tests."""
import numpy as np
import pytest

import pinlock as pl
from pinlock.errors import InputError
from pinlock.network import topology_from_json, topology_to_json

from helpers import random_connected_topology


def test_two_node_single_edge():
    a = pl.coupling_matrix(pl.Topology(2, [(1, 2)]))
    assert np.array_equal(a.entries, [[-1.0, 1.0], [1.0, -1.0]])


def test_reference_topology_degrees():
    t = pl.fixtures.builtin_topology("paper-fig2")
    assert list(pl.degrees(t)) == [1, 1, 1, 6, 3, 3, 3, 1, 1]
    assert pl.is_connected(t)


def test_empty_edges():
    t = pl.Topology(3, [])
    assert np.array_equal(pl.coupling_matrix(t).entries, np.zeros((3, 3)))
    assert not pl.is_connected(t)


def test_complete_graph_degrees():
    t = pl.Topology(4, [(i, j) for i in range(1, 5) for j in range(i + 1, 5)])
    assert list(pl.degrees(t)) == [3, 3, 3, 3]


def test_path_degrees():
    assert list(pl.degrees(pl.Topology(3, [(1, 2), (2, 3)]))) == [1, 2, 1]


def test_single_node_is_connected():
    assert pl.is_connected(pl.Topology(1, []))


def test_two_disjoint_edges_not_connected():
    assert not pl.is_connected(pl.Topology(4, [(1, 2), (3, 4)]))


def test_invalid_edges_rejected():
    with pytest.raises(InputError):
        pl.Topology(3, [(1, 1)])
    with pytest.raises(InputError):
        pl.Topology(3, [(0, 2)])
    with pytest.raises(InputError):
        pl.Topology(3, [(1, 4)])


def test_row_sums_exactly_zero(rng):
    for _ in range(20):
        t = random_connected_topology(rng, int(rng.integers(2, 13)))
        a = pl.coupling_matrix(t)
        assert np.all(a.entries.sum(axis=1) == 0.0)
        assert np.array_equal(np.diag(a.entries), -pl.degrees(t).astype(float))


def test_connected_spectrum_lemma(rng):
    # connected graphs: top eigenvalue 0 with multiplicity 1, rest negative
    for _ in range(40):
        t = random_connected_topology(rng, int(rng.integers(2, 13)))
        spec = pl.symmetric_eigen(pl.coupling_matrix(t).matrix)
        assert abs(spec.eigenvalues[-1]) <= 1e-8
        if t.n > 1:
            assert spec.eigenvalues[-2] < -1e-8


def test_json_round_trip():
    t = pl.fixtures.builtin_topology("paper-fig2")
    again = topology_from_json(topology_to_json(t))
    assert again == t


def test_json_requires_fields():
    with pytest.raises(InputError):
        topology_from_json('{"n": 3}')
