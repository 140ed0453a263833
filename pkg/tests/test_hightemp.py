import math

import pytest

from kacward.core.hightemp import (
    density_of_states,
    enumerate_even_subgraphs,
    graph_generating_polynomial,
    is_even_subgraph,
    partition_brute_force,
    partition_from_graphs,
)
from kacward.core.lattice import build_lattice
from kacward.utils.exceptions import IntractableSizeError

COUPLINGS = (0.1, 0.3, 0.5, 0.9)


def test_density_of_states_two_by_two():
    # A ring of four spins: 0, 2 or 4 disagreeing bonds
    assert density_of_states(build_lattice(2)) == {-4: 2, 0: 12, 4: 2}


def test_brute_force_closed_form_two_by_two():
    lattice = build_lattice(2)
    for K in COUPLINGS:
        expected = 2 * math.exp(4 * K) + 12 + 2 * math.exp(-4 * K)
        assert partition_brute_force(lattice, K) == pytest.approx(expected, rel=1e-14)


def test_brute_force_at_zero_coupling():
    for N in (1, 2, 3):
        lattice = build_lattice(N)
        assert partition_brute_force(lattice, 0.0) == 2.0**lattice.num_sites


def test_graph_polynomial_small_lattices():
    assert graph_generating_polynomial(build_lattice(1)).coeffs == (1,)
    assert graph_generating_polynomial(build_lattice(2)).coeffs == (1, 0, 0, 0, 1)
    assert str(graph_generating_polynomial(build_lattice(3))) == "1 + 4u^4 + 4u^6 + 7u^8"


def test_even_subgraph_count_and_parity():
    for N in (2, 3, 4):
        lattice = build_lattice(N)
        subgraphs = enumerate_even_subgraphs(lattice)
        cycle_dim = lattice.num_bonds - lattice.num_sites + 1

        assert len(subgraphs) == 2**cycle_dim - 1
        assert all(is_even_subgraph(lattice, g.bonds) for g in subgraphs)
        assert all(g.L % 2 == 0 and g.L >= 4 for g in subgraphs)


def test_scan_and_faces_agree():
    for N in (2, 3, 4):
        lattice = build_lattice(N)
        assert enumerate_even_subgraphs(lattice, 'scan') == enumerate_even_subgraphs(lattice, 'faces')


def test_graphs_match_brute_force():
    for N in (2, 3, 4):
        lattice = build_lattice(N)
        for K in COUPLINGS:
            brute = partition_brute_force(lattice, K)
            assert partition_from_graphs(lattice, K) == pytest.approx(brute, rel=1e-12)


def test_negative_coupling_is_symmetric_on_bipartite_lattice():
    lattice = build_lattice(3)
    assert partition_brute_force(lattice, -0.4) == pytest.approx(partition_brute_force(lattice, 0.4), rel=1e-14)
    assert partition_from_graphs(lattice, -0.4) == pytest.approx(partition_brute_force(lattice, -0.4), rel=1e-12)


def test_size_guards():
    with pytest.raises(IntractableSizeError, match="intractable size"):
        partition_brute_force(build_lattice(6), 0.1)
    with pytest.raises(IntractableSizeError):
        enumerate_even_subgraphs(build_lattice(5), 'scan')
    with pytest.raises(IntractableSizeError):
        graph_generating_polynomial(build_lattice(6))
    with pytest.raises(ValueError):
        enumerate_even_subgraphs(build_lattice(2), 'greedy')
