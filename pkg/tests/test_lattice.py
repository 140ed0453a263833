import pytest

from kacward.core.lattice import (
    bond_sum,
    bond_sums_for_range,
    build_lattice,
    config_energy,
    iter_configs,
    spins_from_sequence,
    spins_to_sequence,
)


def test_build_lattice_counts():
    for N in range(1, 6):
        lattice = build_lattice(N)

        assert lattice.num_sites == N * N
        assert lattice.num_bonds == 2 * N * (N - 1)
        assert len(lattice.bonds) == lattice.num_bonds
        # Bond ids are dense and follow the listing order
        assert [b.id for b in lattice.bonds] == list(range(lattice.num_bonds))


def test_bond_numbering_and_orientation():
    lattice = build_lattice(3)

    # Horizontal bonds first, row-major, oriented +x
    assert lattice.bonds[0].endpoints == ((0, 0), (1, 0))
    assert lattice.bonds[2].endpoints == ((0, 1), (1, 1))
    assert all(b.horizontal for b in lattice.bonds[:6])
    # Vertical bonds follow, oriented +y
    assert lattice.bonds[6].endpoints == ((0, 0), (0, 1))
    assert lattice.bonds[11].endpoints == ((2, 1), (2, 2))
    assert not any(b.horizontal for b in lattice.bonds[6:])


def test_bond_between_and_valence():
    lattice = build_lattice(3)

    assert lattice.bond_between((1, 1), (1, 0)).id == lattice.bond_between((1, 0), (1, 1)).id
    assert lattice.valence((0, 0)) == 2
    assert lattice.valence((1, 0)) == 3
    assert lattice.valence((1, 1)) == 4
    with pytest.raises(ValueError):
        lattice.bond_between((0, 0), (1, 1))


def test_face_masks_are_unit_squares():
    lattice = build_lattice(4)
    masks = lattice.face_masks()

    assert len(masks) == lattice.num_faces == 9
    assert all(bin(m).count('1') == 4 for m in masks)


def test_invalid_size():
    with pytest.raises(ValueError, match="invalid size"):
        build_lattice(0)
    with pytest.raises(TypeError):
        build_lattice(2.5)


def test_bond_sum_extremes():
    lattice = build_lattice(3)
    all_up = [1] * 9
    checkerboard = [1 if (k % 3 + k // 3) % 2 == 0 else -1 for k in range(9)]

    assert bond_sum(lattice, all_up) == 12
    assert config_energy(lattice, all_up, J=2.0) == -24.0
    assert bond_sum(lattice, checkerboard) == -12


def test_spin_word_round_trip_and_validation():
    lattice = build_lattice(2)
    spins = [1, -1, -1, 1]
    word = spins_from_sequence(lattice, spins)

    assert spins_to_sequence(lattice, word) == spins
    with pytest.raises(ValueError):
        spins_from_sequence(lattice, [1, 0, 1, 1])
    with pytest.raises(ValueError):
        bond_sum(lattice, 1 << 4)


def test_vectorised_bond_sums_match_scalar():
    lattice = build_lattice(3)
    sums = bond_sums_for_range(lattice, 0, 1 << 9)

    assert [int(s) for s in sums] == [bond_sum(lattice, w) for w in iter_configs(lattice)]


@pytest.mark.parametrize('N', [2, 3])
def test_energy_is_invariant_under_global_flip(N):
    lattice = build_lattice(N)
    mask = (1 << lattice.num_sites) - 1

    for sigma in iter_configs(lattice):
        assert config_energy(lattice, sigma) == config_energy(lattice, sigma ^ mask)


def test_valences_sum_to_twice_the_bond_count():
    for N in range(1, 6):
        lattice = build_lattice(N)
        valences = [lattice.valence(lattice.site_of_index(k)) for k in range(lattice.num_sites)]

        assert sum(valences) == 2 * lattice.num_bonds


def test_small_lattice_energies():
    lattice1 = build_lattice(1)
    assert config_energy(lattice1, 0) == 0
    assert config_energy(lattice1, 1) == 0

    lattice2 = build_lattice(2)
    assert config_energy(lattice2, 0b1111) == -4
    # One flipped corner breaks both of its bonds
    assert config_energy(lattice2, 0b1110) == 0
    assert config_energy(lattice2, [-1, 1, 1, 1]) == 0
