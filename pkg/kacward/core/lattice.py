"""The colored N x N planar square lattice: sites, oriented numbered bonds and spin configurations."""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

Site = Tuple[int, int]
SpinConfig = int  # V-bit word; bit k is site (k mod N, k div N), 1 <-> sigma = +1


@dataclass(frozen=True)
class Bond:
    """
    An oriented bond of the lattice.

    Parameters:
        id (int): The bond "color", dense in 0..x-1.
        tail (Site): First endpoint; the orientation points from tail to head.
        head (Site): Second endpoint.
    """
    id: int
    tail: Site
    head: Site

    @property
    def endpoints(self) -> Tuple[Site, Site]:
        return self.tail, self.head

    @property
    def horizontal(self) -> bool:
        return self.tail[1] == self.head[1]


@dataclass(frozen=True)
class LatticeSpec:
    """
    Finite planar N x N square lattice with open boundaries.

    Horizontal bonds come first, numbered row-major as row * (N - 1) + col and oriented +x; vertical bonds
    follow, numbered N(N - 1) + row * N + col and oriented +y. Sites are (x, y) with x, y in 0..N-1.
    """
    N: int
    bonds: Tuple[Bond, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise TypeError(f"N must be an integer, got {type(self.N).__name__}")
        if self.N < 1:
            raise ValueError(f"invalid size: N must be >= 1, got {self.N}")
        object.__setattr__(self, 'N', int(self.N))
        object.__setattr__(self, 'bonds', tuple(_number_bonds(self.N)))

    @property
    def num_sites(self) -> int:
        return self.N * self.N

    @property
    def num_bonds(self) -> int:
        return 2 * self.N * (self.N - 1)

    @property
    def num_faces(self) -> int:
        return (self.N - 1) * (self.N - 1)

    def site_index(self, site: Site) -> int:
        x, y = site
        if not self.contains(site):
            raise ValueError(f"site {site} is outside the {self.N}x{self.N} lattice")
        return y * self.N + x

    def site_of_index(self, k: int) -> Site:
        return k % self.N, k // self.N

    def contains(self, site: Site) -> bool:
        x, y = site
        return 0 <= x < self.N and 0 <= y < self.N

    @cached_property
    def _bond_lookup(self) -> Dict[Tuple[Site, Site], Bond]:
        lookup = {}
        for bond in self.bonds:
            lookup[(bond.tail, bond.head)] = bond
            lookup[(bond.head, bond.tail)] = bond
        return lookup

    def bond_between(self, a: Site, b: Site) -> Bond:
        """The bond joining two nearest-neighbour sites, in either order."""
        try:
            return self._bond_lookup[(a, b)]
        except KeyError:
            raise ValueError(f"sites {a} and {b} are not nearest neighbours on the lattice")

    @cached_property
    def incident_bonds(self) -> Tuple[Tuple[int, ...], ...]:
        """For every site index, the ids of the bonds touching it."""
        incident: List[List[int]] = [[] for _ in range(self.num_sites)]
        for bond in self.bonds:
            incident[self.site_index(bond.tail)].append(bond.id)
            incident[self.site_index(bond.head)].append(bond.id)
        return tuple(tuple(ids) for ids in incident)

    def valence(self, site: Site) -> int:
        return len(self.incident_bonds[self.site_index(site)])

    @cached_property
    def bond_site_indices(self) -> np.ndarray:
        """Array of shape (x, 2) with the (tail, head) site indices of every bond."""
        pairs = [(self.site_index(b.tail), self.site_index(b.head)) for b in self.bonds]
        return np.array(pairs, dtype=np.int64).reshape(-1, 2)

    def face_bonds(self, x: int, y: int) -> Tuple[int, int, int, int]:
        """Bond ids around the unit square with lower-left corner (x, y)."""
        if not (0 <= x < self.N - 1 and 0 <= y < self.N - 1):
            raise ValueError(f"no face with lower-left corner {(x, y)}")
        return (
            self.bond_between((x, y), (x + 1, y)).id,
            self.bond_between((x + 1, y), (x + 1, y + 1)).id,
            self.bond_between((x, y + 1), (x + 1, y + 1)).id,
            self.bond_between((x, y), (x, y + 1)).id,
        )

    def face_masks(self) -> List[int]:
        """Bitmasks over bond ids for the (N - 1)^2 unit squares, row-major."""
        masks = []
        for y in range(self.N - 1):
            for x in range(self.N - 1):
                mask = 0
                for bond_id in self.face_bonds(x, y):
                    mask |= 1 << bond_id
                masks.append(mask)
        return masks


def _number_bonds(N: int) -> List[Bond]:
    bonds = []
    for row in range(N):
        for col in range(N - 1):
            bonds.append(Bond(len(bonds), (col, row), (col + 1, row)))
    for row in range(N - 1):
        for col in range(N):
            bonds.append(Bond(len(bonds), (col, row), (col, row + 1)))
    return bonds


def build_lattice(N: int) -> LatticeSpec:
    """
    Build the colored N x N lattice.

    Parameters:
        N (int): Sites per side, N >= 1.

    Returns:
        LatticeSpec: lattice with N^2 sites and 2N(N - 1) oriented, numbered bonds.
    """
    return LatticeSpec(N)


def spins_from_sequence(lattice: LatticeSpec, spins: Sequence[int]) -> SpinConfig:
    """Pack a sequence of +1/-1 values, indexed like the sites, into a SpinConfig word."""
    if len(spins) != lattice.num_sites:
        raise ValueError(f"expected {lattice.num_sites} spins, got {len(spins)}")
    word = 0
    for k, s in enumerate(spins):
        if s not in (1, -1):
            raise ValueError(f"spin values must be +1 or -1, got {s} at site {k}")
        if s == 1:
            word |= 1 << k
    return word


def spins_to_sequence(lattice: LatticeSpec, sigma: SpinConfig) -> List[int]:
    return [1 if (sigma >> k) & 1 else -1 for k in range(lattice.num_sites)]


def _as_word(lattice: LatticeSpec, sigma: Union[SpinConfig, Sequence[int]]) -> SpinConfig:
    if isinstance(sigma, (int, np.integer)) and not isinstance(sigma, bool):
        sigma = int(sigma)
        if not 0 <= sigma < (1 << lattice.num_sites):
            raise ValueError(f"spin word {sigma} does not fit {lattice.num_sites} sites")
        return sigma
    return spins_from_sequence(lattice, sigma)


def bond_sum(lattice: LatticeSpec, sigma: Union[SpinConfig, Sequence[int]]) -> int:
    """Sum of sigma_i sigma_j over all nearest-neighbour bonds."""
    word = _as_word(lattice, sigma)
    disagreements = 0
    for tail, head in lattice.bond_site_indices:
        disagreements += ((word >> int(tail)) ^ (word >> int(head))) & 1
    return lattice.num_bonds - 2 * disagreements


def config_energy(lattice: LatticeSpec, sigma: Union[SpinConfig, Sequence[int]], J: float = 1.0) -> float:
    """Energy -J sum_{n.n.} sigma_i sigma_j of a spin configuration."""
    return -J * bond_sum(lattice, sigma)


def iter_configs(lattice: LatticeSpec, start: int = 0, stop: int = None) -> Iterator[SpinConfig]:
    """Spin configurations in increasing word order over [start, stop)."""
    total = 1 << lattice.num_sites
    stop = total if stop is None else min(stop, total)
    return iter(range(start, stop))


def bond_sums_for_range(lattice: LatticeSpec, start: int, stop: int) -> np.ndarray:
    """
    Vectorised bond sums for the configuration words start..stop-1.

    Returns:
        np.ndarray: int64 array of length stop - start.
    """
    words = np.arange(start, stop, dtype=np.int64)
    disagreements = np.zeros(words.shape, dtype=np.int64)
    for tail, head in lattice.bond_site_indices:
        disagreements += ((words >> tail) ^ (words >> head)) & 1
    return lattice.num_bonds - 2 * disagreements
