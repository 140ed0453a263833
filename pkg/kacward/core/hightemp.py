"""Exact partition function by brute force and by the high-temperature even-subgraph expansion."""
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from kacward.core.lattice import LatticeSpec, bond_sums_for_range
from kacward.utils.constants import BRUTE_FORCE_CHUNK_SIZE, MAX_CYCLE_SPACE_DIM, SUBSET_SCAN_MAX_BONDS
from kacward.utils.env_utils import brute_force_max_n
from kacward.utils.exceptions import ConsistencyError, IntractableSizeError
from kacward.utils.logging import logger
from kacward.utils.polynomial import IntPolynomial


@dataclass(frozen=True)
class EvenSubgraph:
    """A nonempty bond subset in which every site has even valence, stored as a bitmask over bond ids."""
    bonds: int

    @property
    def L(self) -> int:
        return bin(self.bonds).count('1')


def site_degrees(lattice: LatticeSpec, mask: int) -> List[int]:
    """Valence of every site within the bond subset given by mask."""
    degrees = [0] * lattice.num_sites
    for bond_id, (tail, head) in enumerate(lattice.bond_site_indices):
        if (mask >> bond_id) & 1:
            degrees[tail] += 1
            degrees[head] += 1
    return degrees


def is_even_subgraph(lattice: LatticeSpec, mask: int) -> bool:
    return all(d % 2 == 0 for d in site_degrees(lattice, mask))


def density_of_states(lattice: LatticeSpec, max_n: Optional[int] = None) -> Dict[int, int]:
    """
    Exact number of spin configurations for every value S of the bond sum.

    The 2^(N^2) words are swept in fixed-size index chunks in increasing order, so the result is identical
    across runs.

    Parameters:
        lattice (LatticeSpec): The lattice.
        max_n (int): Size guard; defaults to KACWARD_BRUTE_MAX_N or 5.

    Returns:
        Dict[int, int]: mapping S -> g(S) with S in -x..x.
    """
    limit = brute_force_max_n(max_n)
    if lattice.N > limit:
        raise IntractableSizeError('brute-force N', lattice.N, limit)

    x = lattice.num_bonds
    total = 1 << lattice.num_sites
    histogram = np.zeros(2 * x + 1, dtype=np.int64)
    for start in range(0, total, BRUTE_FORCE_CHUNK_SIZE):
        stop = min(start + BRUTE_FORCE_CHUNK_SIZE, total)
        sums = bond_sums_for_range(lattice, start, stop)
        histogram += np.bincount(sums + x, minlength=2 * x + 1)
    logger.debug(f"Swept {total} configurations of the {lattice.N}x{lattice.N} lattice")
    return {s - x: int(count) for s, count in enumerate(histogram) if count}


def partition_brute_force(lattice: LatticeSpec, K: float, max_n: Optional[int] = None) -> float:
    """
    Z_N(K) = sum over all spin configurations of exp(K sum_{n.n.} sigma_i sigma_j).

    Parameters:
        lattice (LatticeSpec): The lattice.
        K (float): Dimensionless coupling J / (k_B T).
        max_n (int): Size guard override.

    Returns:
        float: the partition function, accumulated with math.fsum.
    """
    dos = density_of_states(lattice, max_n)
    return math.fsum(count * math.exp(K * s) for s, count in sorted(dos.items()))


def _subset_scan(lattice: LatticeSpec) -> List[int]:
    # Depth-first over bonds in id order; a site is checked as soon as its last incident bond is decided.
    x = lattice.num_bonds
    closing: List[List[int]] = [[] for _ in range(x)]
    for site, ids in enumerate(lattice.incident_bonds):
        if ids:
            closing[max(ids)].append(site)
    pairs = [(int(t), int(h)) for t, h in lattice.bond_site_indices]
    degrees = [0] * lattice.num_sites
    found: List[int] = []

    def visit(bond_id: int, mask: int) -> None:
        if bond_id == x:
            if mask:
                found.append(mask)
            return
        tail, head = pairs[bond_id]
        for take in (0, 1):
            if take:
                degrees[tail] += 1
                degrees[head] += 1
            if all(degrees[s] % 2 == 0 for s in closing[bond_id]):
                visit(bond_id + 1, mask | (take << bond_id))
            if take:
                degrees[tail] -= 1
                degrees[head] -= 1

    visit(0, 0)
    return sorted(found)


def _face_cycle_span(lattice: LatticeSpec) -> List[int]:
    span = [0]
    for face in lattice.face_masks():
        span += [g ^ face for g in span]
    return sorted(g for g in span if g)


def enumerate_even_subgraphs(lattice: LatticeSpec, method: str = 'auto') -> List[EvenSubgraph]:
    """
    All nonempty even subgraphs of the lattice, each exactly once, ordered by bitmask.

    Parameters:
        lattice (LatticeSpec): The lattice.
        method (str): 'scan' (pruned subset scan, x <= 24), 'faces' (XOR span of the unit squares) or 'auto'.

    Returns:
        List[EvenSubgraph]: 2^(x - V + 1) - 1 subgraphs.
    """
    x = lattice.num_bonds
    cycle_dim = x - lattice.num_sites + 1
    if method == 'auto':
        method = 'scan' if x <= SUBSET_SCAN_MAX_BONDS else 'faces'

    if method == 'scan':
        if x > SUBSET_SCAN_MAX_BONDS:
            raise IntractableSizeError('subset-scan bond count', x, SUBSET_SCAN_MAX_BONDS)
        masks = _subset_scan(lattice)
    elif method == 'faces':
        if cycle_dim > MAX_CYCLE_SPACE_DIM:
            raise IntractableSizeError('cycle-space dimension', cycle_dim, MAX_CYCLE_SPACE_DIM)
        masks = _face_cycle_span(lattice)
    else:
        raise ValueError(f"unknown enumeration method {method!r}; expected 'auto', 'scan' or 'faces'")

    if len(masks) + 1 != 2**cycle_dim:
        raise ConsistencyError(
            f"found {len(masks)} even subgraphs, expected 2^{cycle_dim} - 1 for N={lattice.N}")
    logger.debug(f"Enumerated {len(masks)} even subgraphs of N={lattice.N} by {method}")
    return [EvenSubgraph(m) for m in masks]


def graph_generating_polynomial(lattice: LatticeSpec, method: str = 'auto') -> IntPolynomial:
    """1 + sum over even subgraphs of u^L, with exact integer coefficients."""
    subgraphs = enumerate_even_subgraphs(lattice, method)
    return IntPolynomial.from_counts([0] + [g.L for g in subgraphs])


def graph_prefactor_log(lattice: LatticeSpec, K: float) -> float:
    """ln of 2^(N^2) (1 - u^2)^(-N(N-1)) = N^2 ln 2 + x ln cosh K."""
    # (1 - tanh^2 K)^(-1) = cosh^2 K avoids cancellation at large K
    return lattice.num_sites * math.log(2.0) + lattice.num_bonds * math.log(math.cosh(K))


def partition_from_graphs(lattice: LatticeSpec, K: float, method: str = 'auto') -> float:
    """
    Z_N(u) = 2^(N^2) (1 - u^2)^(-N(N-1)) (1 + sum_G u^L) with u = tanh K.

    Parameters:
        lattice (LatticeSpec): The lattice.
        K (float): Dimensionless coupling.
        method (str): Even-subgraph enumeration method.

    Returns:
        float: the partition function.
    """
    poly = graph_generating_polynomial(lattice, method)
    u = math.tanh(K)
    return math.exp(graph_prefactor_log(lattice, K)) * math.fsum(
        c * u**m for m, c in enumerate(poly.coeffs))
