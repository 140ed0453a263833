"""
Closed non-backtracking paths on the colored lattice.

A path is a word of steps (bond id, exponent) where the exponent is +1 when the bond is traversed along its
orientation and -1 against it. Words are equivalent under circular rotation and inversion. Every class carries
the sign (-1)^(1+t), t being the turning number, and the amplitude W_p(u) = s(p) u^l. The product of 1 + W_p
over nonperiodic classes reproduces the even-subgraph polynomial; both sides are compared here as exact
integer polynomials.
"""
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from kacward.core.hightemp import graph_generating_polynomial, graph_prefactor_log
from kacward.core.lattice import LatticeSpec, Site
from kacward.utils.constants import DEFAULT_MAX_PATH_LEN
from kacward.utils.exceptions import ConsistencyError, IntractableSizeError, PathValidationError
from kacward.utils.logging import logger
from kacward.utils.polynomial import IntPolynomial

Step = Tuple[int, int]
Vector = Tuple[int, int]

# free-plane step vectors, indexed like the transfer-matrix directions: up, down, rightward, leftward
PLANE_STEPS: Tuple[Vector, ...] = ((0, 1), (0, -1), (1, 0), (-1, 0))
_REVERSE = (1, 0, 3, 2)


@dataclass(frozen=True)
class PathWord:
    """
    A word D_{j1}^{e1} ... D_{jl}^{el}.

    When a lattice is attached the word is validated as a closed non-backtracking path on it; words without a
    lattice are symbolic: they are only checked for immediate reversals and support word-level operations (rotation,
    inversion, period).
    """
    steps: Tuple[Step, ...]
    lattice: Optional[LatticeSpec] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        steps = tuple((int(b), int(e)) for b, e in self.steps)
        for bond_id, e in steps:
            if e not in (1, -1):
                raise PathValidationError(f"exponent must be +1 or -1, got {e} on bond {bond_id}")
        object.__setattr__(self, 'steps', steps)
        if self.lattice is not None:
            validate_path(self.lattice, steps)
        elif len(steps) > 1:
            _check_reversals(steps)

    def __len__(self) -> int:
        return len(self.steps)

    @classmethod
    def from_sites(cls, lattice: LatticeSpec, sites: Sequence[Site]) -> 'PathWord':
        """Build the word visiting the given sites in order and returning to the first one."""
        sites = list(sites)
        if len(sites) >= 2 and sites[0] == sites[-1]:
            sites = sites[:-1]
        steps = []
        for a, b in zip(sites, sites[1:] + sites[:1]):
            bond = lattice.bond_between(a, b)
            steps.append((bond.id, 1 if (bond.tail, bond.head) == (a, b) else -1))
        return cls(tuple(steps), lattice)

    def inverse(self) -> 'PathWord':
        return PathWord(tuple((b, -e) for b, e in reversed(self.steps)), self.lattice)

    def rotate(self, k: int) -> 'PathWord':
        if not self.steps:
            return self
        k %= len(self.steps)
        return PathWord(self.steps[k:] + self.steps[:k], self.lattice)

    def repeat(self, w: int) -> 'PathWord':
        return PathWord(self.steps * w, self.lattice)


@dataclass(frozen=True)
class SignedAmplitude:
    """W_p(u) = sign * u^power."""
    sign: int
    power: int

    def __call__(self, u: float) -> float:
        return self.sign * u**self.power

    def polynomial(self) -> IntPolynomial:
        return IntPolynomial.monomial(self.power, self.sign)


@dataclass(frozen=True)
class PathClass:
    """Equivalence class [p] under rotation and inversion, with its canonical representative."""
    canonical: PathWord
    period: int
    amplitude: Optional[SignedAmplitude] = None

    @property
    def length(self) -> int:
        return len(self.canonical)

    @property
    def sign(self) -> Optional[int]:
        return None if self.amplitude is None else self.amplitude.sign

    @property
    def key(self) -> bytes:
        return word_key(self.canonical.steps)


def _step_sites(lattice: LatticeSpec, step: Step) -> Tuple[Site, Site]:
    bond_id, e = step
    if not 0 <= bond_id < lattice.num_bonds:
        raise PathValidationError(f"bond id {bond_id} is outside 0..{lattice.num_bonds - 1}")
    bond = lattice.bonds[bond_id]
    return (bond.tail, bond.head) if e == 1 else (bond.head, bond.tail)


def _check_reversals(steps: Sequence[Step]) -> None:
    # immediate reversals are visible without a lattice, cyclically included
    for i, (step, nxt) in enumerate(zip(steps, steps[1:] + steps[:1])):
        if step[0] == nxt[0] and step[1] == -nxt[1]:
            raise PathValidationError(f"path backtracks over bond {step[0]} at step {(i + 1) % len(steps)}")


def validate_path(lattice: LatticeSpec, steps: Sequence[Step]) -> None:
    """Raise PathValidationError unless steps form a closed, chained, non-backtracking word."""
    if not steps:
        raise PathValidationError("a path needs at least one step")
    ends = [_step_sites(lattice, s) for s in steps]
    for i, (step, nxt) in enumerate(zip(steps, steps[1:] + steps[:1])):
        if ends[i][1] != ends[(i + 1) % len(steps)][0]:
            what = "is not closed" if i == len(steps) - 1 else f"breaks between steps {i} and {i + 1}"
            raise PathValidationError(f"path {what}")
        if step[0] == nxt[0]:
            raise PathValidationError(f"path backtracks over bond {step[0]} at step {(i + 1) % len(steps)}")


def word_key(steps: Sequence[Step]) -> bytes:
    """Compact byte encoding of a word, used to key canonical forms."""
    return b''.join(((b + 1) * e).to_bytes(4, 'little', signed=True) for b, e in steps)


def canonical_steps(steps: Tuple[Step, ...]) -> Tuple[Step, ...]:
    """Lexicographic minimum over all rotations of the word and of its inversion."""
    inverse = tuple((b, -e) for b, e in reversed(steps))
    best = steps
    for word in (steps, inverse):
        for k in range(len(word)):
            candidate = word[k:] + word[:k]
            if candidate < best:
                best = candidate
    return best


def period(p: PathWord) -> int:
    """Largest w such that the word is a w-fold repetition of a subword."""
    steps = p.steps
    n = len(steps)
    for d in range(1, n + 1):
        if n % d == 0 and steps[:d] * (n // d) == steps:
            return n // d
    return 1


def turn_counts(vectors: Sequence[Vector]) -> Tuple[int, int]:
    """
    Left and right turns of a closed sequence of unit step vectors, the wrap-around turn included.

    Raises:
        PathValidationError: when a step reverses its predecessor.
    """
    left = right = 0
    for (ax, ay), (bx, by) in zip(vectors, list(vectors[1:]) + list(vectors[:1])):
        cross = ax * by - ay * bx
        if cross == 1:
            left += 1
        elif cross == -1:
            right += 1
        elif ax * bx + ay * by == -1:
            raise PathValidationError("closed walk reverses direction")
    return left, right


def sign_from_turns(left: int, right: int) -> int:
    """
    Multiply alpha = e^{i pi/4} per left turn and its conjugate per right turn, then multiply by -1.

    The phase is tracked as an exact exponent of alpha modulo 8.
    """
    phase = (left - right) % 8
    if phase == 0:
        return -1
    if phase == 4:
        return 1
    raise ConsistencyError(f"accumulated phase alpha^{phase} is not real for a closed path")


def step_vectors(lattice: LatticeSpec, steps: Sequence[Step]) -> List[Vector]:
    vectors = []
    for step in steps:
        (ax, ay), (bx, by) = _step_sites(lattice, step)
        vectors.append((bx - ax, by - ay))
    return vectors


def turning_number(p: PathWord) -> int:
    if p.lattice is None:
        raise ValueError("turning number needs a word attached to a lattice")
    left, right = turn_counts(step_vectors(p.lattice, p.steps))
    return (left - right) // 4


def sign(p: PathWord) -> int:
    """s(p) = (-1)^(1+t) for a closed word attached to a lattice."""
    if p.lattice is None:
        raise ValueError("the sign of a path needs a word attached to a lattice")
    return sign_from_turns(*turn_counts(step_vectors(p.lattice, p.steps)))


def canonicalize(p: PathWord) -> PathClass:
    """
    Canonical class of a path.

    Parameters:
        p (PathWord): A closed non-backtracking word (validated when a lattice is attached).

    Returns:
        PathClass: canonical representative, period and, for lattice words, the signed amplitude.
    """
    canonical = PathWord(canonical_steps(p.steps), p.lattice)
    amplitude = SignedAmplitude(sign(p), len(p)) if p.lattice is not None else None
    return PathClass(canonical, period(p), amplitude)


class _StepTables(NamedTuple):
    # directed step ds = 2 * bond + (0 forward, 1 backward)
    start: List[int]
    end: List[int]
    coords: List[Site]
    vectors: List[Vector]
    successors: List[List[int]]


def _directed_step_tables(lattice: LatticeSpec) -> _StepTables:
    n_directed = 2 * lattice.num_bonds
    start = [0] * n_directed
    end = [0] * n_directed
    coords = [lattice.site_of_index(k) for k in range(lattice.num_sites)]
    for bond in lattice.bonds:
        t, h = lattice.site_index(bond.tail), lattice.site_index(bond.head)
        start[2 * bond.id], end[2 * bond.id] = t, h
        start[2 * bond.id + 1], end[2 * bond.id + 1] = h, t
    leaving: List[List[int]] = [[] for _ in range(lattice.num_sites)]
    for ds in range(n_directed):
        leaving[start[ds]].append(ds)
    vectors = [(coords[end[ds]][0] - coords[start[ds]][0], coords[end[ds]][1] - coords[start[ds]][1])
               for ds in range(n_directed)]
    successors = [[nxt for nxt in leaving[end[ds]] if nxt // 2 != ds // 2] for ds in range(n_directed)]
    return _StepTables(start, end, coords, vectors, successors)


def _check_walk_budget(max_len: int) -> None:
    if max_len < 0:
        raise ValueError(f"max_len must be nonnegative, got {max_len}")
    if max_len > DEFAULT_MAX_PATH_LEN:
        raise IntractableSizeError('path length', max_len, DEFAULT_MAX_PATH_LEN)


def iter_rooted_closed_walks(lattice: LatticeSpec, max_len: int) -> Iterator[Tuple[int, ...]]:
    """
    Every rooted, directed closed non-backtracking walk of length <= max_len on the lattice.

    Walks are tuples of directed steps (2 * bond + (0 forward, 1 backward)), generated by first step and then
    depth first. A branch is cut as soon as its lattice distance to the start exceeds the remaining length.
    """
    _check_walk_budget(max_len)
    tables = _directed_step_tables(lattice)
    for first in range(2 * lattice.num_bonds):
        origin = tables.start[first]
        yield from _extend([first], origin, tables.coords[origin], max_len, tables)


def _extend(walk: List[int], origin: int, anchor: Site, max_len: int,
            tables: _StepTables) -> Iterator[Tuple[int, ...]]:
    current = walk[-1]
    depth = len(walk)
    # the wrap-around turn back into the first step must not reverse either
    if tables.end[current] == origin and walk[0] in tables.successors[current]:
        yield tuple(walk)
    if depth >= max_len:
        return
    remaining = max_len - depth - 1
    for nxt in tables.successors[current]:
        cx, cy = tables.coords[tables.end[nxt]]
        if abs(cx - anchor[0]) + abs(cy - anchor[1]) <= remaining:
            walk.append(nxt)
            yield from _extend(walk, origin, anchor, max_len, tables)
            walk.pop()


def _to_steps(walk: Sequence[int]) -> Tuple[Step, ...]:
    return tuple((ds // 2, 1 if ds % 2 == 0 else -1) for ds in walk)


def enumerate_closed_classes(lattice: LatticeSpec, max_len: int) -> List[PathClass]:
    """
    Every nonperiodic class of closed non-backtracking paths of length <= max_len, each exactly once.

    Rooted directed walks are quotiented by rotation and inversion. A class of length l and period w is reached
    by exactly 2l / w rooted walks; the count is checked for every class and periodic classes are dropped.

    Parameters:
        lattice (LatticeSpec): The lattice.
        max_len (int): Longest path kept; at most DEFAULT_MAX_PATH_LEN.

    Returns:
        List[PathClass]: classes ordered by length and then canonical word, each with its signed amplitude.
    """
    counts: Counter = Counter()
    words: Dict[bytes, Tuple[Step, ...]] = {}
    for walk in iter_rooted_closed_walks(lattice, max_len):
        canonical = canonical_steps(_to_steps(walk))
        key = word_key(canonical)
        counts[key] += 1
        words.setdefault(key, canonical)

    classes = []
    periodic = 0
    for key, canonical in sorted(words.items(), key=lambda item: (len(item[1]), item[1])):
        word = PathWord(canonical, lattice)
        w = period(word)
        expected = 2 * len(word) // w
        if counts[key] != expected:
            raise ConsistencyError(
                f"class of length {len(word)} and period {w} was reached {counts[key]} times, expected {expected}")
        if w > 1:
            periodic += 1
            continue
        classes.append(PathClass(word, 1, SignedAmplitude(sign(word), len(word))))
    logger.debug(f"N={lattice.N}, max_len={max_len}: {len(classes)} nonperiodic classes, {periodic} periodic skipped")
    return classes


def path_product_polynomial(classes: Sequence[PathClass], max_order: int) -> IntPolynomial:
    """prod over classes of (1 + W_p(u)), expanded exactly and truncated at u^max_order."""
    product = IntPolynomial.one()
    for cls in classes:
        if cls.length > max_order:
            continue
        product = product.multiply(IntPolynomial.one() + cls.amplitude.polynomial(), max_order)
    return product


@dataclass(frozen=True)
class OrderComparison:
    order: int
    graph: int
    path: int

    @property
    def match(self) -> bool:
        return self.graph == self.path


@dataclass
class FeynmanReport:
    """Coefficient-by-coefficient comparison of the even-subgraph polynomial with the path product."""
    N: int
    max_order: int
    graph_side: IntPolynomial
    path_side: IntPolynomial
    num_classes: int
    orders: List[OrderComparison]

    @property
    def verdict(self) -> bool:
        return all(o.match for o in self.orders)

    @property
    def mismatches(self) -> List[int]:
        return [o.order for o in self.orders if not o.match]

    def to_dict(self) -> dict:
        return {
            'N': self.N,
            'max_order': self.max_order,
            'num_classes': self.num_classes,
            'graph_side': str(self.graph_side),
            'path_side': str(self.path_side),
            'orders': [{'order': o.order, 'graph': o.graph, 'path': o.path, 'match': o.match} for o in self.orders],
            'verdict': self.verdict,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def feynman_identity_check(lattice: LatticeSpec, max_order: int, method: str = 'auto') -> FeynmanReport:
    """
    Compare 1 + sum_G u^L with prod_[p] (1 + W_p(u)) up to u^max_order, in exact integers.

    A mismatch is reported in the returned FeynmanReport, not raised.

    Parameters:
        lattice (LatticeSpec): The lattice.
        max_order (int): Highest power of u compared.
        method (str): Even-subgraph enumeration method for the graph side.

    Returns:
        FeynmanReport: both polynomials, per-order pairs and the overall verdict.
    """
    _check_walk_budget(max_order)
    graph_side = graph_generating_polynomial(lattice, method).truncate(max_order)
    classes = enumerate_closed_classes(lattice, max_order)
    path_side = path_product_polynomial(classes, max_order)
    orders = [OrderComparison(m, graph_side.coefficient(m), path_side.coefficient(m)) for m in range(max_order + 1)]
    report = FeynmanReport(lattice.N, max_order, graph_side, path_side, len(classes), orders)
    if report.verdict:
        logger.info(f"Path product matches the graph polynomial for N={lattice.N} through u^{max_order}")
    else:
        logger.warning(f"Path product differs from the graph polynomial for N={lattice.N} at orders "
                       f"{report.mismatches}")
    return report


def partition_product_truncated(lattice: LatticeSpec, K: float, max_len: int) -> float:
    """
    Z_N from the path product, keeping only classes of length <= max_len.

    This is an approximation that converges as max_len grows; for N = 2 the single unit square makes it exact
    from max_len = 4 on.

    Parameters:
        lattice (LatticeSpec): The lattice.
        K (float): Dimensionless coupling; u = tanh K.
        max_len (int): Longest class kept in the product.

    Returns:
        float: 2^(N^2) (1 - u^2)^(-N(N-1)) prod_[p] (1 + W_p(u)).
    """
    u = math.tanh(K)
    classes = enumerate_closed_classes(lattice, max_len)
    log_product = math.fsum(math.log1p(cls.amplitude(u)) for cls in classes)
    return math.exp(graph_prefactor_log(lattice, K) + log_product)


def rooted_closed_walks(n: int) -> List[Tuple[int, ...]]:
    """
    Closed non-backtracking walks of length n on the infinite plane that start and end at the origin.

    Walks are sequences of direction indices into PLANE_STEPS. Periodic walks are included, and a walk and its
    inversion are both listed.
    """
    _check_walk_budget(n)
    if n < 4 or n % 2:
        return []
    found: List[Tuple[int, ...]] = []
    walk: List[int] = []

    def visit(x: int, y: int) -> None:
        depth = len(walk)
        if depth == n:
            if x == 0 and y == 0 and walk[0] != _REVERSE[walk[-1]]:
                found.append(tuple(walk))
            return
        for d, (dx, dy) in enumerate(PLANE_STEPS):
            if walk and d == _REVERSE[walk[-1]]:
                continue
            nx, ny = x + dx, y + dy
            if abs(nx) + abs(ny) <= n - depth - 1:
                walk.append(d)
                visit(nx, ny)
                walk.pop()

    visit(0, 0)
    return found


def base_point_sign_sum(n: int) -> int:
    """Sum of s(p) over the rooted closed walks of length n through the origin."""
    return sum(sign_from_turns(*turn_counts([PLANE_STEPS[d] for d in walk])) for walk in rooted_closed_walks(n))


def base_point_amplitude(n: int, u: float) -> float:
    """
    Total signed amplitude of closed length-n walks through a fixed base point, inversions divided out.

    Parameters:
        n (int): Walk length.
        u (float): Weight tanh K.

    Returns:
        float: (1/2) sum_p s(p) u^n.
    """
    return 0.5 * base_point_sign_sum(n) * u**n


def log_product_series(lattice: LatticeSpec, max_len: int) -> List[Fraction]:
    """
    Exact coefficients of sum_n (1/n) sum_{p(n)} W_p(u) through u^max_len.

    The inner sum runs over all closed paths of length n with a distinguished starting step, periodic ones
    included; a path and its inversion count once.
    """
    tables = _directed_step_tables(lattice)
    coeffs = [Fraction(0)] * (max_len + 1)
    for walk in iter_rooted_closed_walks(lattice, max_len):
        s = sign_from_turns(*turn_counts([tables.vectors[ds] for ds in walk]))
        coeffs[len(walk)] += Fraction(s, 2 * len(walk))
    return coeffs


def log_polynomial_series(poly: IntPolynomial, max_order: int) -> List[Fraction]:
    """
    Power-series coefficients of ln(poly(u)) through u^max_order, for poly with constant term 1.

    Uses n g_n = n f_n - sum_{k=1}^{n-1} k g_k f_{n-k} with g = ln f.
    """
    if poly.coefficient(0) != 1:
        raise ValueError(f"ln series needs a constant term of 1, got {poly.coefficient(0)}")
    g = [Fraction(0)] * (max_order + 1)
    for n in range(1, max_order + 1):
        acc = Fraction(n * poly.coefficient(n))
        for k in range(1, n):
            acc -= k * g[k] * poly.coefficient(n - k)
        g[n] = acc / n
    return g


@dataclass
class LogSeriesReport:
    """The walk sum against ln of the path product and ln of the graph polynomial, order by order."""
    N: int
    max_len: int
    walk_side: List[Fraction]
    product_side: List[Fraction]
    graph_side: List[Fraction]

    @property
    def verdict(self) -> bool:
        return self.walk_side == self.product_side == self.graph_side

    def to_dict(self) -> dict:
        fmt = lambda series: [str(c) for c in series]  # noqa: E731
        return {
            'N': self.N,
            'max_len': self.max_len,
            'walk_side': fmt(self.walk_side),
            'product_side': fmt(self.product_side),
            'graph_side': fmt(self.graph_side),
            'verdict': self.verdict,
        }


def log_product_series_check(lattice: LatticeSpec, max_len: int, method: str = 'auto') -> LogSeriesReport:
    """Check that the rooted walk sum equals ln prod_[p] (1 + W_p) and ln(1 + sum_G u^L) through u^max_len."""
    walk_side = log_product_series(lattice, max_len)
    classes = enumerate_closed_classes(lattice, max_len)
    product_side = log_polynomial_series(path_product_polynomial(classes, max_len), max_len)
    graph_side = log_polynomial_series(graph_generating_polynomial(lattice, method).truncate(max_len), max_len)
    report = LogSeriesReport(lattice.N, max_len, walk_side, product_side, graph_side)
    if not report.verdict:
        logger.warning(f"Walk log-series disagrees with the path product for N={lattice.N} through u^{max_len}")
    return report
