"""
Modules with infinity-simplicial faces, their D-infinity differentials and totalization
"""
import logging
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .chain_complex import BarredModule, ChainComplex
from .errors import InvalidIndices, NotADifferential
from .graded import BigradedModule, SignedMap, difference_nnz, graded_commutator_check, map_add, \
    map_compose, map_scale
from .reports import ValidationReport

logger = logging.getLogger(__name__)

Indices = Tuple[int, ...]


def check_indices(indices: Sequence[int], n: int) -> Indices:
    indices = tuple(indices)
    k = len(indices)
    if not 1 <= k <= n:
        raise InvalidIndices(f"{indices} has length {k}, needs 1..{n} at degree {n}")
    if indices[0] < 0 or indices[-1] > n or any(a >= b for a, b in zip(indices, indices[1:])):
        raise InvalidIndices(f"{indices} is not strictly increasing inside [0, {n}]")
    return indices


def face_tuples(n: int, k: Optional[int] = None) -> Iterator[Indices]:
    """All valid index tuples at degree n, shortest first"""
    lengths = [k] if k is not None else range(1, n + 1)
    for length in lengths:
        yield from combinations(range(n + 1), length)


def parity(sigma: Sequence[int]) -> int:
    inversions = sum(1 for a in range(len(sigma)) for b in range(a + 1, len(sigma)) if sigma[a] > sigma[b])
    return inversions % 2


def hat_action(sigma: Sequence[int], indices: Sequence[int]) -> Indices:
    """
    Hatted arrangement of a permuted index tuple

    Args:
        sigma: permutation of positions 0..k-1; position s receives indices[sigma[s]]
        indices: strictly increasing tuple

    Returns:
        Each entry lowered by the number of smaller entries standing to its right
    """
    arranged = [indices[s] for s in sigma]
    return tuple(x - sum(1 for y in arranged[pos + 1:] if y < x) for pos, x in enumerate(arranged))


def _increasing(t: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(t, t[1:]))


@lru_cache(maxsize=None)
def split_terms(indices: Indices) -> Tuple[Tuple[int, Indices, Indices], ...]:
    """(sign, first, second) summands of d(face) for one index tuple: sign * face(first) o face(second)"""
    k = len(indices)
    terms = []
    for sigma in permutations(range(k)):
        hatted = hat_action(sigma, indices)
        sign = -1 if parity(sigma) == 0 else 1
        for cut in range(1, k):
            first, second = hatted[:cut], hatted[cut:]
            if _increasing(first) and _increasing(second):
                terms.append((sign, first, second))
    return tuple(terms)


class FaceFamily:
    """Differential module with faces stored per ambient degree n"""

    def __init__(self, underlying: BigradedModule, d: SignedMap,
                 faces: Dict[Tuple[int, Indices], SignedMap], check_differential: bool = True):
        self.underlying = underlying
        self.d = d
        self.faces: Dict[Tuple[int, Indices], SignedMap] = {}
        if d.bidegree != (0, -1):
            raise ValueError(f"Differential must have bidegree (0, -1), got {d.bidegree}")
        for (n, indices), f in faces.items():
            indices = check_indices(indices, n)
            k = len(indices)
            if f.bidegree != (-k, k - 1):
                raise InvalidIndices(f"Face {indices} at degree {n} has bidegree {f.bidegree}")
            if not f.is_zero():
                self.faces[(n, indices)] = f.restrict(n)
        if check_differential and not map_compose(d, d).is_zero():
            raise NotADifferential("d o d is nonzero on the underlying module")

    @property
    def max_n(self) -> int:
        return self.underlying.max_n

    def face(self, n: int, indices: Sequence[int]) -> SignedMap:
        indices = check_indices(indices, n)
        f = self.faces.get((n, indices))
        if f is None:
            k = len(indices)
            return SignedMap.zero(self.underlying, self.underlying, (-k, k - 1))
        return f

    def with_face(self, n: int, indices: Sequence[int], f: SignedMap) -> "FaceFamily":
        faces = dict(self.faces)
        faces[(n, tuple(indices))] = f
        return FaceFamily(self.underlying, self.d, faces, check_differential=False)


def hierarchy_rhs(ff: FaceFamily, indices: Sequence[int], n: int) -> SignedMap:
    """
    Right-hand side of the face hierarchy relation for one index tuple

    Args:
        ff: face family
        indices: strictly increasing tuple valid at degree n
        n: ambient simplicial degree

    Returns:
        SignedMap of bidegree (-k, k-2)
    """
    indices = check_indices(indices, n)
    k = len(indices)
    module = ff.underlying
    total = SignedMap.zero(module, module, (-k, k - 2))
    for sign, first, second in split_terms(indices):
        inner = ff.faces.get((n, second))
        if inner is None:
            continue
        outer = ff.faces.get((n - len(second), first))
        if outer is None:
            continue
        total = map_add(total, map_scale(sign, map_compose(outer, inner)))
    return total


def face_differential(ff: FaceFamily, indices: Sequence[int], n: int) -> SignedMap:
    """d(face) = d o face + face o d; faces have total degree -1"""
    return graded_commutator_check(ff.d, ff.face(n, indices), -1)


def validate_f_module(ff: FaceFamily) -> ValidationReport:
    """Check the face hierarchy relation for every index tuple of every populated degree"""
    report = ValidationReport("face hierarchy")
    for n in range(1, ff.max_n + 1):
        for indices in face_tuples(n):
            lhs = face_differential(ff, indices, n)
            rhs = hierarchy_rhs(ff, indices, n)
            nnz = difference_nnz(lhs, rhs)
            report.check(nnz == 0, "d(face) = sum of split products", f"n={n} {indices}",
                         difference_nnz=nnz)
    report.log_summary()
    return report


def _alternation_sign(indices: Sequence[int]) -> int:
    return -1 if sum(indices) % 2 else 1


class DInfinityModule:
    """Maps d^0, d^1, ... with d^i of bidegree (-i, i-1)"""

    def __init__(self, underlying: BigradedModule, components: List[SignedMap], level: int = 0):
        self.underlying = underlying
        self.level = level
        for i, c in enumerate(components):
            if c.bidegree != (-i, i - 1):
                raise ValueError(f"d^{i} must have bidegree {(-i, i - 1)}, got {c.bidegree}")
        self.components = list(components)

    def component(self, i: int) -> SignedMap:
        if i < len(self.components):
            return self.components[i]
        return SignedMap.zero(self.underlying, self.underlying, (-i, i - 1))

    def relation_report(self) -> ValidationReport:
        """Sum over i + j = k of d^i d^j vanishes for every k"""
        report = ValidationReport(f"D-infinity relations (q={self.level})")
        top = len(self.components)
        for k in range(top + 1):
            total = SignedMap.zero(self.underlying, self.underlying, (-k, k - 2))
            for i in range(k + 1):
                total = map_add(total, map_compose(self.component(i), self.component(k - i)))
            nnz = sum(b.nnz for b in total.blocks.values())
            report.check(nnz == 0, "sum d^i d^j = 0", f"k={k}", difference_nnz=nnz)
        return report


def dq_differentials(ff: FaceFamily, q: int) -> DInfinityModule:
    """
    Alternating sums of faces whose last index is at most n - q

    Args:
        ff: face family
        q: level, 0 for b and 1 for b'

    Returns:
        DInfinityModule with d^0 = d
    """
    if q < 0:
        raise ValueError(f"Level must be nonnegative, got {q}")
    module = ff.underlying
    top = max(ff.max_n, 0)
    components = [ff.d] + [SignedMap.zero(module, module, (-k, k - 1)) for k in range(1, top + 1)]
    for (n, indices), f in sorted(ff.faces.items()):
        if indices[-1] > n - q:
            continue
        k = len(indices)
        components[k] = map_add(components[k], map_scale(_alternation_sign(indices), f))
    return DInfinityModule(module, components, q)


def totalize(dm: DInfinityModule, barred: Optional[BarredModule] = None, name: str = "") -> ChainComplex:
    """
    Collapse a D-infinity module to the complex X-bar with d-bar = sum of d^i

    Raises:
        NotADifferential when d-bar does not square to zero
    """
    barred = barred or BarredModule(dm.underlying)
    complex_ = barred.complex(dm.components, name or f"Xbar(q={dm.level})")
    bad = complex_.square_zero_failures()
    if bad:
        raise NotADifferential(f"Totalized differential at level {dm.level} fails d^2 = 0 leaving degrees {bad}")
    logger.info(f"Totalized level {dm.level}: dims {complex_.dims()}")
    return complex_
