"""
Free bigraded modules and signed maps of fixed bidegree
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .errors import BidegreeMismatch, ModuleMismatch
from .exact_linalg import RingSpec, Scalar, SparseMatrix

logger = logging.getLogger(__name__)

Bidegree = Tuple[int, int]
Label = Tuple[str, ...]


@dataclass(frozen=True)
class BasisElement:
    label: Label
    n: int
    m: int

    @property
    def text(self) -> str:
        return "|".join(self.label)


class BigradedModule:
    """Free module with a named basis in each piece X_{n,m}"""

    def __init__(self, ring: RingSpec, pieces: Mapping[Bidegree, Iterable[Label]]):
        self.ring = ring
        self._pieces: Dict[Bidegree, Tuple[Label, ...]] = {}
        self._index: Dict[Bidegree, Dict[Label, int]] = {}
        for (n, m), labels in sorted(pieces.items()):
            if n < 0 or m < 0:
                raise ValueError(f"Negative bidegree ({n}, {m})")
            labels = tuple(labels)
            if not labels:
                continue
            index = {label: i for i, label in enumerate(labels)}
            if len(index) != len(labels):
                raise ValueError(f"Repeated basis label in piece ({n}, {m})")
            self._pieces[(n, m)] = labels
            self._index[(n, m)] = index

    @property
    def pieces(self) -> List[Bidegree]:
        return list(self._pieces)

    def basis(self, n: int, m: int) -> Tuple[Label, ...]:
        return self._pieces.get((n, m), ())

    def elements(self, n: int, m: int) -> List[BasisElement]:
        return [BasisElement(label, n, m) for label in self.basis(n, m)]

    def dim(self, n: int, m: int) -> int:
        return len(self._pieces.get((n, m), ()))

    def index(self, n: int, m: int, label: Label) -> int:
        return self._index[(n, m)][label]

    def internal_degrees(self, n: int) -> List[int]:
        return sorted(m for (k, m) in self._pieces if k == n)

    @property
    def max_n(self) -> int:
        return max((n for n, _ in self._pieces), default=-1)

    def __eq__(self, other):
        if not isinstance(other, BigradedModule):
            return NotImplemented
        return self is other or (self.ring == other.ring and self._pieces == other._pieces)

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"BigradedModule({self.ring.label}, pieces={len(self._pieces)})"


class SignedMap:
    """Morphism of bidegree (dn, dm) stored as one sparse block per source piece"""

    def __init__(self, source: BigradedModule, target: BigradedModule, bidegree: Bidegree,
                 blocks: Optional[Mapping[Bidegree, SparseMatrix]] = None):
        self.source = source
        self.target = target
        self.bidegree = tuple(bidegree)
        self.blocks: Dict[Bidegree, SparseMatrix] = {}
        dn, dm = self.bidegree
        for (n, m), block in (blocks or {}).items():
            rows, cols = target.dim(n + dn, m + dm), source.dim(n, m)
            if block.shape != (rows, cols):
                raise BidegreeMismatch(
                    f"Block at ({n}, {m}) has shape {block.shape}, expected {(rows, cols)}")
            if rows and cols and not block.is_zero():
                self.blocks[(n, m)] = block

    @property
    def ring(self) -> RingSpec:
        return self.source.ring

    @classmethod
    def zero(cls, source: BigradedModule, target: BigradedModule, bidegree: Bidegree) -> "SignedMap":
        return cls(source, target, bidegree)

    @classmethod
    def identity(cls, module: BigradedModule, only_n: Optional[int] = None) -> "SignedMap":
        blocks = {(n, m): SparseMatrix.identity(module.ring, module.dim(n, m))
                  for (n, m) in module.pieces if only_n is None or n == only_n}
        return cls(module, module, (0, 0), blocks)

    def block(self, n: int, m: int) -> SparseMatrix:
        b = self.blocks.get((n, m))
        if b is not None:
            return b
        dn, dm = self.bidegree
        return SparseMatrix.zero(self.ring, self.target.dim(n + dn, m + dm), self.source.dim(n, m))

    def restrict(self, n: int) -> "SignedMap":
        """Keep only the blocks with source simplicial degree n"""
        return SignedMap(self.source, self.target, self.bidegree,
                         {k: v for k, v in self.blocks.items() if k[0] == n})

    def is_zero(self) -> bool:
        return not self.blocks

    def __add__(self, other):
        return map_add(self, other)

    def __sub__(self, other):
        return map_add(self, map_scale(-1, other))

    def __neg__(self):
        return map_scale(-1, self)

    def __matmul__(self, other):
        return map_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, SignedMap):
            return NotImplemented
        return map_equal(self, other)

    def __repr__(self):
        return f"SignedMap(bidegree={self.bidegree}, blocks={len(self.blocks)})"


def map_compose(f: SignedMap, g: SignedMap) -> SignedMap:
    """
    Blockwise composition f after g

    Args:
        f: outer map
        g: inner map, whose target must be the source of f

    Returns:
        SignedMap of bidegree bidegree(f) + bidegree(g)
    """
    if g.target != f.source:
        raise ModuleMismatch("Target of the inner map differs from the source of the outer map")
    gn, gm = g.bidegree
    blocks = {}
    for (n, m), gb in g.blocks.items():
        fb = f.blocks.get((n + gn, m + gm))
        if fb is not None:
            blocks[(n, m)] = fb.compose(gb)
    bidegree = (f.bidegree[0] + gn, f.bidegree[1] + gm)
    return SignedMap(g.source, f.target, bidegree, blocks)


def _check_compatible(f: SignedMap, g: SignedMap) -> None:
    if f.source != g.source or f.target != g.target:
        raise ModuleMismatch("Maps act between different modules")
    if f.bidegree != g.bidegree:
        raise BidegreeMismatch(f"Bidegrees {f.bidegree} and {g.bidegree} differ")


def map_add(f: SignedMap, g: SignedMap) -> SignedMap:
    _check_compatible(f, g)
    blocks = dict(f.blocks)
    for key, gb in g.blocks.items():
        fb = blocks.get(key)
        blocks[key] = gb if fb is None else fb.add(gb)
    return SignedMap(f.source, f.target, f.bidegree, blocks)


def map_scale(c: Any, f: SignedMap) -> SignedMap:
    if isinstance(c, Scalar):
        c = c.value
    return SignedMap(f.source, f.target, f.bidegree, {k: b.scale(c) for k, b in f.blocks.items()})


def map_equal(f: SignedMap, g: SignedMap) -> bool:
    _check_compatible(f, g)
    return f.blocks == g.blocks


def map_sum(maps: Iterable[SignedMap], source: BigradedModule, target: BigradedModule,
            bidegree: Bidegree) -> SignedMap:
    total = SignedMap.zero(source, target, bidegree)
    for f in maps:
        total = map_add(total, f)
    return total


def graded_commutator_check(d: SignedMap, f: SignedMap, sign: int) -> SignedMap:
    """
    The map d(f) = d o f - sign * f o d

    Args:
        d: differential of bidegree (0, -1) acting on both source and target of f
        f: the map being differentiated
        sign: +1 or -1

    Returns:
        SignedMap of bidegree bidegree(f) + (0, -1)
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    left = map_compose(d, f)
    right = map_compose(f, d)
    return map_add(left, map_scale(-sign, right))


def difference_nnz(f: SignedMap, g: SignedMap) -> int:
    """Number of nonzero entries of f - g"""
    diff = map_add(f, map_scale(-1, g))
    return sum(b.nnz for b in diff.blocks.values())
