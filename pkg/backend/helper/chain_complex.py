"""
Single-graded chain complexes, chain maps and the barred totalization of a bigraded module
"""
import logging
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import NotADifferential, WindowExceeded
from .exact_linalg import RingSpec, SparseMatrix
from .graded import BigradedModule, SignedMap

logger = logging.getLogger(__name__)


class ChainComplex:
    """Chain complex with named bases; differentials[N] maps degree N to N-1"""

    def __init__(self, ring: RingSpec, name: str, labels: Dict[int, Sequence[Any]],
                 differentials: Dict[int, SparseMatrix], window: Optional[Tuple[int, int]] = None):
        self.ring = ring
        self.name = name
        self.labels = {N: list(v) for N, v in labels.items()}
        self.differentials = dict(differentials)
        self.top = max(self.labels, default=-1)
        self.window = window if window is not None else (0, self.top - 1)

    def dim(self, N: int) -> int:
        return len(self.labels.get(N, ()))

    def dims(self) -> List[int]:
        return [self.dim(N) for N in range(self.top + 1)]

    def differential(self, N: int) -> SparseMatrix:
        if N > self.top:
            raise WindowExceeded(f"{self.name}: degree {N} is beyond the assembled top degree {self.top}")
        d = self.differentials.get(N)
        if d is None:
            return SparseMatrix.zero(self.ring, self.dim(N - 1), self.dim(N))
        return d

    def square_zero_failures(self) -> List[int]:
        bad = []
        for N in range(2, self.top + 1):
            if not self.differential(N - 1).compose(self.differential(N)).is_zero():
                bad.append(N)
        return bad

    def check_square_zero(self) -> None:
        bad = self.square_zero_failures()
        if bad:
            raise NotADifferential(f"{self.name}: d o d is nonzero leaving degrees {bad}")

    def restrict(self, keep: Callable[[Any], bool], name: str) -> Tuple["ChainComplex", Dict[int, List[int]]]:
        """
        Subcomplex spanned by the basis elements whose label satisfies keep

        Returns:
            (subcomplex, positions) where positions[N] lists the kept indices of degree N
        """
        positions = {N: [i for i, lab in enumerate(labs) if keep(lab)] for N, labs in self.labels.items()}
        labels = {N: [self.labels[N][i] for i in idx] for N, idx in positions.items()}
        diffs = {}
        for N in range(self.top + 1):
            rows = positions.get(N - 1, [])
            diffs[N] = self.differential(N).submatrix(rows, positions[N])
        return ChainComplex(self.ring, name, labels, diffs, self.window), positions

    def euler_characteristic(self, lo: int, hi: int) -> int:
        return sum((-1) ** N * self.dim(N) for N in range(lo, hi + 1))

    def to_matrix_market(self) -> str:
        """Plain-text dump: one header per degree followed by 1-based entry triples"""
        out = [f"% complex {self.name} over {self.ring.label} window {self.window[0]}..{self.window[1]}"]
        for N in range(self.top + 1):
            d = self.differential(N)
            out.append(f"% degree {N}")
            out.append(f"{d.rows} {d.cols} {d.nnz}")
            for r, row in sorted(d.row_items()):
                for c, v in sorted(row.items()):
                    out.append(f"{r + 1} {c + 1} {v}")
        return "\n".join(out) + "\n"

    def __repr__(self):
        return f"ChainComplex({self.name}, dims={self.dims()})"


class ChainMap:
    """Family of matrices from source degree N to target degree N + shift"""

    def __init__(self, name: str, source: ChainComplex, target: ChainComplex, shift: int,
                 matrices: Dict[int, SparseMatrix]):
        self.name = name
        self.source = source
        self.target = target
        self.shift = shift
        self.matrices = dict(matrices)

    def matrix(self, N: int) -> SparseMatrix:
        m = self.matrices.get(N)
        if m is None:
            return SparseMatrix.zero(self.source.ring, self.target.dim(N + self.shift), self.source.dim(N))
        return m

    def apply(self, N: int, vector: Dict[int, Any]) -> Dict[int, Any]:
        return self.matrix(N).apply(vector)

    def failures(self, degrees: Iterable[int]) -> List[int]:
        """Degrees N where d o f differs from f o d on source degree N"""
        bad = []
        for N in degrees:
            lhs = self.target.differential(N + self.shift).compose(self.matrix(N))
            rhs = self.matrix(N - 1).compose(self.source.differential(N))
            if lhs != rhs:
                bad.append(N)
        return bad


def coordinate_map(source: ChainComplex, target: ChainComplex, shift: int, name: str,
                   relabel: Callable[[Any], Optional[Any]], degrees: Iterable[int]) -> ChainMap:
    """Chain map sending each source basis element to the target basis element relabel(label), or to 0"""
    matrices = {}
    ring = source.ring
    for N in degrees:
        tindex = {lab: i for i, lab in enumerate(target.labels.get(N + shift, ()))}
        data = {}
        for j, lab in enumerate(source.labels.get(N, ())):
            new = relabel(lab)
            if new is not None:
                data.setdefault(tindex[new], {})[j] = ring.one()
        matrices[N] = SparseMatrix(ring, target.dim(N + shift), source.dim(N), data, trusted=True)
    return ChainMap(name, source, target, shift, matrices)


class BarredModule:
    """The totalization X-bar_N = sum over k of X_{k, N-k} of a bigraded module"""

    def __init__(self, module: BigradedModule, top: Optional[int] = None):
        self.module = module
        self.ring = module.ring
        self.top = module.max_n if top is None else top
        self._layout: Dict[int, Dict[Tuple[int, int], int]] = {}
        self._labels: Dict[int, List[Tuple[int, str]]] = {}
        for N in range(self.top + 1):
            offset = 0
            layout = {}
            labels = []
            for k in range(N + 1):
                dim = module.dim(k, N - k)
                if dim:
                    layout[(k, N - k)] = offset
                    labels.extend((k, "|".join(lab)) for lab in module.basis(k, N - k))
                    offset += dim
            self._layout[N] = layout
            self._labels[N] = labels

    def dim(self, N: int) -> int:
        return len(self._labels.get(N, ()))

    def labels(self, N: int) -> List[Tuple[int, str]]:
        return self._labels.get(N, [])

    def summands(self, N: int) -> Dict[Tuple[int, int], int]:
        return self._layout.get(N, {})

    def assemble(self, maps: Iterable[SignedMap], N: int, shift: int) -> SparseMatrix:
        """
        Sum of signed maps as one matrix from X-bar_N to X-bar_{N+shift}

        Args:
            maps: signed maps whose total degree dn + dm equals shift
            N: source total degree
            shift: total degree change
        """
        target_layout = self._layout.get(N + shift, {})
        data: Dict[int, Dict[int, Any]] = {}
        ring = self.ring
        for f in maps:
            dn, dm = f.bidegree
            if dn + dm != shift:
                raise ValueError(f"Map of bidegree {f.bidegree} does not shift total degree by {shift}")
            for (k, m), col_off in self._layout.get(N, {}).items():
                block = f.blocks.get((k, m))
                if block is None:
                    continue
                row_off = target_layout.get((k + dn, m + dm))
                if row_off is None:
                    continue
                for r, row in block.row_items():
                    acc = data.setdefault(row_off + r, {})
                    for c, v in row.items():
                        s = ring.reduce(acc.get(col_off + c, 0) + v)
                        if s == 0:
                            acc.pop(col_off + c, None)
                        else:
                            acc[col_off + c] = s
        return SparseMatrix(ring, self.dim(N + shift), self.dim(N), data, trusted=True)

    def complex(self, maps: Sequence[SignedMap], name: str) -> ChainComplex:
        labels = {N: self.labels(N) for N in range(self.top + 1)}
        diffs = {N: self.assemble(maps, N, -1) for N in range(self.top + 1)}
        return ChainComplex(self.ring, name, labels, diffs)
