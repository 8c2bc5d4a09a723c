"""
Cyclic, dihedral, reflexive and acyclic multicomplexes over the barred tensor module, their
quotient complexes and the subcomplex P with the maps of its two short exact sequences
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .ainfinity import AInfAlgebraDesc, HuStructureDesc
from .chain_complex import BarredModule, ChainComplex, ChainMap, coordinate_map
from .errors import MissingHuStructure, MissingReflection, NotADifferential, StructureInvalid
from .exact_linalg import Echelon, SparseMatrix
from .simplicial import dq_differentials, totalize
from .symmetry import BarredOperators, build_operators
from .tensor_construction import TensorModuleBundle, build_faces, build_s_maps, build_tensor_module

logger = logging.getLogger(__name__)

Key = Tuple[int, ...]
Arrow = Tuple[Key, SparseMatrix]


class MultiComplex:
    """
    Multicomplex whose piece at (n, m[, l]) is X-bar_n

    arrows(key) lists the outgoing differentials as (target key, matrix); each lowers one axis by one.
    """

    def __init__(self, name: str, axes: int, barred: BarredModule, arrows: Callable[[Key], List[Arrow]]):
        if axes not in (2, 3):
            raise ValueError(f"Multicomplexes have 2 or 3 axes, got {axes}")
        self.name = name
        self.axes = axes
        self.barred = barred
        self.arrows = arrows
        self.logger = logger
        self._total: Optional[ChainComplex] = None

    def keys(self, N: int) -> List[Key]:
        if self.axes == 2:
            return [(n, N - n) for n in range(N + 1)]
        return [(n, m, N - n - m) for n in range(N + 1) for m in range(N - n + 1)]

    def dim(self, key: Key) -> int:
        return self.barred.dim(key[0])

    def _layout(self, N: int) -> Dict[Key, int]:
        layout, offset = {}, 0
        for key in self.keys(N):
            d = self.dim(key)
            if d:
                layout[key] = offset
                offset += d
        return layout

    def total(self) -> ChainComplex:
        """Tot, assembled once for every total degree up to the top of the barred module"""
        if self._total is not None:
            return self._total
        ring = self.barred.ring
        top = self.barred.top
        layouts = {N: self._layout(N) for N in range(top + 1)}
        labels = {N: [(key, lab) for key in layouts[N] for lab in self.barred.labels(key[0])]
                  for N in range(top + 1)}
        diffs = {}
        for N in range(1, top + 1):
            data: Dict[int, Dict[int, object]] = {}
            target = layouts[N - 1]
            for key, col_off in layouts[N].items():
                for tkey, mat in self.arrows(key):
                    row_off = target.get(tkey)
                    if row_off is None:
                        continue
                    for r, row in mat.row_items():
                        acc = data.setdefault(row_off + r, {})
                        for c, v in row.items():
                            s = ring.reduce(acc.get(col_off + c, 0) + v)
                            if s == 0:
                                acc.pop(col_off + c, None)
                            else:
                                acc[col_off + c] = s
            diffs[N] = SparseMatrix(ring, len(labels[N - 1]), len(labels[N]), data, trusted=True)
        complex_ = ChainComplex(ring, f"Tot({self.name})", labels, diffs)
        bad = complex_.square_zero_failures()
        if bad:
            raise NotADifferential(f"Tot({self.name}) fails d^2 = 0 leaving degrees {bad}")
        self.logger.info(f"Assembled Tot({self.name}): dims {complex_.dims()}")
        self._total = complex_
        return complex_


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


class ComplexSuite:
    """Every chain-level object built from one algebra at one truncation degree"""

    def __init__(self, a: AInfAlgebraDesc, n_max: int, h: Optional[HuStructureDesc] = None):
        self.algebra = a
        self.hu = h
        self.n_max = n_max
        self.logger = logger
        self.bundle: TensorModuleBundle = build_tensor_module(a, n_max)
        self.faces = build_faces(self.bundle)
        self.d0 = dq_differentials(self.faces, 0)
        self.d1 = dq_differentials(self.faces, 1)
        self.b = totalize(self.d0, self.bundle.barred, "b")
        self.bprime = totalize(self.d1, self.bundle.barred, "b'")
        self.operators = build_operators(self.bundle.structure)
        self.barred_ops = BarredOperators(self.operators, self.bundle.barred)
        self._cache: Dict[str, object] = {}

    @property
    def ring(self):
        return self.algebra.ring

    @property
    def rho(self) -> int:
        return self.algebra.rho

    def with_rho(self, rho: int) -> "ComplexSuite":
        return ComplexSuite(self.algebra.with_rho(rho), self.n_max, self.hu)

    def _identity(self, n: int) -> SparseMatrix:
        return SparseMatrix.identity(self.ring, self.bundle.barred.dim(n))

    def _require_reflection(self) -> None:
        if not self.barred_ops.has_reflection:
            raise MissingReflection("The algebra has no involution, so the tensor module has no reflection")

    def _cached(self, name: str, build: Callable[[], object]):
        if name not in self._cache:
            self._cache[name] = build()
        return self._cache[name]

    def _column(self, n: int, m: int) -> SparseMatrix:
        """delta_1 out of column m: b for m even, -b' for m odd"""
        return self.b.differential(n) if m % 2 == 0 else -self.bprime.differential(n)

    def _row(self, n: int, m: int) -> SparseMatrix:
        """delta_2 out of row m >= 1: 1 - T-bar for m odd, N-bar for m even"""
        return self.barred_ops.one_minus_T(n) if m % 2 else self.barred_ops.norm(n)

    def _cyclic_arrows(self, key: Key) -> List[Arrow]:
        n, m = key[0], key[1]
        rest = tuple(key[2:])
        out = []
        if n >= 1:
            out.append(((n - 1, m) + rest, self._column(n, m)))
        if m >= 1:
            out.append(((n, m - 1) + rest, self._row(n, m)))
        return out

    def dihedral_delta3(self, n: int, m: int, l: int) -> SparseMatrix:
        """delta_3 from l to l - 1 by the residue of m modulo 4"""
        ops = self.barred_ops
        one = self._identity(n)
        case = m % 4
        if case == 0:
            return (one + ops.R(n).scale(_sign(l))).scale(_sign(n))
        if case == 1:
            return (one + ops.RT(n).scale(_sign(l + 1))).scale(_sign(n + 1))
        if case == 2:
            return (one + ops.R(n).scale(_sign(l + 1))).scale(_sign(n))
        return (one + ops.RT(n).scale(_sign(l))).scale(_sign(n + 1))

    def _dihedral_arrows(self, key: Key) -> List[Arrow]:
        n, m, l = key
        out = self._cyclic_arrows(key)
        if l >= 1:
            out.append(((n, m, l - 1), self.dihedral_delta3(n, m, l)))
        return out

    def _reflexive_arrows(self, key: Key) -> List[Arrow]:
        n, m = key
        out = []
        if n >= 1:
            out.append(((n - 1, m), self.b.differential(n)))
        if m >= 1:
            row = self._identity(n) + self.barred_ops.R(n).scale(_sign(m))
            out.append(((n, m - 1), row.scale(_sign(n))))
        return out

    def _q_arrows(self, key: Key) -> List[Arrow]:
        n, m = key
        out = []
        if n >= 1:
            out.append(((n - 1, m), -self.bprime.differential(n)))
        if m >= 1:
            row = self._identity(n) + self.barred_ops.RT(n).scale(_sign(m + 1))
            out.append(((n, m - 1), row.scale(_sign(n + 1))))
        return out

    def cyclic(self) -> MultiComplex:
        return self._cached("C", lambda: build_cyclic_bicomplex(self))

    def dihedral(self) -> MultiComplex:
        return self._cached("D", lambda: build_dihedral_triple(self))

    def reflexive(self) -> MultiComplex:
        return self._cached("R", lambda: build_reflexive_bicomplex(self))

    def q_bicomplex(self) -> MultiComplex:
        return self._cached("Q", lambda: build_q_bicomplex(self))

    def s_maps(self):
        if self.hu is None:
            raise MissingHuStructure("The contracting homotopy needs homotopy-unit data")
        return self._cached("s", lambda: build_s_maps(self.bundle, self.hu))

    def quotients(self) -> Dict[str, ChainComplex]:
        """L, and M and N when a reflection is present"""
        return self._cached("quotients", lambda: build_quotient_complexes(self))

    def p_subcomplex(self) -> "PSubcomplex":
        return self._cached("P", lambda: build_p_subcomplex(self))


def quotient_complex(name: str, barred: BarredModule, b: ChainComplex,
                     generators: Callable[[int], List[SparseMatrix]]) -> ChainComplex:
    """
    (X-bar / image, induced b) where the image in degree n is spanned by the columns of generators(n)

    The quotient basis is the set of non-pivot coordinates of a semi-echelon basis of the image.

    Raises:
        NotAField, StructureInvalid when b does not preserve the image
    """
    ring = barred.ring
    top = barred.top
    echelons: Dict[int, Echelon] = {}
    free: Dict[int, List[int]] = {}
    for n in range(top + 1):
        ech = Echelon(ring)
        for mat in generators(n):
            for col in mat.columns():
                if col:
                    ech.insert(col)
        echelons[n] = ech
        pivots = set(ech.pivots)
        free[n] = [i for i in range(barred.dim(n)) if i not in pivots]
    labels = {n: [barred.labels(n)[i] for i in free[n]] for n in range(top + 1)}
    diffs = {}
    for n in range(1, top + 1):
        bn = b.differential(n)
        for row in echelons[n].vectors:
            rem, _ = echelons[n - 1].reduce(bn.apply(row))
            if rem:
                raise StructureInvalid(f"{name}: b does not preserve the image in degree {n}")
        position = {c: i for i, c in enumerate(free[n - 1])}
        columns = []
        for c in free[n]:
            rem, _ = echelons[n - 1].reduce(bn.apply({c: ring.one()}))
            columns.append({position[k]: v for k, v in rem.items()})
        diffs[n] = SparseMatrix.from_columns(ring, len(free[n - 1]), columns)
    complex_ = ChainComplex(ring, name, labels, diffs)
    complex_.check_square_zero()
    logger.info(f"Quotient complex {name}: dims {complex_.dims()}")
    return complex_


def build_quotient_complexes(suite: ComplexSuite) -> Dict[str, ChainComplex]:
    """L = X-bar / Im(1 - T-bar); M additionally divides by Im(1 - R-bar); N = X-bar / Im(1 - R-bar)"""
    ops = suite.barred_ops
    barred = suite.bundle.barred

    def one_minus_R(n: int) -> SparseMatrix:
        return SparseMatrix.identity(suite.ring, barred.dim(n)) - ops.R(n)

    out = {"L": quotient_complex("L", barred, suite.b, lambda n: [ops.one_minus_T(n)])}
    if ops.has_reflection:
        out["M"] = quotient_complex("M", barred, suite.b, lambda n: [ops.one_minus_T(n), one_minus_R(n)])
        out["N"] = quotient_complex("N", barred, suite.b, lambda n: [one_minus_R(n)])
    return out


@dataclass
class PSubcomplex:
    """P inside Tot(D) with the maps of 0 -> P -> Tot(D) -> Tot(D^-rho)[-2] -> 0 and 0 -> Tot(R) -> P -> Tot(Q)[-1] -> 0"""

    P: ChainComplex
    total_d: ChainComplex
    total_d_opposite: ChainComplex
    total_r: ChainComplex
    total_q: Optional[ChainComplex]
    j: ChainMap
    p: ChainMap
    alpha: ChainMap
    beta: Optional[ChainMap]
    total_d_flat: Optional[ChainComplex] = None

    def chain_map_failures(self) -> Dict[str, List[int]]:
        degrees = range(1, self.P.top + 1)
        out = {m.name: m.failures(degrees) for m in (self.j, self.p, self.alpha, self.beta) if m is not None}
        return {k: v for k, v in out.items() if v}

    def flat_dim(self, p: int, m: int) -> int:
        """Rank of D-tilde_{p, m}"""
        return sum(1 for lab in self.total_d_flat.labels.get(p + m, ()) if lab[0] == (p, m))

    def identification_failures(self) -> List[str]:
        """Degrees where Tot(D-tilde) differs from Tot(D) or an edge of D-tilde from Tot(R) or Tot(Q)"""
        flat = self.total_d_flat
        bad = []
        if flat.dims() != self.total_d.dims():
            bad.append(f"Tot(D-tilde) dims {flat.dims()} != Tot(D) dims {self.total_d.dims()}")
        for N in range(flat.top + 1):
            if self.flat_dim(N, 0) != self.total_r.dim(N):
                bad.append(f"D-tilde_({N}, 0) has rank {self.flat_dim(N, 0)}, Tot(R)_{N} {self.total_r.dim(N)}")
            if N >= 1 and self.total_q is not None and self.flat_dim(N - 1, 1) != self.total_q.dim(N - 1):
                bad.append(f"D-tilde_({N - 1}, 1) has rank {self.flat_dim(N - 1, 1)}, "
                           f"Tot(Q)_{N - 1} {self.total_q.dim(N - 1)}")
        return bad


def build_flattened_dihedral(total_d: ChainComplex) -> ChainComplex:
    """
    Tot(D-tilde), where D-tilde_{p, m} is the sum of D_{n, m, l} over n + l = p

    The differential is delta_1 + delta_3 along p and delta_2 along m, so the complex is Tot(D) with its
    basis regrouped by (p, m). Labels are ((p, m), (n, m, l), inner).

    Raises:
        NotADifferential when some entry of the regrouped differential leaves the two bidegrees (-1, 0), (0, -1)
    """
    order: Dict[int, List[int]] = {}
    labels = {}
    for N, labs in total_d.labels.items():
        idx = sorted(range(len(labs)), key=lambda i: (labs[i][0][1], i))
        order[N] = idx
        labels[N] = [((labs[i][0][0] + labs[i][0][2], labs[i][0][1]), labs[i][0], labs[i][1]) for i in idx]
    diffs = {}
    for N in range(1, total_d.top + 1):
        d = total_d.differential(N).submatrix(order[N - 1], order[N])
        for r, row in d.row_items():
            target = labels[N - 1][r][0]
            for c in row:
                p, m = labels[N][c][0]
                if target not in ((p - 1, m), (p, m - 1)):
                    raise NotADifferential(f"Tot(D-tilde): entry from {(p, m)} lands in {target}")
        diffs[N] = d
    flat = ChainComplex(total_d.ring, f"Tot(D-tilde) of {total_d.name}", labels, diffs, total_d.window)
    flat.check_square_zero()
    return flat


def build_p_subcomplex(suite: ComplexSuite) -> PSubcomplex:
    """
    P is the part of Tot(D) with m <= 1: the edge m = 0 is Tot(R), the edge m = 1 is Tot(Q) shifted by one

    The quotient Tot(D) / P is read as Tot(D^-rho) two degrees down through p; Tot(D-tilde) is built only to
    check its edges against Tot(R) and Tot(Q) rank by rank.

    Raises:
        StructureInvalid when any of j, p, alpha, beta fails to be a chain map or an edge rank disagrees
    """
    total_d = suite.dihedral().total()
    opposite = suite.with_rho(-suite.rho)
    total_d_opposite = opposite.dihedral().total()
    total_r = suite.reflexive().total()
    total_q = suite.q_bicomplex().total() if suite.hu is not None else None
    P, _ = total_d.restrict(lambda lab: lab[0][1] <= 1, "P")
    P.check_square_zero()
    degrees = range(0, total_d.top + 1)
    j = coordinate_map(P, total_d, 0, "j", lambda lab: lab, degrees)

    def project(lab):
        (n, m, l), inner = lab
        return ((n, m - 2, l), inner) if m >= 2 else None

    p = coordinate_map(total_d, total_d_opposite, -2, "p", project, degrees)
    alpha = coordinate_map(total_r, P, 0, "alpha", lambda lab: ((lab[0][0], 0, lab[0][1]), lab[1]), degrees)
    beta = None
    if total_q is not None:
        def edge(lab):
            (n, m, l), inner = lab
            return ((n, l), inner) if m == 1 else None

        beta = coordinate_map(P, total_q, -1, "beta", edge, degrees)
    data = PSubcomplex(P, total_d, total_d_opposite, total_r, total_q, j, p, alpha, beta,
                       total_d_flat=build_flattened_dihedral(total_d))
    bad = data.chain_map_failures()
    if bad:
        raise StructureInvalid(f"Maps of the short exact sequences are not chain maps: {bad}")
    mismatched = data.identification_failures()
    if mismatched:
        raise StructureInvalid(f"D-tilde does not match its edges: {mismatched}")
    logger.info(f"P subcomplex: dims {P.dims()}")
    return data


def build_cyclic_bicomplex(suite: ComplexSuite) -> MultiComplex:
    """C: columns alternate b and -b', rows alternate 1 - T-bar and N-bar"""
    return MultiComplex("C", 2, suite.bundle.barred, suite._cyclic_arrows)


def build_dihedral_triple(suite: ComplexSuite) -> MultiComplex:
    """
    D: the cyclic bicomplex in every layer l, joined by delta_3

    Raises:
        MissingReflection
    """
    suite._require_reflection()
    return MultiComplex(f"D(rho={suite.rho:+d})", 3, suite.bundle.barred, suite._dihedral_arrows)


def build_reflexive_bicomplex(suite: ComplexSuite) -> MultiComplex:
    suite._require_reflection()
    return MultiComplex(f"R(rho={suite.rho:+d})", 2, suite.bundle.barred, suite._reflexive_arrows)


def build_q_bicomplex(suite: ComplexSuite) -> MultiComplex:
    """
    Q: columns -b', rows built from 1 -/+ (RT)-bar; acyclic when s is a contracting homotopy

    Raises:
        MissingHuStructure, MissingReflection
    """
    if suite.hu is None:
        raise MissingHuStructure("The acyclic bicomplex needs homotopy-unit data")
    suite._require_reflection()
    return MultiComplex(f"Q(rho={suite.rho:+d})", 2, suite.bundle.barred, suite._q_arrows)
