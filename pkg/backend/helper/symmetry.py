"""
Cyclic, reflexive and dihedral actions: the operators T, N, R and their relation checks
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

from .chain_complex import BarredModule, ChainComplex
from .errors import MissingReflection, StructureInvalid
from .exact_linalg import SparseMatrix
from .graded import BigradedModule, SignedMap, difference_nnz, map_add, map_compose, map_scale
from .reports import ValidationReport
from .simplicial import DInfinityModule, FaceFamily, face_tuples

logger = logging.getLogger(__name__)


def scale_per_degree(f: SignedMap, sign_of) -> SignedMap:
    """Multiply every block with source simplicial degree n by sign_of(n)"""
    return SignedMap(f.source, f.target, f.bidegree,
                     {(n, m): b.scale(sign_of(n)) for (n, m), b in f.blocks.items()})


@dataclass
class DihedralStructure:
    """Per-degree rotations t and reflections r; r is None for a purely cyclic structure"""

    underlying: BigradedModule
    t: Optional[SignedMap]
    r: Optional[SignedMap] = None

    def t_n(self, n: int) -> SignedMap:
        return self.t.restrict(n)

    def r_n(self, n: int) -> SignedMap:
        if self.r is None:
            raise MissingReflection("The structure carries no reflection")
        return self.r.restrict(n)

    def check(self, d: Optional[SignedMap] = None) -> None:
        """
        Assert t_n^{n+1} = 1, r_n^2 = 1, r_n t_n = t_n^{-1} r_n and compatibility with d

        Raises:
            StructureInvalid naming the first violated identity
        """
        module = self.underlying
        for n in sorted({n for n, _ in module.pieces}):
            identity = SignedMap.identity(module, only_n=n)
            if self.t is not None:
                t = self.t_n(n)
                power = identity
                for _ in range(n + 1):
                    power = map_compose(t, power)
                if power != identity:
                    raise StructureInvalid(f"t_{n}^{n + 1} != 1")
            if self.r is not None:
                r = self.r_n(n)
                if map_compose(r, r) != identity:
                    raise StructureInvalid(f"r_{n}^2 != 1")
                if self.t is not None:
                    rt = map_compose(r, self.t_n(n))
                    if map_compose(rt, rt) != identity:
                        raise StructureInvalid(f"r_{n} t_{n} != t_{n}^-1 r_{n}")
        if d is not None:
            for name, g in (("t", self.t), ("r", self.r)):
                if g is not None and map_compose(d, g) != map_compose(g, d):
                    raise StructureInvalid(f"d does not commute with {name}")


def _rotation_prefactor(n: int) -> int:
    return -1 if n % 2 else 1


def _reflection_prefactor(n: int) -> int:
    return -1 if (n * (n + 1) // 2) % 2 else 1


@dataclass
class SymmetryOperators:
    """T = (-1)^n t, N = 1 + T + ... + T^n, R = (-1)^{n(n+1)/2} r and RT = R o T"""

    underlying: BigradedModule
    T: SignedMap
    N: SignedMap
    R: Optional[SignedMap] = None
    RT: Optional[SignedMap] = None

    @property
    def one_minus_T(self) -> SignedMap:
        return map_add(SignedMap.identity(self.underlying), map_scale(-1, self.T))


def build_operators(ds: DihedralStructure) -> SymmetryOperators:
    """
    Materialize T, N and R per degree and assert (1 - T) N = N (1 - T) = 0

    Args:
        ds: dihedral (or cyclic) structure

    Returns:
        SymmetryOperators
    """
    module = ds.underlying
    T = scale_per_degree(ds.t, _rotation_prefactor)
    norm = SignedMap.zero(module, module, (0, 0))
    for n in sorted({n for n, _ in module.pieces}):
        identity = SignedMap.identity(module, only_n=n)
        T_n = T.restrict(n)
        acc = identity
        for _ in range(n):
            acc = map_add(identity, map_compose(T_n, acc))
        norm = map_add(norm, acc)
    one_minus_T = map_add(SignedMap.identity(module), map_scale(-1, T))
    if not map_compose(one_minus_T, norm).is_zero():
        raise StructureInvalid("(1 - T) N != 0")
    if not map_compose(norm, one_minus_T).is_zero():
        raise StructureInvalid("N (1 - T) != 0")
    R = RT = None
    if ds.r is not None:
        R = scale_per_degree(ds.r, _reflection_prefactor)
        RT = map_compose(R, T)
    logger.info(f"Built symmetry operators (reflection: {R is not None})")
    return SymmetryOperators(module, T, norm, R, RT)


def validate_df_relations(ff: FaceFamily, ds: DihedralStructure, rotations: bool = True,
                          reflections: bool = True) -> ValidationReport:
    """Faces against t and r, for every index tuple of every populated degree"""
    report = ValidationReport("faces vs symmetries")
    for n in range(1, ff.max_n + 1):
        for indices in face_tuples(n):
            k = len(indices)
            face = ff.face(n, indices)
            if rotations and ds.t is not None:
                lhs = map_compose(face, ds.t)
                if indices[0] > 0:
                    rhs = map_compose(ds.t, ff.face(n, tuple(i - 1 for i in indices)))
                else:
                    shifted = tuple(i - 1 for i in indices[1:]) + (n,)
                    rhs = map_scale((-1) ** (k - 1), ff.face(n, shifted))
                nnz = difference_nnz(lhs, rhs)
                report.check(nnz == 0, "face o t", f"n={n} {indices}", difference_nnz=nnz)
            if reflections and ds.r is not None:
                lhs = map_compose(face, ds.r)
                mirrored = tuple(n - i for i in reversed(indices))
                rhs = map_scale((-1) ** (k * (k - 1) // 2), map_compose(ds.r, ff.face(n, mirrored)))
                nnz = difference_nnz(lhs, rhs)
                report.check(nnz == 0, "face o r", f"n={n} {indices}", difference_nnz=nnz)
    report.log_summary()
    return report


def _per_degree(report: ValidationReport, relation: str, label: str, lhs: SignedMap, rhs: SignedMap,
                degrees) -> None:
    for n in degrees:
        nnz = difference_nnz(lhs.restrict(n), rhs.restrict(n))
        report.check(nnz == 0, relation, f"{label} n={n}", difference_nnz=nnz)


def validate_interchange(ops: SymmetryOperators, d0: DInfinityModule, d1: DInfinityModule) -> ValidationReport:
    """D-infinity differentials of levels 0 and 1 against 1 - T, N, R and RT"""
    report = ValidationReport("differentials vs symmetry operators")
    module = ops.underlying
    degrees = sorted({n for n, _ in module.pieces})
    one_minus_T = ops.one_minus_T
    top = max(len(d0.components), len(d1.components))
    for i in range(top):
        a, b = d0.component(i), d1.component(i)
        _per_degree(report, "d0^i (1-T) = (1-T) d1^i", f"i={i}",
                    map_compose(a, one_minus_T), map_compose(one_minus_T, b), degrees)
        _per_degree(report, "d1^i N = N d0^i", f"i={i}",
                    map_compose(b, ops.N), map_compose(ops.N, a), degrees)
        if ops.R is not None:
            _per_degree(report, "d0^i R = R d0^i", f"i={i}",
                        map_compose(a, ops.R), map_compose(ops.R, a), degrees)
            _per_degree(report, "d1^i RT = RT d1^i", f"i={i}",
                        map_compose(b, ops.RT), map_compose(ops.RT, b), degrees)
    if ops.R is not None:
        _per_degree(report, "(1-T) RT = -R (1-T)", "",
                    map_compose(one_minus_T, ops.RT), map_scale(-1, map_compose(ops.R, one_minus_T)), degrees)
        _per_degree(report, "N R = RT N", "", map_compose(ops.N, ops.R), map_compose(ops.RT, ops.N), degrees)
    report.log_summary()
    return report


class BarredOperators:
    """T, N, R and RT assembled blockwise on X-bar, cached per total degree"""

    def __init__(self, ops: SymmetryOperators, barred: BarredModule):
        self.ops = ops
        self.barred = barred
        self._cache: Dict[tuple, SparseMatrix] = {}

    def _get(self, name: str, N: int) -> SparseMatrix:
        key = (name, N)
        if key not in self._cache:
            if name == "1-T":
                identity = SparseMatrix.identity(self.barred.ring, self.barred.dim(N))
                self._cache[key] = identity - self.T(N)
            else:
                f = getattr(self.ops, name)
                if f is None:
                    raise MissingReflection("The structure carries no reflection")
                self._cache[key] = self.barred.assemble([f], N, 0)
        return self._cache[key]

    def T(self, N: int) -> SparseMatrix:
        return self._get("T", N)

    def norm(self, N: int) -> SparseMatrix:
        return self._get("N", N)

    def R(self, N: int) -> SparseMatrix:
        return self._get("R", N)

    def RT(self, N: int) -> SparseMatrix:
        return self._get("RT", N)

    def one_minus_T(self, N: int) -> SparseMatrix:
        return self._get("1-T", N)

    @property
    def has_reflection(self) -> bool:
        return self.ops.R is not None


def validate_barred(bops: BarredOperators, b: ChainComplex, bprime: ChainComplex) -> ValidationReport:
    """The operator identities on X-bar, degree by degree"""
    report = ValidationReport("barred operator identities")

    def same(relation: str, N: int, lhs: SparseMatrix, rhs: SparseMatrix) -> None:
        diff = lhs - rhs
        report.check(diff.is_zero(), relation, f"N={N}", difference_nnz=diff.nnz)

    for N in range(bops.barred.top + 1):
        omt, nrm = bops.one_minus_T(N), bops.norm(N)
        same("(1-T) N = 0", N, omt.compose(nrm), SparseMatrix.zero(b.ring, *omt.shape))
        same("N (1-T) = 0", N, nrm.compose(omt), SparseMatrix.zero(b.ring, *omt.shape))
        if N >= 1:
            same("b (1-T) = (1-T) b'", N, b.differential(N).compose(omt),
                 bops.one_minus_T(N - 1).compose(bprime.differential(N)))
            same("b' N = N b", N, bprime.differential(N).compose(nrm),
                 bops.norm(N - 1).compose(b.differential(N)))
        if not bops.has_reflection:
            continue
        R, RT = bops.R(N), bops.RT(N)
        same("(1-T) RT = -R (1-T)", N, omt.compose(RT), -R.compose(omt))
        same("N R = RT N", N, nrm.compose(R), RT.compose(nrm))
        if N >= 1:
            same("b R = R b", N, b.differential(N).compose(R), bops.R(N - 1).compose(b.differential(N)))
            same("b' RT = RT b'", N, bprime.differential(N).compose(RT),
                 bops.RT(N - 1).compose(bprime.differential(N)))
    report.log_summary()
    return report
