"""
Exact sparse linear algebra over Q, Z and Z/p
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np
from sympy import isprime

from .errors import NotAField, NotIntegerRing, RingMismatch, SemanticError, ShapeMismatch

logger = logging.getLogger(__name__)

Vector = Dict[int, Any]


@dataclass(frozen=True)
class RingSpec:
    """Coefficient ring: rationals ("Q"), integers ("Z") or a prime field ("Fp")"""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Q", "Z", "Fp"):
            raise ValueError(f"Unknown ring kind: {self.kind}")
        if self.kind == "Fp" and not isprime(self.p):
            raise SemanticError(f"Modulus {self.p} is not prime")
        if self.kind != "Fp" and self.p != 0:
            raise ValueError(f"Ring {self.kind} takes no modulus")

    @classmethod
    def rationals(cls) -> "RingSpec":
        return cls("Q")

    @classmethod
    def integers(cls) -> "RingSpec":
        return cls("Z")

    @classmethod
    def prime_field(cls, p: int) -> "RingSpec":
        return cls("Fp", p)

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        """
        Parse a ring selector

        Args:
            text: "Q", "Z" or "Fp:<p>"

        Returns:
            The matching RingSpec
        """
        text = text.strip()
        if text in ("Q", "Z"):
            return cls(text)
        if text.startswith("Fp:"):
            try:
                p = int(text[3:])
            except ValueError:
                raise SemanticError(f"Bad modulus in ring selector '{text}'")
            return cls.prime_field(p)
        raise SemanticError(f"Unknown ring selector '{text}'")

    @property
    def label(self) -> str:
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def coerce(self, value: Any):
        """Convert an int, Fraction or numeric string into the canonical representation"""
        if isinstance(value, Scalar):
            if value.ring != self:
                raise RingMismatch(f"Scalar over {value.ring.label} used in {self.label}")
            return value.value
        q = Fraction(value)
        if self.kind == "Q":
            return q
        if self.kind == "Z":
            if q.denominator != 1:
                raise SemanticError(f"Non-integral coefficient {q} over Z")
            return int(q.numerator)
        if q.denominator % self.p == 0:
            raise SemanticError(f"Coefficient {q} is undefined modulo {self.p}")
        return (q.numerator * pow(q.denominator, -1, self.p)) % self.p

    def reduce(self, value):
        return value % self.p if self.kind == "Fp" else value

    def inv(self, value):
        if self.kind == "Z":
            raise NotAField("Division is not available over Z")
        if self.kind == "Fp":
            return pow(value, -1, self.p)
        return 1 / value


@dataclass(frozen=True)
class Scalar:
    """An exact ring element"""

    ring: RingSpec
    value: Any

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.coerce(self.value))

    def _other(self, other) -> Any:
        if isinstance(other, Scalar):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring.label} vs {other.ring.label}")
            return other.value
        return self.ring.coerce(other)

    def __add__(self, other):
        return Scalar(self.ring, self.ring.reduce(self.value + self._other(other)))

    def __sub__(self, other):
        return Scalar(self.ring, self.ring.reduce(self.value - self._other(other)))

    def __mul__(self, other):
        return Scalar(self.ring, self.ring.reduce(self.value * self._other(other)))

    def __neg__(self):
        return Scalar(self.ring, self.ring.reduce(-self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self):
        return str(self.value)


def _axpy(y: Vector, a, x: Mapping[int, Any], ring: RingSpec) -> None:
    """In place y += a*x, dropping cancelled entries"""
    for k, v in x.items():
        s = ring.reduce(y.get(k, 0) + a * v)
        if s == 0:
            y.pop(k, None)
        else:
            y[k] = s


class SparseMatrix:
    """Sparse matrix stored as a dict of nonzero rows"""

    def __init__(self, ring: RingSpec, rows: int, cols: int,
                 data: Optional[Mapping[int, Mapping[int, Any]]] = None, trusted: bool = False):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        if trusted:
            self._data = {r: row for r, row in (data or {}).items() if row}
            return
        self._data: Dict[int, Dict[int, Any]] = {}
        for r, row in (data or {}).items():
            if not 0 <= r < rows:
                raise ShapeMismatch(f"Row {r} outside a {rows}x{cols} matrix")
            clean = {}
            for c, v in row.items():
                if not 0 <= c < cols:
                    raise ShapeMismatch(f"Column {c} outside a {rows}x{cols} matrix")
                v = ring.coerce(v)
                if v != 0:
                    clean[c] = v
            if clean:
                self._data[r] = clean

    @classmethod
    def zero(cls, ring: RingSpec, rows: int, cols: int) -> "SparseMatrix":
        return cls(ring, rows, cols, trusted=True)

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "SparseMatrix":
        return cls(ring, n, n, {i: {i: ring.one()} for i in range(n)}, trusted=True)

    @classmethod
    def from_entries(cls, ring: RingSpec, rows: int, cols: int,
                     entries: Mapping[Tuple[int, int], Any]) -> "SparseMatrix":
        data: Dict[int, Dict[int, Any]] = {}
        for (r, c), v in entries.items():
            data.setdefault(r, {})[c] = v
        return cls(ring, rows, cols, data)

    @classmethod
    def from_dense(cls, ring: RingSpec, dense: Iterable[Iterable[Any]]) -> "SparseMatrix":
        dense = [list(row) for row in dense]
        cols = len(dense[0]) if dense else 0
        return cls(ring, len(dense), cols, {r: dict(enumerate(row)) for r, row in enumerate(dense)})

    @classmethod
    def from_columns(cls, ring: RingSpec, rows: int, columns: List[Mapping[int, Any]]) -> "SparseMatrix":
        data: Dict[int, Dict[int, Any]] = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                data.setdefault(r, {})[c] = v
        return cls(ring, rows, len(columns), data, trusted=True)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> Dict[Tuple[int, int], Scalar]:
        return {(r, c): Scalar(self.ring, v) for r, row in self._data.items() for c, v in row.items()}

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._data.values())

    def row(self, r: int) -> Mapping[int, Any]:
        return self._data.get(r, {})

    def row_items(self):
        return self._data.items()

    def is_zero(self) -> bool:
        return not self._data

    def _check_ring(self, other: "SparseMatrix") -> None:
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring.label} vs {other.ring.label}")

    def compose(self, other: "SparseMatrix") -> "SparseMatrix":
        """Matrix product self * other (apply other first)"""
        self._check_ring(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"Cannot compose {self.shape} with {other.shape}")
        ring = self.ring
        out: Dict[int, Dict[int, Any]] = {}
        for r, row in self._data.items():
            acc: Dict[int, Any] = {}
            for k, a in row.items():
                orow = other._data.get(k)
                if orow:
                    _axpy(acc, a, orow, ring)
            if acc:
                out[r] = acc
        return SparseMatrix(ring, self.rows, other.cols, out, trusted=True)

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_ring(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"Cannot add {self.shape} and {other.shape}")
        out = {r: dict(row) for r, row in self._data.items()}
        for r, row in other._data.items():
            acc = out.setdefault(r, {})
            _axpy(acc, 1, row, self.ring)
        return SparseMatrix(self.ring, self.rows, self.cols, out, trusted=True)

    def scale(self, c: Any) -> "SparseMatrix":
        c = self.ring.coerce(c)
        if c == 0:
            return SparseMatrix.zero(self.ring, self.rows, self.cols)
        ring = self.ring
        out = {r: {k: ring.reduce(c * v) for k, v in row.items()} for r, row in self._data.items()}
        return SparseMatrix(ring, self.rows, self.cols, out, trusted=True)

    def transpose(self) -> "SparseMatrix":
        out: Dict[int, Dict[int, Any]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                out.setdefault(c, {})[r] = v
        return SparseMatrix(self.ring, self.cols, self.rows, out, trusted=True)

    def apply(self, vector: Mapping[int, Any]) -> Vector:
        """Multiply a sparse column vector"""
        ring = self.ring
        out: Vector = {}
        for r, row in self._data.items():
            s = 0
            for c, v in row.items():
                x = vector.get(c)
                if x:
                    s += v * x
            s = ring.reduce(s)
            if s != 0:
                out[r] = s
        return out

    def columns(self) -> List[Vector]:
        cols: List[Vector] = [{} for _ in range(self.cols)]
        for r, row in self._data.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def submatrix(self, row_index: List[int], col_index: List[int]) -> "SparseMatrix":
        rpos = {r: i for i, r in enumerate(row_index)}
        cpos = {c: j for j, c in enumerate(col_index)}
        out: Dict[int, Dict[int, Any]] = {}
        for r, row in self._data.items():
            i = rpos.get(r)
            if i is None:
                continue
            sub = {cpos[c]: v for c, v in row.items() if c in cpos}
            if sub:
                out[i] = sub
        return SparseMatrix(self.ring, len(row_index), len(col_index), out, trusted=True)

    def to_dense(self) -> List[List[Any]]:
        dense = [[self.ring.zero()] * self.cols for _ in range(self.rows)]
        for r, row in self._data.items():
            for c, v in row.items():
                dense[r][c] = v
        return dense

    def to_numpy(self) -> np.ndarray:
        """Dense object-dtype copy; exact values are kept"""
        return np.array(self.to_dense(), dtype=object).reshape(self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.ring == other.ring and self.shape == other.shape and self._data == other._data

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1))

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other):
        return self.compose(other)

    def __repr__(self):
        return f"SparseMatrix({self.ring.label}, {self.rows}x{self.cols}, nnz={self.nnz})"


def compose(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return a.compose(b)


def add(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return a.add(b)


def scale(c: Any, a: SparseMatrix) -> SparseMatrix:
    return a.scale(c)


def equal(a: SparseMatrix, b: SparseMatrix) -> bool:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring.label} vs {b.ring.label}")
    if a.shape != b.shape:
        raise ShapeMismatch(f"Cannot compare {a.shape} with {b.shape}")
    return a == b


def _require_field(ring: RingSpec) -> None:
    if not ring.is_field:
        raise NotAField(f"Operation needs a field, got {ring.label}")


def _integral_row(row: Mapping[int, Fraction]) -> Dict[int, int]:
    """Scale a rational row to a primitive integer row"""
    den = 1
    for v in row.values():
        den = den * v.denominator // gcd(den, v.denominator)
    out = {c: int(v * den) for c, v in row.items()}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    return {c: v // g for c, v in out.items()}


def _rank_fraction_free(m: SparseMatrix) -> int:
    pivots: Dict[int, Dict[int, int]] = {}
    for _, row in m.row_items():
        v = _integral_row(row)
        while v:
            c = min(v)
            pr = pivots.get(c)
            if pr is None:
                pivots[c] = v
                break
            a, b = v[c], pr[c]
            merged: Dict[int, int] = {}
            for k in set(v) | set(pr):
                s = b * v.get(k, 0) - a * pr.get(k, 0)
                if s:
                    merged[k] = s
            g = 0
            for x in merged.values():
                g = gcd(g, x)
            v = {k: x // g for k, x in merged.items()} if g > 1 else merged
    return len(pivots)


def _rref(m: SparseMatrix) -> Dict[int, Vector]:
    """Fully reduced row echelon form over a field, keyed by pivot column"""
    ring = m.ring
    pivots: Dict[int, Vector] = {}
    for _, row in m.row_items():
        v = dict(row)
        for pc in [c for c in v if c in pivots]:
            if pc in v:
                _axpy(v, -v[pc], pivots[pc], ring)
        if not v:
            continue
        c = min(v)
        inv = ring.inv(v[c])
        v = {k: ring.reduce(x * inv) for k, x in v.items()}
        for prow in pivots.values():
            if c in prow:
                _axpy(prow, -prow[c], v, ring)
        pivots[c] = v
    return pivots


def rank(m: SparseMatrix) -> int:
    """
    Rank of a matrix over a field

    Args:
        m: matrix over Q or Z/p

    Returns:
        Dimension of the column space
    """
    _require_field(m.ring)
    if m.ring.kind == "Q":
        return _rank_fraction_free(m)
    return len(_rref(m))


def kernel_basis(m: SparseMatrix) -> List[Vector]:
    """
    Basis of the null space, one vector per free column in increasing order

    Args:
        m: matrix over a field

    Returns:
        Sparse column vectors spanning ker(m)
    """
    _require_field(m.ring)
    ring = m.ring
    pivots = _rref(m)
    basis = []
    for f in range(m.cols):
        if f in pivots:
            continue
        vec: Vector = {f: ring.one()}
        for c, prow in pivots.items():
            x = prow.get(f)
            if x:
                vec[c] = ring.reduce(-x)
        basis.append(vec)
    return basis


class Echelon:
    """Semi-echelon basis of a subspace with coordinate tags

    Each stored vector has a distinct pivot (its smallest column, normalized
    to 1) and is zero at the pivots stored before it. A tag records which
    combination of caller-supplied generators the stored vector equals.
    """

    def __init__(self, ring: RingSpec):
        _require_field(ring)
        self.ring = ring
        self._rows: List[Tuple[int, Vector, Vector]] = []

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> List[int]:
        return [p for p, _, _ in self._rows]

    @property
    def vectors(self) -> List[Vector]:
        return [row for _, row, _ in self._rows]

    def reduce(self, v: Mapping[int, Any]) -> Tuple[Vector, Vector]:
        """
        Reduce a vector against the stored basis

        Returns:
            (remainder, coordinates) with v = remainder + sum coordinates[j] * generator_j
        """
        ring = self.ring
        v = dict(v)
        coords: Vector = {}
        for p, row, tag in self._rows:
            c = v.get(p)
            if c:
                _axpy(v, -c, row, ring)
                _axpy(coords, c, tag, ring)
        return v, coords

    def insert(self, v: Mapping[int, Any], tag: Optional[Mapping[int, Any]] = None) -> bool:
        """Add v (equal to the generator combination tag); returns False when v is dependent"""
        ring = self.ring
        rem, coords = self.reduce(v)
        if not rem:
            return False
        new_tag: Vector = dict(tag or {})
        _axpy(new_tag, -1, coords, ring)
        p = min(rem)
        inv = ring.inv(rem[p])
        rem = {k: ring.reduce(x * inv) for k, x in rem.items()}
        new_tag = {k: ring.reduce(x * inv) for k, x in new_tag.items()}
        self._rows.append((p, rem, new_tag))
        return True


@dataclass(frozen=True)
class SmithResult:
    """Invariant factors of an integer matrix

    When transforms were requested, ``left * m * right`` is the diagonal
    matrix carrying the factors in order.
    """

    invariant_factors: Tuple[int, ...]
    rank: int
    left: Optional[SparseMatrix] = field(default=None, compare=False, repr=False)
    right: Optional[SparseMatrix] = field(default=None, compare=False, repr=False)

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


class _SmithWorkspace:
    """Mutable integer matrix with row and column indices for elementary operations"""

    def __init__(self, m: SparseMatrix, track: bool):
        self.rows: Dict[int, Dict[int, int]] = {r: dict(row) for r, row in m.row_items()}
        self.cols: Dict[int, set] = {}
        for r, row in self.rows.items():
            for c in row:
                self.cols.setdefault(c, set()).add(r)
        self.track = track
        self.left = {i: {i: 1} for i in range(m.rows)} if track else None
        self.right = {j: {j: 1} for j in range(m.cols)} if track else None

    def _set(self, r: int, c: int, v: int) -> None:
        if v:
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, set()).add(r)
        else:
            row = self.rows.get(r)
            if row is not None:
                row.pop(c, None)
                if not row:
                    del self.rows[r]
            s = self.cols.get(c)
            if s is not None:
                s.discard(r)
                if not s:
                    del self.cols[c]

    def row_axpy(self, i: int, q: int, r: int) -> None:
        """row_i += q * row_r"""
        for c, v in list(self.rows.get(r, {}).items()):
            self._set(i, c, self.rows.get(i, {}).get(c, 0) + q * v)
        if self.track:
            _int_axpy(self.left, i, q, r)

    def col_axpy(self, j: int, q: int, c: int) -> None:
        """col_j += q * col_c"""
        for r in list(self.cols.get(c, ())):
            v = self.rows[r][c]
            self._set(r, j, self.rows.get(r, {}).get(j, 0) + q * v)
        if self.track:
            _int_col_axpy(self.right, j, q, c)

    def min_entry(self, restrict_row: Optional[int] = None,
                  restrict_col: Optional[int] = None) -> Tuple[int, int]:
        best = None
        if restrict_row is None:
            candidates = ((r, c, v) for r, row in self.rows.items() for c, v in row.items())
        else:
            candidates = [(restrict_row, c, v) for c, v in self.rows.get(restrict_row, {}).items()]
            candidates += [(r, restrict_col, self.rows[r][restrict_col])
                           for r in self.cols.get(restrict_col, ())]
        for r, c, v in candidates:
            if best is None or abs(v) < best[2]:
                best = (r, c, abs(v))
                if best[2] == 1:
                    break
        return best[0], best[1]

    def drop(self, r: int, c: int) -> None:
        self._set(r, c, 0)


def _int_axpy(mat: Dict[int, Dict[int, int]], i: int, q: int, r: int) -> None:
    target = mat.setdefault(i, {})
    for c, v in list(mat.get(r, {}).items()):
        s = target.get(c, 0) + q * v
        if s:
            target[c] = s
        else:
            target.pop(c, None)


def _int_col_axpy(mat: Dict[int, Dict[int, int]], j: int, q: int, c: int) -> None:
    # mat is stored by rows; column op touches every row holding column c
    for row in mat.values():
        v = row.get(c)
        if v:
            s = row.get(j, 0) + q * v
            if s:
                row[j] = s
            else:
                row.pop(j, None)


def smith_normal_form(m: SparseMatrix, with_transforms: bool = False) -> SmithResult:
    """
    Smith normal form over Z by minimal-absolute-value pivoting

    Args:
        m: integer matrix
        with_transforms: also return unimodular left/right transforms

    Returns:
        SmithResult with the invariant factors d_1 | d_2 | ... | d_r
    """
    if m.ring.kind != "Z":
        raise NotIntegerRing(f"Smith normal form needs integer coefficients, got {m.ring.label}")
    ws = _SmithWorkspace(m, with_transforms)
    diagonal: List[Tuple[int, int, int]] = []
    while ws.rows:
        r, c = ws.min_entry()
        while True:
            p = ws.rows[r][c]
            changed = False
            for i in list(ws.cols.get(c, ())):
                if i == r:
                    continue
                ws.row_axpy(i, -(ws.rows[i][c] // p), r)
                if c in ws.rows.get(i, {}):
                    changed = True
            for j in list(ws.rows.get(r, {})):
                if j == c:
                    continue
                ws.col_axpy(j, -(ws.rows[r][j] // p), c)
                if j in ws.rows.get(r, {}):
                    changed = True
            if not changed:
                break
            r, c = ws.min_entry(restrict_row=r, restrict_col=c)
        diagonal.append((r, c, ws.rows[r][c]))
        ws.drop(r, c)

    values = [v for _, _, v in diagonal]
    left = right = None
    if with_transforms:
        left, right, values = _normalize_diagonal(m, ws, diagonal)
    else:
        values = _chain_factors([abs(v) for v in values])
    logger.debug(f"Smith normal form of {m.rows}x{m.cols}: rank {len(values)}")
    return SmithResult(tuple(values), len(values), left, right)


def _chain_factors(values: List[int]) -> List[int]:
    values = sorted(values)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            a, b = values[i], values[j]
            if b % a:
                g = gcd(a, b)
                values[i], values[j] = g, a * b // g
    return values


def _normalize_diagonal(m: SparseMatrix, ws: _SmithWorkspace,
                        diagonal: List[Tuple[int, int, int]]):
    """Permute pivots onto the diagonal, fix signs and enforce divisibility on the transforms"""
    ring = m.ring
    order = sorted(range(len(diagonal)), key=lambda i: abs(diagonal[i][2]))
    used_rows = [diagonal[i][0] for i in order]
    used_cols = [diagonal[i][1] for i in order]
    row_set, col_set = set(used_rows), set(used_cols)
    row_perm = used_rows + [r for r in range(m.rows) if r not in row_set]
    col_perm = used_cols + [c for c in range(m.cols) if c not in col_set]
    left = {new: dict(ws.left.get(old, {})) for new, old in enumerate(row_perm)}
    right: Dict[int, Dict[int, int]] = {}
    for r, row in ws.right.items():
        right[r] = {}
        for new, old in enumerate(col_perm):
            if old in row:
                right[r][new] = row[old]
    values = [diagonal[i][2] for i in order]
    for i, v in enumerate(values):
        if v < 0:
            left[i] = {c: -x for c, x in left[i].items()}
            values[i] = -v
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            a, b = values[i], values[j]
            if b % a == 0:
                continue
            g, s, t = _xgcd(a, b)
            # [[s, t], [-b/g, a/g]] diag(a, b) [[1, -t*b/g], [1, s*a/g]] = diag(g, a*b/g)
            li, lj = left[i], left[j]
            new_i: Dict[int, int] = {}
            new_j: Dict[int, int] = {}
            for c in set(li) | set(lj):
                x, y = li.get(c, 0), lj.get(c, 0)
                if s * x + t * y:
                    new_i[c] = s * x + t * y
                if (-b // g) * x + (a // g) * y:
                    new_j[c] = (-b // g) * x + (a // g) * y
            left[i], left[j] = new_i, new_j
            for row in right.values():
                x, y = row.get(i, 0), row.get(j, 0)
                ni = x + y
                nj = x * (-t * b // g) + y * (s * a // g)
                for k, val in ((i, ni), (j, nj)):
                    if val:
                        row[k] = val
                    else:
                        row.pop(k, None)
            values[i], values[j] = g, a * b // g
    return (SparseMatrix(ring, m.rows, m.rows, left),
            SparseMatrix(ring, m.cols, m.cols, right), values)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b)"""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0
