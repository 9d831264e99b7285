"""Exact linear algebra over Q, F_p and Z.

Matrices are sparse triplet maps with exact scalars: ``Fraction`` for Q,
residues ``0 <= a < p`` for F_p and plain ``int`` for Z.  Everything here is
desk scale; no attempt is made at asymptotically clever elimination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import heapq
from typing import Iterable, Iterator, Mapping, Sequence, Union


class LinalgError(ValueError):
    """Raised on ring mismatches, malformed input and bad shapes."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class CoeffField:
    """Q when ``characteristic == 0``, otherwise the prime field F_p."""

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not is_prime(p):
            raise LinalgError(f"characteristic {p} is neither 0 nor prime")
        if p >= 2**31:
            raise LinalgError("prime fields are limited to p < 2**31")

    @property
    def name(self) -> str:
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"

    def __str__(self):
        return self.name

    @property
    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def __call__(self, value) -> Union[Fraction, int]:
        """Coerce an int, ``Fraction`` or ``"a/b"`` string into the field."""
        if isinstance(value, str):
            value = Fraction(value)
        p = self.characteristic
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise LinalgError(f"{value} has no image in F_{p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def inv(self, a):
        if self.characteristic == 0:
            return 1 / a
        return pow(a, -1, self.characteristic)

    def divides(self, q: int) -> bool:
        """Whether the characteristic divides ``q`` (0 divides only 0)."""
        p = self.characteristic
        return q == 0 if p == 0 else q % p == 0


class IntegerRing:
    """Tag for matrices over Z."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    name = "Z"

    def __repr__(self):
        return "ZZ"

    __str__ = __repr__

    def __call__(self, value) -> int:
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise LinalgError(f"{value} is not an integer")
            return int(value.numerator)
        if int(value) != value:
            raise LinalgError(f"{value} is not an integer")
        return int(value)

    zero = 0
    one = 1

    def __reduce__(self):
        return (IntegerRing, ())


ZZ = IntegerRing()
QQ = CoeffField(0)

Ring = Union[CoeffField, IntegerRing]


def _reduce_scalar(ring: Ring, value):
    if isinstance(ring, IntegerRing):
        return ring(value)
    return ring(value)


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    """Sparse ``rows x cols`` matrix with exact entries over ``ring``.

    ``entries`` never stores zeros.  Instances are treated as immutable.
    """

    rows: int
    cols: int
    ring: Ring
    entries: Mapping[tuple[int, int], object] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise LinalgError("negative shape")
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise LinalgError(f"entry ({i}, {j}) out of bounds for {self.shape}")
            if v == 0:
                raise LinalgError(f"explicit zero stored at ({i}, {j})")

    # construction -----------------------------------------------------

    @classmethod
    def from_triplets(cls, rows: int, cols: int, ring: Ring,
                      triplets: Iterable[tuple[int, int, object]]) -> "ExactMatrix":
        """Build from ``(i, j, value)``; duplicates are summed."""
        acc: dict[tuple[int, int], object] = {}
        for i, j, v in triplets:
            v = _reduce_scalar(ring, v)
            acc[(i, j)] = acc.get((i, j), ring.zero) + v
        if isinstance(ring, CoeffField) and ring.characteristic:
            p = ring.characteristic
            acc = {k: v % p for k, v in acc.items()}
        return cls(rows, cols, ring, {k: v for k, v in acc.items() if v != 0})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: Ring, cols: int | None = None) -> "ExactMatrix":
        nrows = len(rows)
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        trip = []
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise LinalgError("ragged rows")
            trip.extend((i, j, v) for j, v in enumerate(row) if v != 0)
        return cls.from_triplets(nrows, ncols, ring, trip)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: Ring) -> "ExactMatrix":
        return cls(rows, cols, ring, {})

    @classmethod
    def identity(cls, n: int, ring: Ring) -> "ExactMatrix":
        return cls(n, n, ring, {(i, i): ring.one for i in range(n)})

    # basic access -----------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        return self.entries.get(ij, self.ring.zero)

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_rows(self) -> list[list]:
        out = [[self.ring.zero] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> list[dict[int, object]]:
        out: list[dict[int, object]] = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def col_dicts(self) -> list[dict[int, object]]:
        out: list[dict[int, object]] = [{} for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.cols, self.rows, self.ring,
                           {(j, i): v for (i, j), v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.shape == other.shape and _same_ring(self.ring, other.ring)
                and dict(self.entries) == dict(other.entries))

    def __hash__(self):
        return hash((self.rows, self.cols, str(self.ring), frozenset(self.entries.items())))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols} over {self.ring}, nnz={self.nnz()})"

    # arithmetic -------------------------------------------------------

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
        if not _same_ring(self.ring, other.ring):
            raise LinalgError("ring mismatch in product")
        right = other.row_dicts()
        acc: dict[tuple[int, int], object] = {}
        for (i, k), a in self.entries.items():
            for j, b in right[k].items():
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return _clean(self.rows, other.cols, self.ring, acc)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in sum")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc.get(k, 0) + v
        return _clean(self.rows, self.cols, self.ring, acc)

    def __neg__(self) -> "ExactMatrix":
        return _clean(self.rows, self.cols, self.ring, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def apply(self, vec: Mapping[int, object]) -> dict[int, object]:
        """Sparse matrix-vector product."""
        cols = self.col_dicts()
        acc: dict[int, object] = {}
        for j, x in vec.items():
            for i, a in cols[j].items():
                acc[i] = acc.get(i, 0) + a * x
        p = getattr(self.ring, "characteristic", 0)
        if p:
            acc = {i: v % p for i, v in acc.items()}
        return {i: v for i, v in acc.items() if v != 0}

    def over(self, field: CoeffField) -> "ExactMatrix":
        """Reduce an integer (or rational) matrix into ``field``."""
        return ExactMatrix.from_triplets(self.rows, self.cols, field,
                                         ((i, j, v) for (i, j), v in self.entries.items()))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        rmap = {r: a for a, r in enumerate(rows)}
        cmap = {c: b for b, c in enumerate(cols)}
        return ExactMatrix(len(rows), len(cols), self.ring,
                           {(rmap[i], cmap[j]): v for (i, j), v in self.entries.items()
                            if i in rmap and j in cmap})


def _same_ring(a: Ring, b: Ring) -> bool:
    if isinstance(a, IntegerRing) or isinstance(b, IntegerRing):
        return isinstance(a, IntegerRing) and isinstance(b, IntegerRing)
    return a == b


def _clean(rows, cols, ring, acc) -> ExactMatrix:
    p = getattr(ring, "characteristic", 0)
    if p:
        acc = {k: v % p for k, v in acc.items()}
    return ExactMatrix(rows, cols, ring, {k: v for k, v in acc.items() if v != 0})


def _require_field(m: ExactMatrix) -> CoeffField:
    if not isinstance(m.ring, CoeffField):
        raise LinalgError("field operation on an integer matrix; use smith_normal_form")
    return m.ring


# elimination over a field ---------------------------------------------------

class Echelon:
    """Incremental row echelon basis of a subspace of K^n.

    Vectors are sparse ``{index: value}`` dicts.  ``add`` reduces against the
    stored pivots and keeps the vector if it is independent.
    """

    def __init__(self, field: CoeffField):
        self.field = field
        self.pivots: dict[int, dict[int, object]] = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec: Mapping[int, object]) -> dict[int, object]:
        p = self.field.characteristic
        row = {k: v for k, v in vec.items() if v != 0}
        heap = list(row)
        heapq.heapify(heap)
        out: dict[int, object] = {}
        # leading-term reduction; columns of ``out`` never reappear.
        while heap:
            c = heapq.heappop(heap)
            a = row.pop(c, 0)
            if a == 0:
                continue
            piv = self.pivots.get(c)
            if piv is None:
                out[c] = a
                continue
            for k, v in piv.items():
                if k == c:
                    continue
                old = row.get(k, 0)
                nv = old - a * v
                if p:
                    nv %= p
                if nv == 0:
                    row.pop(k, None)
                else:
                    if not old:
                        heapq.heappush(heap, k)
                    row[k] = nv
        return out

    def add(self, vec: Mapping[int, object]) -> bool:
        r = self.reduce(vec)
        if not r:
            return False
        c = min(r)
        inv = self.field.inv(r[c])
        p = self.field.characteristic
        if p:
            r = {k: v * inv % p for k, v in r.items()}
        else:
            r = {k: v * inv for k, v in r.items()}
        self.pivots[c] = r
        return True

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)


def rank(m: ExactMatrix) -> int:
    """Rank of a matrix over Q or F_p."""
    field = _require_field(m)
    rows = m.row_dicts() if m.rows <= m.cols else m.col_dicts()
    ech = Echelon(field)
    for r in rows:
        if r:
            ech.add(r)
    return len(ech)


def rank_of_vectors(field: CoeffField, vectors: Iterable[Mapping[int, object]]) -> int:
    ech = Echelon(field)
    for v in vectors:
        ech.add(v)
    return len(ech)


def solve_kernel(m: ExactMatrix) -> list[dict[int, object]]:
    """Basis of the null space ``{v : m v = 0}`` as sparse vectors.

    The basis is the standard one attached to the reduced row echelon form:
    one vector per free column, with a 1 in that column.
    """
    field = _require_field(m)
    p = field.characteristic
    ech = Echelon(field)
    for r in m.row_dicts():
        if r:
            ech.add(r)
    # back-substitute to reduced form
    piv_cols = sorted(ech.pivots)
    reduced: dict[int, dict[int, object]] = {}
    for c in reversed(piv_cols):
        row = dict(ech.pivots[c])
        for k in [k for k in row if k != c and k in reduced]:
            a = row.pop(k)
            for kk, vv in reduced[k].items():
                if kk == k:
                    continue
                nv = row.get(kk, 0) - a * vv
                if p:
                    nv %= p
                if nv == 0:
                    row.pop(kk, None)
                else:
                    row[kk] = nv
        reduced[c] = row
    pivset = set(piv_cols)
    basis = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v: dict[int, object] = {f: field.one}
        for c, row in reduced.items():
            a = row.get(f)
            if a:
                v[c] = (-a) % p if p else -a
        basis.append(v)
    return basis


# Smith normal form ----------------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix
    divisors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.divisors)


def smith_normal_form(m: ExactMatrix) -> SmithDecomposition:
    """Smith normal form over Z, pivoting on the entry of least absolute value."""
    if not isinstance(m.ring, IntegerRing):
        raise LinalgError("smith_normal_form needs an integer matrix")
    r, c = m.shape
    A = m.to_rows()
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, r) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, c) if A[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if A[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1

    divisors = tuple(A[i][i] for i in range(min(r, c)) if A[i][i])
    return SmithDecomposition(
        U=ExactMatrix.from_rows(U, ZZ, cols=r),
        D=ExactMatrix.from_rows(A, ZZ, cols=c),
        V=ExactMatrix.from_rows(V, ZZ, cols=c),
        divisors=divisors,
    )


def integer_determinant(m: ExactMatrix) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    if m.rows != m.cols:
        raise LinalgError("determinant of a non-square matrix")
    n = m.rows
    A = [[int(x) for x in row] for row in m.to_rows()]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


# text format ----------------------------------------------------------------

def ring_token(ring: Ring) -> str:
    return ring.name


def parse_ring(token: str) -> Ring:
    if token == "Z":
        return ZZ
    if token == "Q":
        return QQ
    if token.startswith("F") and token[1:].isdigit():
        return CoeffField(int(token[1:]))
    raise LinalgError(f"unknown ring token {token!r}")


def _format_scalar(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(int(v))


def format_matrix(m: ExactMatrix) -> str:
    """``rows cols ring`` header, then ``i j value`` lines in row-major order."""
    lines = [f"{m.rows} {m.cols} {ring_token(m.ring)}"]
    for (i, j) in sorted(m.entries):
        lines.append(f"{i} {j} {_format_scalar(m.entries[(i, j)])}")
    return "\n".join(lines) + "\n"


def parse_matrix(text: str | Iterable[str]) -> ExactMatrix:
    lines = text.splitlines() if isinstance(text, str) else list(text)
    body = [(n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(lines, 1)]
    body = [(n, ln) for n, ln in body if ln]
    if not body:
        raise LinalgError("empty matrix text")
    n0, header = body[0]
    parts = header.split()
    if len(parts) != 3:
        raise LinalgError(f"line {n0}: expected 'rows cols ring'")
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise LinalgError(f"line {n0}: bad shape") from exc
    ring = parse_ring(parts[2])
    trip = []
    for n, ln in body[1:]:
        f = ln.split()
        if len(f) != 3:
            raise LinalgError(f"line {n}: expected 'i j value'")
        try:
            i, j, v = int(f[0]), int(f[1]), Fraction(f[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise LinalgError(f"line {n}: bad entry {ln!r}") from exc
        if not (0 <= i < rows and 0 <= j < cols):
            raise LinalgError(f"line {n}: index out of bounds")
        trip.append((i, j, v))
    try:
        return ExactMatrix.from_triplets(rows, cols, ring, trip)
    except LinalgError as exc:
        raise LinalgError(f"matrix body: {exc}") from exc


def iter_nonzero(vec: Mapping[int, object]) -> Iterator[tuple[int, object]]:
    return ((k, v) for k, v in sorted(vec.items()) if v != 0)
