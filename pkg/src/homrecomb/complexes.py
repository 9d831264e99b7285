"""Graded cochain complexes, their homology, and universal coefficients.

Convention: differentials raise degree by one, ``d^k : C^k -> C^{k+1}``,
stored as a matrix with ``dim C^{k+1}`` rows and ``dim C^k`` columns.
A Z/2-graded complex has exactly the two degrees 0 and 1, and
``d^1 : C^1 -> C^0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .linalg import (
    ZZ,
    CoeffField,
    ExactMatrix,
    LinalgError,
    format_matrix,
    parse_matrix,
    rank,
    smith_normal_form,
)


class ComplexError(ValueError):
    """d^2 != 0, shape mismatch, or a violated precondition."""

    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


class Grading(enum.Enum):
    Z = "Z"
    Z2 = "Z2"

    def norm(self, d: int) -> int:
        return d % 2 if self is Grading.Z2 else d


def _grading(kind) -> Grading:
    return kind if isinstance(kind, Grading) else Grading(kind)


@dataclass(frozen=True)
class GradedDims:
    """Finite graded dimension vector.

    ``shift(k)`` follows the usual suspension rule ``X[k]^d = X^{d+k}``, so
    ``H^{*-1}`` is ``H.shift(-1)``.
    """

    entries: tuple[tuple[int, int], ...] = ()
    kind: Grading = Grading.Z

    def __post_init__(self):
        kind = _grading(self.kind)
        object.__setattr__(self, "kind", kind)
        acc: dict[int, int] = {}
        for d, n in self.entries:
            if n < 0:
                raise ComplexError(f"negative dimension at degree {d}", d)
            d = kind.norm(d)
            acc[d] = acc.get(d, 0) + n
        object.__setattr__(self, "entries", tuple(sorted((d, n) for d, n in acc.items() if n)))

    @classmethod
    def of(cls, dims: Mapping[int, int] | None = None, kind="Z") -> "GradedDims":
        return cls(tuple((dims or {}).items()), _grading(kind))

    @classmethod
    def zero(cls, kind="Z") -> "GradedDims":
        return cls((), _grading(kind))

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)

    def __getitem__(self, d: int) -> int:
        d = self.kind.norm(d)
        for k, n in self.entries:
            if k == d:
                return n
        return 0

    @property
    def total(self) -> int:
        return sum(n for _, n in self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def _check(self, other: "GradedDims"):
        if self.kind is not other.kind:
            raise ComplexError("mixing Z and Z/2 gradings")

    def __add__(self, other: "GradedDims") -> "GradedDims":
        self._check(other)
        return GradedDims(self.entries + other.entries, self.kind)

    def scale(self, k: int) -> "GradedDims":
        return GradedDims(tuple((d, n * k) for d, n in self.entries), self.kind)

    def shift(self, k: int) -> "GradedDims":
        return GradedDims(tuple((d - k, n) for d, n in self.entries), self.kind)

    def dual(self) -> "GradedDims":
        return GradedDims(tuple((-d, n) for d, n in self.entries), self.kind)

    def tensor(self, other: "GradedDims") -> "GradedDims":
        self._check(other)
        return GradedDims(tuple((a + b, m * n) for a, m in self.entries for b, n in other.entries),
                          self.kind)

    def reduce_mod2(self) -> "GradedDims":
        return GradedDims(self.entries, Grading.Z2)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (d % 2) * n for d, n in self.entries)

    def __str__(self):
        body = ", ".join(f"{d}:{n}" for d, n in self.entries)
        return f"{{{body}}}" + ("/2" if self.kind is Grading.Z2 else "")


def _degrees(kind: Grading, dims: Mapping[int, int]) -> list[int]:
    if kind is Grading.Z2:
        return [0, 1]
    return sorted(dims)


@dataclass(frozen=True, eq=False)
class _Complex:
    grading: Grading
    dims: Mapping[int, int]
    differentials: Mapping[int, ExactMatrix]

    def dim(self, d: int) -> int:
        return self.dims.get(self.grading.norm(d), 0)

    def target_degree(self, d: int) -> int:
        return self.grading.norm(d + 1)

    def differential(self, d: int) -> ExactMatrix:
        d = self.grading.norm(d)
        mat = self.differentials.get(d)
        if mat is None:
            return ExactMatrix.zeros(self.dim(d + 1), self.dim(d), self._ring())
        return mat

    def degrees(self) -> list[int]:
        return _degrees(self.grading, self.dims)

    def _ring(self):
        raise NotImplementedError

    def _validate(self, check: bool):
        g = _grading(self.grading)
        object.__setattr__(self, "grading", g)
        if g is Grading.Z2 and set(self.dims) - {0, 1}:
            raise ComplexError("Z/2-graded complex must live in degrees 0 and 1")
        object.__setattr__(self, "dims", {k: v for k, v in self.dims.items()})
        for d, mat in self.differentials.items():
            if mat.shape != (self.dim(d + 1), self.dim(d)):
                raise ComplexError(
                    f"differential in degree {d} has shape {mat.shape}, "
                    f"expected {(self.dim(d + 1), self.dim(d))}", d)
        if check:
            self.check_square_zero()

    def check_square_zero(self):
        for d in self.degrees():
            first = self.differentials.get(d)
            second = self.differentials.get(self.grading.norm(d + 1))
            if first is None or second is None:
                continue
            if not (second @ first).is_zero():
                raise ComplexError(f"d^2 != 0 starting in degree {d}", d)


@dataclass(frozen=True, eq=False)
class FieldComplex(_Complex):
    """Finite cochain complex of vector spaces over ``field``."""

    field: CoeffField = field(default=CoeffField(0))
    check: bool = True

    def __post_init__(self):
        for d, mat in self.differentials.items():
            if mat.ring != self.field:
                raise ComplexError(f"differential in degree {d} is not over {self.field}", d)
        self._validate(self.check)

    def _ring(self):
        return self.field


@dataclass(frozen=True, eq=False)
class IntegralComplex(_Complex):
    """Finite cochain complex of free abelian groups."""

    check: bool = True

    def __post_init__(self):
        for d, mat in self.differentials.items():
            if mat.ring is not ZZ:
                raise ComplexError(f"differential in degree {d} is not integral", d)
        self._validate(self.check)

    def _ring(self):
        return ZZ

    def over(self, field: CoeffField) -> FieldComplex:
        return FieldComplex(self.grading, dict(self.dims),
                            {d: m.over(field) for d, m in self.differentials.items()},
                            field=field)

    def __hash__(self):
        return hash((self.grading, tuple(sorted(self.dims.items())),
                     tuple(sorted(self.differentials.items(), key=lambda kv: kv[0]))))

    def __eq__(self, other):
        if not isinstance(other, IntegralComplex):
            return NotImplemented
        degs = set(self.degrees()) | set(other.degrees())
        return (self.grading is other.grading
                and all(self.dim(d) == other.dim(d) for d in degs)
                and all(self.differential(d) == other.differential(d) for d in degs))


# homology ---------------------------------------------------------------------

def homology(c: FieldComplex) -> GradedDims:
    """dim H^d = dim ker d^d - rank d^{d-1}, degree by degree."""
    c.check_square_zero()
    ranks = {d: rank(c.differential(d)) for d in c.degrees()}
    out = {}
    for d in c.degrees():
        prev = c.grading.norm(d - 1)
        out[d] = c.dim(d) - ranks[d] - ranks.get(prev, 0) if prev in ranks else c.dim(d) - ranks[d]
    return GradedDims.of(out, c.grading)


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank plus cyclic factors Z/t for t in ``torsion`` (all t > 1)."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if any(t <= 1 for t in self.torsion):
            raise ComplexError("torsion divisors must exceed 1")
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def p_torsion_count(self, p: int) -> int:
        return sum(1 for t in self.torsion if t % p == 0)

    def __str__(self):
        parts = ([f"Z^{self.free_rank}"] if self.free_rank else []) + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class IntegralHomology:
    grading: Grading
    groups: tuple[tuple[int, AbelianGroup], ...]

    def __getitem__(self, d: int) -> AbelianGroup:
        d = self.grading.norm(d)
        return dict(self.groups).get(d, AbelianGroup())

    def degrees(self) -> list[int]:
        return [d for d, _ in self.groups]

    @classmethod
    def of(cls, groups: Mapping[int, AbelianGroup], grading="Z") -> "IntegralHomology":
        g = _grading(grading)
        return cls(g, tuple(sorted((g.norm(d), a) for d, a in groups.items())))


def integral_homology(c: IntegralComplex) -> IntegralHomology:
    """Free ranks and torsion via Smith normal forms of the differentials."""
    c.check_square_zero()
    snf = {d: smith_normal_form(c.differential(d)) for d in c.degrees()}
    groups = {}
    for d in c.degrees():
        prev = c.grading.norm(d - 1)
        incoming = snf[prev].divisors if prev in snf else ()
        kernel = c.dim(d) - snf[d].rank
        groups[d] = AbelianGroup(kernel - len(incoming), tuple(t for t in incoming if t > 1))
    return IntegralHomology.of(groups, c.grading)


def universal_coefficients(h: IntegralHomology | IntegralComplex, k: CoeffField) -> GradedDims:
    """Field dimensions from integral cohomology.

    A summand Z/t in degree d contributes to degrees d and d-1 whenever
    char(k) divides t; free summands contribute to their own degree.
    """
    if isinstance(h, IntegralComplex):
        h = integral_homology(h)
    p = k.characteristic
    out: dict[int, int] = {}
    for d, grp in h.groups:
        out[d] = out.get(d, 0) + grp.free_rank
        if p:
            t = grp.p_torsion_count(p)
            if t:
                out[d] = out.get(d, 0) + t
                below = h.grading.norm(d - 1)
                out[below] = out.get(below, 0) + t
    return GradedDims.of(out, h.grading)


def uniquely_p_divisible(h: IntegralHomology, p: int) -> bool:
    """True iff multiplication by p is bijective in every degree."""
    return all(g.free_rank == 0 and g.p_torsion_count(p) == 0 for _, g in h.groups)


def les_dimension_split(left: GradedDims, middle: GradedDims, cutoff: int) -> GradedDims:
    """Third term of a long exact sequence ``left -> middle -> third -> left[1]``
    whose first map is forced to vanish for degree reasons.

    Requires ``left`` supported strictly above ``cutoff`` and ``middle``
    strictly below it.  Then ``third^d = middle^d + left^{d+1}``.
    """
    if left.kind is not Grading.Z or middle.kind is not Grading.Z:
        raise ComplexError("degree separation needs integer gradings")
    bad_left = [d for d in left.support if d <= cutoff]
    bad_mid = [d for d in middle.support if d >= cutoff]
    if bad_left or bad_mid:
        raise ComplexError(
            f"supports not separated at {cutoff}: left has {bad_left}, middle has {bad_mid}; "
            "the connecting map is not forced to vanish")
    return middle + left.shift(1)


def direct_sum(*complexes: FieldComplex) -> FieldComplex:
    if not complexes:
        raise ComplexError("empty direct sum")
    field = complexes[0].field
    grading = complexes[0].grading
    degs = sorted(set().union(*(c.degrees() for c in complexes)))
    dims = {d: sum(c.dim(d) for c in complexes) for d in degs}
    diffs = {}
    for d in degs:
        trip = []
        ro = co = 0
        for c in complexes:
            for (i, j), v in c.differential(d).entries.items():
                trip.append((ro + i, co + j, v))
            ro += c.dim(d + 1)
            co += c.dim(d)
        diffs[d] = ExactMatrix.from_triplets(dims.get(grading.norm(d + 1), 0), dims[d], field, trip)
    return FieldComplex(grading, dims, diffs, field=field)


# text format ------------------------------------------------------------------

def format_complex(c: FieldComplex | IntegralComplex) -> str:
    """``complex <kind> <lo> <hi> <ring>``, a ``dims`` line, then ``d <k>``
    followed by one matrix block per degree."""
    degs = c.degrees()
    lo, hi = (degs[0], degs[-1]) if degs else (0, -1)
    ring = c.field.name if isinstance(c, FieldComplex) else "Z"
    out = [f"complex {c.grading.value} {lo} {hi} {ring}",
           "dims " + " ".join(str(c.dim(d)) for d in range(lo, hi + 1))]
    for d in range(lo, hi + 1):
        out.append(f"d {d}")
        out.append(format_matrix(c.differential(d)).rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_complex(text: str) -> FieldComplex | IntegralComplex:
    lines = [(n, ln.split("#", 1)[0].rstrip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln.strip()]
    if not lines:
        raise ComplexError("empty complex text")
    n0, head = lines[0]
    f = head.split()
    if len(f) != 5 or f[0] != "complex":
        raise ComplexError(f"line {n0}: expected 'complex <kind> <lo> <hi> <ring>'")
    try:
        grading, lo, hi = Grading(f[1]), int(f[2]), int(f[3])
    except ValueError as exc:
        raise ComplexError(f"line {n0}: {exc}") from exc
    ring = f[4]
    n1, dl = lines[1] if len(lines) > 1 else (n0 + 1, "")
    df = dl.split()
    if not df or df[0] != "dims" or len(df) != hi - lo + 2:
        raise ComplexError(f"line {n1}: expected 'dims' with {hi - lo + 1} entries")
    dims = {lo + i: int(x) for i, x in enumerate(df[1:])}
    blocks: dict[int, list[str]] = {}
    cur = None
    for n, ln in lines[2:]:
        parts = ln.split()
        if parts[0] == "d" and len(parts) == 2:
            cur = int(parts[1])
            blocks[cur] = []
        elif cur is None:
            raise ComplexError(f"line {n}: matrix entry outside a 'd <k>' block")
        else:
            blocks[cur].append(ln)
    diffs = {}
    for d, body in blocks.items():
        try:
            diffs[d] = parse_matrix(body)
        except LinalgError as exc:
            raise ComplexError(f"degree {d}: {exc}", d) from exc
    if ring == "Z":
        return IntegralComplex(grading, dims, diffs)
    from .linalg import parse_ring
    return FieldComplex(grading, dims, diffs, field=parse_ring(ring))


def complex_from_matrices(grading, dims: Mapping[int, int], mats: Mapping[int, Iterable],
                          ring=ZZ) -> IntegralComplex | FieldComplex:
    """Convenience constructor from dense row lists."""
    diffs = {}
    g = _grading(grading)
    for d, rows in mats.items():
        diffs[d] = ExactMatrix.from_rows(list(rows), ring, cols=dims.get(d, 0))
    if ring is ZZ:
        return IntegralComplex(g, dict(dims), diffs)
    return FieldComplex(g, dict(dims), diffs, field=ring)
