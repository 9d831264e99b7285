"""Reeb-orbit family bookkeeping for the mapping torus, the first page of
its Morse-Bott spectral sequence, Frobenius fixed-point counts, weighted
homogeneity and the countability classifier for infinite products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .complexes import GradedDims
from .linalg import is_prime

CIRCLE = GradedDims.of({0: 1, 1: 1})


class MappingTorusError(ValueError):
    pass


# Reeb families -----------------------------------------------------------------

@dataclass(frozen=True)
class ReebOrbitFamily:
    j: int
    mu: int
    dims: GradedDims
    length: Fraction
    bad: bool = False


@dataclass(frozen=True)
class ReebFamilySystem:
    """A truncation of an infinite family list with periodicity
    ``mu_{j+l} = mu_j + dmu`` and ``length_{j+l} = length_j + dlength``."""

    families: tuple[ReebOrbitFamily, ...]
    period: int | None = None
    dmu: int | None = None
    dlength: Fraction = Fraction(0)

    def __post_init__(self):
        prev = None
        for k, f in enumerate(self.families, 1):
            if f.j != k:
                raise MappingTorusError(f"family indices must run 1, 2, ...; got {f.j} at {k}")
            if prev is not None and f.length < prev:
                raise MappingTorusError(f"family {f.j}: lengths must be nondecreasing")
            prev = f.length
        if self.period is not None:
            if self.period < 1 or self.period > max(len(self.families), 1):
                raise MappingTorusError("period must lie between 1 and the number of families")

    def extended(self, count: int) -> "ReebFamilySystem":
        """Continue the list periodically to ``count`` families."""
        if self.period is None or self.dmu is None:
            raise MappingTorusError("no periodicity datum to extend with")
        fams = list(self.families)
        l = self.period
        while len(fams) < count:
            src = fams[len(fams) - l]
            fams.append(ReebOrbitFamily(len(fams) + 1, src.mu + self.dmu, src.dims,
                                        src.length + self.dlength, src.bad))
        return ReebFamilySystem(tuple(fams), self.period, self.dmu, self.dlength)


def torus_families(sys: ReebFamilySystem) -> ReebFamilySystem:
    """Families on the boundary of the mapping torus are S^1 x C_j, with the
    same index and local system."""
    fams = tuple(ReebOrbitFamily(f.j, f.mu, CIRCLE.tensor(f.dims), f.length, f.bad)
                 for f in sys.families)
    return ReebFamilySystem(fams, sys.period, sys.dmu, sys.dlength)


@dataclass
class E1Page:
    entries: dict[tuple[int, int], int]
    totals: dict[int, int]
    certified: tuple[int | None, int | None] | None
    finiteness: str  # "asserted" | "not assertable"
    notes: list[str] = field(default_factory=list)

    def total(self, degree: int) -> int:
        if not self.is_certified(degree):
            raise MappingTorusError(f"total degree {degree} is outside the certified window")
        return self.totals.get(degree, 0)

    def is_certified(self, degree: int) -> bool:
        if self.certified is None:
            return False
        lo, hi = self.certified
        return (lo is None or degree >= lo) and (hi is None or degree <= hi)


def e1_page_sh(sys: ReebFamilySystem, h_T: GradedDims) -> E1Page:
    """E_1^{pq} = (H(S^1) x H(C_{-p}))^{p+q-mu_{-p}} for p < 0, H^q(T) for p = 0.

    Degrees are reported as total degree p + q.  The window of total degrees
    that the truncation determines exactly comes from the periodicity datum:
    families beyond the truncation have index at least (or at most) the
    last period's extreme index shifted by dmu.
    """
    entries: dict[tuple[int, int], int] = {}
    totals: dict[int, int] = {}
    notes = []
    for q, n in h_T.entries:
        entries[(0, q)] = n
        totals[q] = totals.get(q, 0) + n
    tf = torus_families(sys)
    for f in tf.families:
        p = -f.j
        for d, n in f.dims.entries:
            s = d + f.mu
            entries[(p, s - p)] = n
            totals[s] = totals.get(s, 0) + n
    certified = None
    finiteness = "not assertable"
    if sys.dmu is None or sys.period is None:
        if sys.families:
            notes.append("no periodicity datum: truncation cannot be certified")
        else:
            certified, finiteness = (None, None), "asserted"
    elif sys.dmu == 0:
        notes.append("index shift 0: infinitely many families may share an index")
    else:
        last = tf.families[-sys.period:]
        top = max((max(f.dims.support, default=0) for f in tf.families), default=0)
        if sys.dmu > 0:
            certified = (None, min(f.mu for f in last) + sys.dmu - 1)
        else:
            certified = (max(f.mu for f in last) + sys.dmu + top + 1, None)
        finiteness = "asserted"
    notes.append("total degree is p + q; its relation to the SH grading is a convention")
    return E1Page(entries, dict(sorted(totals.items())), certified, finiteness, notes)


# Frobenius fixed points -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    """Commutative unital algebra over F_p; ``c[i, j, k]`` is the coefficient
    of e_k in e_i e_j."""

    p: int
    c: np.ndarray
    unit: np.ndarray

    def __post_init__(self):
        if not is_prime(self.p):
            raise MappingTorusError(f"{self.p} is not prime")
        c = np.asarray(self.c, dtype=np.int64) % self.p
        u = np.asarray(self.unit, dtype=np.int64) % self.p
        d = u.shape[0]
        if c.shape != (d, d, d):
            raise MappingTorusError(f"structure constants must have shape {(d, d, d)}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "unit", u)
        self.validate()

    @property
    def d(self) -> int:
        return self.unit.shape[0]

    def validate(self):
        c, p, d = self.c, self.p, self.d
        if not np.array_equal(c, c.transpose(1, 0, 2)):
            raise MappingTorusError("multiplication is not commutative")
        # (e_i e_j) e_k versus e_i (e_j e_k)
        left = np.einsum("ijm,mkn->ijkn", c, c) % p
        right = np.einsum("jkm,imn->ijkn", c, c) % p
        if not np.array_equal(left, right):
            raise MappingTorusError("multiplication is not associative")
        ue = np.einsum("i,ijk->jk", self.unit, c) % p
        if not np.array_equal(ue, np.eye(d, dtype=np.int64)):
            raise MappingTorusError("unit vector is not a unit")

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Row-wise products of batches of elements.

        Runs in float64 so the contractions go through BLAS; every partial
        sum is below d p^2 < 2^53 under the enumeration cap, hence exact.
        """
        p, d = self.p, self.d
        cf = self.c.reshape(d, d * d).astype(np.float64)
        left = np.mod(x @ cf, p).reshape(-1, d, d)  # sum_i x_i c[i, j, k]
        return np.mod(np.matmul(y[:, None, :], left)[:, 0, :], p)

    def power(self, x: np.ndarray, e: int) -> np.ndarray:
        result = np.tile(self.unit.astype(np.float64), (x.shape[0], 1))
        base = x.astype(np.float64)
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result


FROBENIUS_CAP = 10 ** 6


def frobenius_count(a: FrobeniusAlgebra, cap: int = FROBENIUS_CAP, chunk: int = 1 << 14) -> int:
    """Number of x with x^p = x, by enumerating all p^d elements."""
    size = a.p ** a.d
    if size > cap:
        raise MappingTorusError(f"p^d = {size} exceeds the enumeration cap {cap}")
    count = 0
    digits = a.p ** np.arange(a.d, dtype=np.int64)
    for start in range(0, size, chunk):
        idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
        x = (idx[:, None] // digits[None, :]) % a.p
        count += int(np.all(a.power(x, a.p) == x.astype(np.float64), axis=1).sum())
    return count


def frobenius_product(counts: Iterable[int]) -> int:
    """Fixed points on a product algebra are products of fixed-point sets."""
    return math.prod(counts)


def product_algebra(*algs: FrobeniusAlgebra) -> FrobeniusAlgebra:
    if not algs:
        raise MappingTorusError("empty product")
    p = algs[0].p
    if any(a.p != p for a in algs):
        raise MappingTorusError("factors must share the characteristic")
    d = sum(a.d for a in algs)
    c = np.zeros((d, d, d), dtype=np.int64)
    unit = np.zeros(d, dtype=np.int64)
    o = 0
    for a in algs:
        c[o:o + a.d, o:o + a.d, o:o + a.d] = a.c
        unit[o:o + a.d] = a.unit
        o += a.d
    return FrobeniusAlgebra(p, c, unit)


def quotient_algebra(p: int, f: Sequence[int]) -> FrobeniusAlgebra:
    """F_p[x]/(f) for monic ``f`` given by coefficients, constant term first."""
    f = [v % p for v in f]
    if not f or f[-1] != 1:
        raise MappingTorusError("polynomial must be monic")
    d = len(f) - 1
    if d < 1:
        raise MappingTorusError("quotient by a unit is the zero ring")
    # powers x^0..x^{2d-2} reduced mod f
    red = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(2 * d - 1):
        red.append(cur[:])
        lead = cur[-1]
        cur = [0] + cur[:-1]
        for k in range(d):
            cur[k] = (cur[k] - lead * f[k]) % p
    c = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            c[i, j] = red[i + j]
    unit = np.zeros(d, dtype=np.int64)
    unit[0] = 1
    return FrobeniusAlgebra(p, c, unit)


def prime_field(p: int) -> FrobeniusAlgebra:
    return FrobeniusAlgebra(p, np.ones((1, 1, 1), dtype=np.int64), np.ones(1, dtype=np.int64))


def random_quotient_algebra(rng, p: int, d: int) -> FrobeniusAlgebra:
    return quotient_algebra(p, [rng.randrange(p) for _ in range(d)] + [1])


# weighted homogeneity ------------------------------------------------------------

@dataclass(frozen=True)
class WeightedPolynomialSpec:
    weights: tuple[int, ...]
    w: int
    monomials: tuple[tuple[int, ...], ...]


@dataclass
class WeightReport:
    homogeneous: bool
    bad_monomials: list[tuple[int, ...]]
    defect: int  # w - sum(w_i)
    index_shift: int  # 2 (w - sum(w_i))
    standing_assumption: bool  # sum(w_i) != w


def check_weighted_homogeneous(spec: WeightedPolynomialSpec, strict: bool = True) -> WeightReport:
    if any(x <= 0 for x in spec.weights) or spec.w <= 0:
        raise MappingTorusError("weights must be positive")
    bad = []
    for mono in spec.monomials:
        if len(mono) != len(spec.weights):
            raise MappingTorusError(f"monomial {mono} has the wrong number of variables")
        if sum(a * b for a, b in zip(mono, spec.weights)) != spec.w:
            bad.append(tuple(mono))
    if bad and strict:
        raise MappingTorusError(f"monomials {bad} are not of weight {spec.w}")
    defect = spec.w - sum(spec.weights)
    return WeightReport(not bad, bad, defect, 2 * defect, defect != 0)


def brieskorn_spec(exponents: Sequence[int]) -> WeightedPolynomialSpec:
    """x_1^{a_1} + ... + x_{n+1}^{a_{n+1}} with w = lcm(a_i) and w_i = w / a_i."""
    w = math.lcm(*exponents)
    weights = tuple(w // a for a in exponents)
    monos = tuple(tuple(a if i == k else 0 for i in range(len(exponents)))
                  for k, a in enumerate(exponents))
    return WeightedPolynomialSpec(weights, w, monos)


# countability -------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeSet:
    """A finite set of primes, or the complement of one (cofinite)."""

    kind: str  # finite | cofinite
    primes: frozenset[int]

    def __post_init__(self):
        if self.kind not in ("finite", "cofinite"):
            raise MappingTorusError("prime set must be finite or cofinite")
        bad = [p for p in self.primes if not is_prime(p)]
        if bad:
            raise MappingTorusError(f"not prime: {sorted(bad)}")
        object.__setattr__(self, "primes", frozenset(self.primes))

    @classmethod
    def finite(cls, primes: Iterable[int]) -> "PrimeSet":
        return cls("finite", frozenset(primes))

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "PrimeSet":
        return cls("cofinite", frozenset(excluded))

    def __contains__(self, p: int) -> bool:
        return (p in self.primes) == (self.kind == "finite")

    def enumerate(self, count: int) -> list[int]:
        """p_1 < p_2 < ... (at most ``count`` of them)."""
        if self.kind == "finite":
            return sorted(self.primes)[:count]
        out, n = [], 2
        while len(out) < count:
            if is_prime(n) and n not in self.primes:
                out.append(n)
            n += 1
        return out

    def __str__(self):
        body = ",".join(map(str, sorted(self.primes)))
        return f"{{{body}}}" if self.kind == "finite" else f"primes minus {{{body}}}"


@dataclass
class CountabilityResult:
    countable: bool
    first_vanishing_factor: int | None
    staged: list[tuple[int, bool]]  # (q_k, factor k vanishes) for the first factors

    @property
    def label(self) -> str:
        return "countable" if self.countable else "uncountable"


def countability_classifier(P: PrimeSet, char: int, stages: int = 8) -> CountabilityResult:
    """Dimension of an infinite product whose k-th factor is the symplectic
    cohomology of a domain that vanishes over F_p exactly when p | q_k,
    with q_k = p_1 ... p_k.

    The product is countable iff all but finitely many factors vanish.
    Once p = p_K appears, every later q_k is divisible by p; if p never
    appears (or char is 0) no factor vanishes.
    """
    if char != 0 and not is_prime(char):
        raise MappingTorusError(f"characteristic {char} is neither 0 nor prime")
    if char and char in P:
        if P.kind == "finite":
            index = sorted(P.primes).index(char) + 1
        else:
            index = sum(1 for n in range(2, char + 1) if is_prime(n) and n not in P.primes)
    else:
        index = None
    staged = []
    primes = P.enumerate(max(stages, index or 0))
    q = 1
    for k in range(1, stages + 1):
        if k <= len(primes):
            q *= primes[k - 1]
        staged.append((q, bool(char) and q % char == 0))
    return CountabilityResult(index is not None, index, staged)


# text formats --------------------------------------------------------------------------

def parse_families(text: str) -> ReebFamilySystem:
    """Lines ``j mu length dim_0 dim_1 ... [bad]``, plus an optional
    ``period l dmu [dlength]`` line."""
    fams = []
    period = dmu = None
    dlength = Fraction(0)
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        try:
            if f[0] == "period":
                period, dmu = int(f[1]), int(f[2])
                dlength = Fraction(f[3]) if len(f) > 3 else Fraction(0)
                continue
            bad = f[-1] == "bad"
            if f[-1] in ("bad", "good"):
                f = f[:-1]
            if len(f) < 4:
                raise ValueError("expected 'j mu length dims...'")
            dims = GradedDims.of({d: int(x) for d, x in enumerate(f[3:])})
            fams.append(ReebOrbitFamily(int(f[0]), int(f[1]), dims, Fraction(f[2]), bad))
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise MappingTorusError(f"line {n}: {exc}") from None
    try:
        return ReebFamilySystem(tuple(fams), period, dmu, dlength)
    except MappingTorusError as exc:
        raise MappingTorusError(f"family system: {exc}") from None


def format_families(sys: ReebFamilySystem) -> str:
    out = []
    if sys.period is not None:
        out.append(f"period {sys.period} {sys.dmu} {sys.dlength}")
    for f in sys.families:
        top = max(f.dims.support, default=-1)
        dims = " ".join(str(f.dims[d]) for d in range(top + 1)) or "0"
        out.append(f"{f.j} {f.mu} {f.length} {dims}" + (" bad" if f.bad else ""))
    return "\n".join(out) + "\n"


def parse_algebra(text: str) -> FrobeniusAlgebra:
    """``algebra <p> <d>``, ``unit u_1 ... u_d``, then ``i j k value`` triplets
    (0-indexed, duplicates summed)."""
    p = d = None
    unit = None
    trip = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        try:
            if f[0] == "algebra":
                p, d = int(f[1]), int(f[2])
            elif f[0] == "unit":
                unit = [int(x) for x in f[1:]]
            else:
                if len(f) != 4:
                    raise ValueError("expected 'i j k value'")
                trip.append(tuple(int(x) for x in f))
        except (ValueError, IndexError) as exc:
            raise MappingTorusError(f"line {n}: {exc}") from None
    if p is None or unit is None or len(unit) != d:
        raise MappingTorusError("algebra file needs 'algebra p d' and a unit of length d")
    c = np.zeros((d, d, d), dtype=np.int64)
    for i, j, k, v in trip:
        if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
            raise MappingTorusError(f"structure constant index {(i, j, k)} out of range")
        c[i, j, k] += v
    return FrobeniusAlgebra(p, c, np.array(unit))


def format_algebra(a: FrobeniusAlgebra) -> str:
    out = [f"algebra {a.p} {a.d}", "unit " + " ".join(str(int(x)) for x in a.unit)]
    for i, j, k in zip(*np.nonzero(a.c)):
        out.append(f"{i} {j} {k} {int(a.c[i, j, k])}")
    return "\n".join(out) + "\n"
