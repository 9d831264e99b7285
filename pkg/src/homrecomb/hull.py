"""Dimension-level vanishing tests for wrapped Floer cohomology of thimbles.

A table records ``dim HF(V_i, V_j)`` for later ``i`` and earlier ``j`` and
``dim HF(W, V_i)`` for a test disc ``W``.  The subsequence bound says that
if the first thimble has nonzero wrapped Floer cohomology then

    dim HF(W, V_1) <= sum over 1 = i_1 < ... < i_r, r > 1, of
                      dim HF(W, V_{i_r}) * prod_k dim HF(V_{i_k}, V_{i_{k-1}}).

A strict violation therefore proves vanishing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .complexes import GradedDims, Grading


class HullError(ValueError):
    pass


class MissingEntry(HullError, KeyError):
    """A needed table entry was never populated."""


@dataclass(frozen=True)
class HFDimTable:
    """Floer dimension data for an ordered collection ``V_1..V_m``.

    ``pairs[(i, j)]`` with ``i > j`` is ``HF(V_i, V_j)``; ``test[i]`` is
    ``HF(W, V_i)``.  Unpopulated pair entries raise when queried.
    """

    m: int
    pairs: Mapping[tuple[int, int], GradedDims]
    test: Mapping[int, GradedDims]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.m < 0:
            raise HullError("negative cycle count")
        for (i, j) in self.pairs:
            if not (1 <= j < i <= self.m):
                raise HullError(f"pair entry ({i}, {j}) outside 1 <= j < i <= {self.m}")
        for i in self.test:
            if not 1 <= i <= self.m:
                raise HullError(f"test entry {i} outside 1..{self.m}")
        if self.labels and len(self.labels) != self.m:
            raise HullError("labels must name every cycle")

    def pair(self, i: int, j: int) -> GradedDims:
        try:
            return self.pairs[(i, j)]
        except KeyError:
            raise MissingEntry(f"HF(V_{i}, V_{j}) is not populated") from None

    def w(self, i: int) -> GradedDims:
        try:
            return self.test[i]
        except KeyError:
            raise MissingEntry(f"HF(W, V_{i}) is not populated") from None

    def reindexed(self, keep: list[int]) -> "HFDimTable":
        """Restrict to the cycles ``keep`` (original indices, in order)."""
        pos = {old: new for new, old in enumerate(keep, 1)}
        pairs = {(pos[i], pos[j]): v for (i, j), v in self.pairs.items() if i in pos and j in pos}
        test = {pos[i]: v for i, v in self.test.items() if i in pos}
        labels = tuple(self.labels[i - 1] for i in keep) if self.labels else ()
        return HFDimTable(len(keep), pairs, test, labels)


def hull_bound(t: HFDimTable, target: int = 1) -> int:
    """Right-hand side of the subsequence inequality, by a suffix recursion.

    ``f(j)`` sums chains starting at ``j``; a pair entry ``(k, j)`` is only
    read when ``f(k)`` is nonzero, so blocks that cannot contribute never
    need their cross terms populated.
    """
    if not 1 <= target <= max(t.m, 1):
        raise HullError(f"target {target} outside 1..{t.m}")
    f = [0] * (t.m + 2)
    for j in range(t.m, target, -1):
        acc = t.w(j).total
        for k in range(j + 1, t.m + 1):
            if f[k]:
                acc += t.pair(k, j).total * f[k]
        f[j] = acc
    return sum(t.pair(k, target).total * f[k] for k in range(target + 1, t.m + 1) if f[k])


def hull_bound_bruteforce(t: HFDimTable, target: int = 1) -> int:
    """Explicit sum over all increasing chains, kept as an oracle."""
    total = 0
    later = range(target + 1, t.m + 1)
    for r in range(1, t.m - target + 1):
        for rest in itertools.combinations(later, r):
            chain = (target,) + rest
            term = t.w(chain[-1]).total
            for a, b in zip(chain, chain[1:]):
                term *= t.pair(b, a).total
            total += term
    return total


@dataclass(frozen=True)
class HullVerdict:
    vanishes: bool
    lhs: int
    bound: int

    @property
    def label(self) -> str:
        return "HW-vanishes" if self.vanishes else "unknown"


def hull_test(t: HFDimTable) -> HullVerdict:
    """Vanishing for the first thimble iff dim HF(W, V_1) exceeds the bound."""
    if t.m == 0:
        raise HullError("hull test needs at least one cycle")
    lhs = t.w(1).total
    if lhs == 0:
        return HullVerdict(False, 0, 0)
    bound = hull_bound(t, 1)
    return HullVerdict(lhs > bound, lhs, bound)


@dataclass
class CascadeState:
    remaining: tuple[int, ...]
    verdicts: list[str]
    status: str  # "all-vanish" | "inconclusive"
    steps: list[dict] = field(default_factory=list)
    rule_chain: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"status": self.status, "remaining": list(self.remaining),
                "verdicts": list(self.verdicts), "steps": list(self.steps),
                "rule_chain": list(self.rule_chain)}


def cascade(provider: Callable[[int], Optional[HFDimTable]], size: int) -> CascadeState:
    """Remove leading thimbles one at a time while the hull test proves vanishing.

    ``provider(s)`` returns the table of the collection with its first ``s``
    cycles removed (cycles ``s+1..size`` renumbered from 1), or ``None``
    when no such data is available.
    """
    verdicts = ["unknown"] * size
    steps: list[dict] = []
    rules: list[str] = []
    for s in range(size):
        table = provider(s)
        remaining = tuple(range(s + 1, size + 1))
        if table is None:
            steps.append({"step": s, "result": "no-data"})
            return CascadeState(remaining, verdicts, "inconclusive", steps, rules)
        if table.m != size - s:
            raise HullError(f"provider step {s} returned {table.m} cycles, expected {size - s}")
        v = hull_test(table)
        steps.append({"step": s, "lhs": v.lhs, "bound": v.bound, "result": v.label})
        if not v.vanishes:
            return CascadeState(remaining, verdicts, "inconclusive", steps, rules)
        verdicts[s] = "HW-vanishes"
        rules.append("hull-inequality-violated")
        if s + 1 < size:
            rules.append("thimble-removal-induction")
    rules.append("empty-fibration-base-case")
    rules.append("sh-vanishes-iff-all-hw-vanish")
    return CascadeState((), verdicts, "all-vanish", steps, rules)


def e1_page_dims(t: HFDimTable, target: int = 1, *, n: int) -> GradedDims:
    """Graded dimensions of the first spectral-sequence page.

    Each factor ``HF(V_a, V_b)[-1]^dual`` (``a`` earlier) is rewritten by
    Poincare duality for ``n``-dimensional spheres as ``HF(V_b, V_a)``
    shifted by ``n + 1``, so only the stored later-to-earlier entries are
    needed.  The ``r = 1`` term ``HF(W, V_target)`` is included.
    """
    kind = t.w(target).kind
    zero = GradedDims.zero(kind)
    # g[j] = graded sum over chains starting at j
    g: dict[int, GradedDims] = {}
    for j in range(t.m, target - 1, -1):
        acc = t.w(j)
        for k in range(j + 1, t.m + 1):
            if g[k].is_zero():
                continue
            acc = acc + t.pair(k, j).shift(n + 1).tensor(g[k])
        g[j] = acc
    return g.get(target, zero)


# text format ------------------------------------------------------------------

def format_table(t: HFDimTable) -> str:
    out = [f"{t.m}"]
    for (i, j) in sorted(t.pairs):
        d = t.pairs[(i, j)].reduce_mod2()
        out.append(f"{i} {j} {d[0]} {d[1]}")
    for i in sorted(t.test):
        d = t.test[i].reduce_mod2()
        out.append(f"W {i} {d[0]} {d[1]}")
    return "\n".join(out) + "\n"


def parse_table(text: str) -> HFDimTable:
    m = None
    pairs: dict = {}
    test: dict = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        f = line.split()
        try:
            if m is None:
                if len(f) != 1:
                    raise ValueError("first line must be the cycle count")
                m = int(f[0])
                continue
            if len(f) != 4:
                raise ValueError("expected 'i j even odd' or 'W i even odd'")
            dims = GradedDims.of({0: int(f[2]), 1: int(f[3])}, "Z2")
            if f[0] == "W":
                i = int(f[1])
                if i in test:
                    raise ValueError(f"duplicate test entry {i}")
                test[i] = dims
            else:
                key = (int(f[0]), int(f[1]))
                if key in pairs:
                    raise ValueError(f"duplicate pair entry {key}")
                pairs[key] = dims
        except (ValueError, HullError) as exc:
            raise HullError(f"line {n}: {exc}") from None
    if m is None:
        raise HullError("empty table")
    try:
        return HFDimTable(m, pairs, test)
    except HullError as exc:
        raise HullError(f"table: {exc}") from None


def random_table(rng, m: int, max_dim: int = 3, density: float = 0.7) -> HFDimTable:
    """A fully populated Z/2-graded table with small random entries."""
    def dims():
        if rng.random() > density:
            return GradedDims.zero("Z2")
        return GradedDims.of({0: rng.randint(0, max_dim), 1: rng.randint(0, max_dim)}, "Z2")

    pairs = {(i, j): dims() for i in range(1, m + 1) for j in range(1, i)}
    test = {i: dims() for i in range(1, m + 1)}
    return HFDimTable(m, pairs, test)
