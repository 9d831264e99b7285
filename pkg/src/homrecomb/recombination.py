"""Double handle attachment, rho-twist recombination of Lefschetz fibrations,
Hurwitz and stabilization moves, and the characteristic-selective verdict on
symplectic cohomology.

All Floer data is table driven: entries come only from the explicit local
computations around each double handle, and a query outside them raises.
Gradings are integer gradings; Z/2 data is obtained by reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .complexes import (
    GradedDims,
    IntegralComplex,
    complex_from_matrices,
    les_dimension_split,
    universal_coefficients,
)
from .hull import CascadeState, HFDimTable, cascade
from .linalg import ZZ, CoeffField

STATUSES = ("vanishes", "nonvanishes", "unknown")


class RecombinationError(ValueError):
    """Precondition violation; ``obj`` names the offending object."""

    def __init__(self, message: str, obj: str | None = None):
        super().__init__(message)
        self.obj = obj


# the subset U_- of the sphere ---------------------------------------------------

@dataclass(frozen=True)
class UMinusSpec:
    variant: str  # moore | point_plus_circle | circle_two_arcs | explicit
    n: int
    q: int | None = None
    complex: IntegralComplex | None = field(default=None, compare=False)

    def __post_init__(self):
        v = self.variant
        if v == "moore":
            if self.q is None or self.q < 1:
                raise RecombinationError("moore needs a positive integer q", "u")
            if self.n < 5:
                raise RecombinationError(f"moore needs n >= 5, got n = {self.n}", "u")
        elif v == "point_plus_circle":
            if self.n <= 2:
                raise RecombinationError("point_plus_circle needs n > 2", "u")
        elif v == "circle_two_arcs":
            if self.n != 2:
                raise RecombinationError("circle_two_arcs is the n = 2 variant", "u")
        elif v == "explicit":
            if self.complex is None:
                raise RecombinationError("explicit variant needs a cochain complex", "u")
        else:
            raise RecombinationError(f"unknown U_- variant {v!r}", "u")

    @property
    def euler_violated(self) -> bool:
        return self.variant == "circle_two_arcs"

    @property
    def euler_characteristic(self) -> int | None:
        if self.variant in ("moore", "point_plus_circle"):
            return 1
        if self.variant == "circle_two_arcs":
            return 2
        h = universal_coefficients(self.complex, CoeffField(0))
        return h.euler_characteristic()

    def __str__(self):
        if self.variant == "moore":
            return f"moore(q={self.q})"
        return self.variant


def moore_cochain_complex(q: int) -> IntegralComplex:
    """Cellular cochains of the circle with a 2-cell attached by degree q."""
    return complex_from_matrices("Z", {0: 1, 1: 1, 2: 1}, {0: [[0]], 1: [[q]]}, ZZ)


def _reduce(h: GradedDims) -> GradedDims:
    if h[0] < 1:
        raise RecombinationError("U_- must be nonempty (H^0 = 0)", "u")
    return GradedDims.of({d: (n - 1 if d == 0 else n) for d, n in h.entries})


def moore_chain_oracle(q: int, k: CoeffField) -> GradedDims:
    """Reduced cohomology of the Moore space through Smith normal form and
    universal coefficients."""
    return _reduce(universal_coefficients(moore_cochain_complex(q), k))


def u_minus_cohomology(u: UMinusSpec, k: CoeffField) -> GradedDims:
    """Reduced cohomology of U_- with coefficients in k."""
    if u.variant == "moore":
        # q = 1 kills the circle outright; char 0 divides no positive q.
        if u.q != 1 and k.divides(u.q):
            return GradedDims.of({1: 1, 2: 1})
        return GradedDims.zero()
    if u.variant == "point_plus_circle":
        return GradedDims.of({0: 1, 1: 1})
    if u.variant == "circle_two_arcs":
        return GradedDims.of({0: 1})
    return _reduce(universal_coefficients(u.complex, k))


def twist_floer_dims(u: UMinusSpec, k: CoeffField, rho: int, n: int | None = None) -> GradedDims:
    """Graded HF(W^2, tau_{L2}^rho tau_{L1}(L0)) as a sum of shifted copies of H~(U_-)."""
    if rho < 0:
        raise RecombinationError("rho must be non-negative", "rho")
    n = u.n if n is None else n
    h = u_minus_cohomology(u, k)
    out = GradedDims.zero()
    for i in range(rho):
        out = out + h.shift(-i * (n - 1))
    return out


def twist_floer_dims_les(u: UMinusSpec, k: CoeffField, rho: int, n: int | None = None) -> GradedDims:
    """The same group assembled one twist at a time from the exact triangle.

    Start from HF(W^2, L^1) = 0 and at step r add the left term
    H~^{*-r(n-1)-1}(U_-), whose support lies above r(n-1) while the running
    group lies below it, so the connecting map vanishes.
    """
    n = u.n if n is None else n
    h = u_minus_cohomology(u, k)
    middle = GradedDims.zero()
    for r in range(rho):
        left = h.shift(-(r * (n - 1) + 1))
        middle = les_dimension_split(left, middle, r * (n - 1))
    return middle


# twist words and descriptions -----------------------------------------------------

@dataclass(frozen=True)
class TwistWord:
    """``tau_{t1}^{e1} tau_{t2}^{e2} ... (base)``; ``twists[0]`` is applied last."""

    base: str
    twists: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        merged: list[list] = []
        for lab, e in self.twists:
            if merged and merged[-1][0] == lab:
                merged[-1][1] += e
            else:
                merged.append([lab, e])
            if merged[-1][1] == 0:
                merged.pop()
        object.__setattr__(self, "twists", tuple((a, b) for a, b in merged))

    @property
    def bare(self) -> bool:
        return not self.twists

    @property
    def label(self) -> str:
        return self.base if self.bare else str(self)

    def twisted_by(self, label: str, e: int = 1) -> "TwistWord":
        return TwistWord(self.base, ((label, e),) + self.twists)

    def __str__(self):
        parts = [f"tau[{a}]" + (f"^{e}" if e != 1 else "") for a, e in self.twists]
        return " ".join(parts + [f"({self.base})" if parts else self.base])


@dataclass(frozen=True)
class Fiber:
    id: str
    complexity: int | None
    handles: tuple[str, ...] = ()

    def __str__(self):
        return self.id + "".join(f"+h[{h}]" for h in self.handles)


@dataclass(frozen=True)
class ComplexityLedger:
    """Upper bound on complexity with an audit trail of (move, increment).

    The trail is history, not part of the value of a description.
    """

    bound: int | None
    trail: tuple[tuple[str, int], ...] = field(default=(), compare=False)

    def add(self, move: str, inc: int) -> "ComplexityLedger":
        return ComplexityLedger(None if self.bound is None else self.bound + inc,
                                self.trail + ((move, inc),))

    def __str__(self):
        return "unknown" if self.bound is None else str(self.bound)


@dataclass(frozen=True)
class Block:
    """Labels created by one double handle attachment."""

    base: str
    l1: str
    l2: str
    w2: str
    fibre_disc: str


@dataclass(frozen=True)
class RecombinationRecord:
    rho: int
    u: UMinusSpec
    blocks: tuple[Block, ...]
    original_bound: int | None


@dataclass(frozen=True)
class LefschetzDescription:
    fiber: Fiber
    cycles: tuple[TwistWord, ...]
    co_disc: tuple[bool, ...]
    certificates: tuple[bool, ...]
    sh_known: tuple[tuple[str, str], ...] = (("*", "unknown"),)
    deformation_class: str = "E"
    almost_symplectomorphic_to: str | None = "E"
    recombination: RecombinationRecord | None = None
    ledger: ComplexityLedger = ComplexityLedger(None)

    def __post_init__(self):
        m = len(self.cycles)
        if len(self.co_disc) != m or len(self.certificates) != m:
            raise RecombinationError("per-cycle flags must match the cycle list", self.fiber.id)
        for key, st in self.sh_known:
            if st not in STATUSES:
                raise RecombinationError(f"unknown SH status {st!r}", key)

    @classmethod
    def from_cycles(cls, fiber_id: str, complexity: int | None, cycles: Sequence[str],
                    co_disc: Sequence[bool] | None = None, sh_known: dict | None = None,
                    deformation_class: str = "E",
                    certificates: Sequence[bool] | None = None) -> "LefschetzDescription":
        m = len(cycles)
        ledger = ComplexityLedger(complexity, (("fiber", complexity or 0),))
        ledger = ledger.add("total-space", m)
        return cls(Fiber(fiber_id, complexity), tuple(TwistWord(c) for c in cycles),
                   tuple(co_disc if co_disc is not None else [True] * m),
                   tuple(certificates if certificates is not None else [False] * m),
                   tuple(sorted((sh_known or {"*": "unknown"}).items())),
                   deformation_class, deformation_class, None, ledger)

    @property
    def m(self) -> int:
        return len(self.cycles)

    def status(self, k: CoeffField) -> str:
        table = dict(self.sh_known)
        return table.get(str(k.characteristic), table.get("*", "unknown"))

    def cycle_strings(self) -> list[str]:
        return [str(c) for c in self.cycles]


# double handles and recombination -------------------------------------------------

@dataclass(frozen=True)
class DoubleHandleData:
    block: Block
    fiber: Fiber
    hf: dict
    ledger_increment: int = 2


def _block(base: str) -> Block:
    return Block(base, f"L1[{base}]", f"L2[{base}]", f"W2[{base}]", f"D[{base}]")


def double_handle(d: LefschetzDescription, i: int, u: UMinusSpec, k: CoeffField) -> DoubleHandleData:
    """Attach the two handles along the disc dual to cycle ``i`` (0-based).

    Floer groups are recorded with L^0 the i-th cycle; keys are
    ``(first, second)`` for HF(first, second).
    """
    if not 0 <= i < d.m:
        raise RecombinationError(f"cycle index {i} out of range 0..{d.m - 1}", f"cycle {i}")
    if not d.co_disc[i]:
        raise RecombinationError(f"cycle {d.cycles[i]} has no dual disc", str(d.cycles[i]))
    b = _block(d.cycles[i].label)
    zero = GradedDims.zero()
    hf = {
        (b.l1, b.base): GradedDims.of({1: 1}),
        (b.l2, b.base): zero,
        (b.w2, b.base): zero,
        (b.w2, b.l1): zero,
        (b.w2, b.l2): GradedDims.of({0: 1}),
        (b.l2, b.l1): u_minus_cohomology(u, k).shift(-1),
    }
    fiber = replace(d.fiber, handles=d.fiber.handles + (b.l1, b.l2))
    return DoubleHandleData(b, fiber, hf)


def recombine(d: LefschetzDescription, rho: int, u: UMinusSpec) -> LefschetzDescription:
    """Replace each V_i by (tau_{L2}^rho tau_{L1}(V_i), L2, L1)."""
    if rho < 1:
        raise RecombinationError("rho must be positive", "rho")
    if d.m < 1:
        raise RecombinationError("recombination needs at least one cycle", d.fiber.id)
    for i, ok in enumerate(d.co_disc):
        if not ok:
            raise RecombinationError(f"cycle {d.cycles[i]} has no dual disc", str(d.cycles[i]))
    cycles, co, cert, blocks = [], [], [], []
    ledger = ComplexityLedger(d.fiber.complexity, (("fiber", d.fiber.complexity or 0),))
    handles = list(d.fiber.handles)
    for i, c in enumerate(d.cycles):
        b = _block(c.label)
        blocks.append(b)
        handles += [b.l1, b.l2]
        ledger = ledger.add(f"handle {b.l1}", 1).add(f"handle {b.l2}", 1)
        cycles += [c.twisted_by(b.l1).twisted_by(b.l2, rho), TwistWord(b.l2), TwistWord(b.l1)]
        co += [d.co_disc[i], True, True]
        cert += [False, True, True]
    ledger = ledger.add("total-space", 3 * d.m)
    if rho == 1:
        deform, sh = d.deformation_class, d.sh_known
    else:
        deform, sh = f"{d.deformation_class}~recombined(rho={rho},{u})", (("*", "unknown"),)
    almost = d.almost_symplectomorphic_to
    if u.euler_violated and rho % 2 == 0:
        # only odd rho is known to keep the almost symplectic type in this dimension
        almost = None
    record = RecombinationRecord(rho, u, tuple(blocks), d.ledger.bound)
    return LefschetzDescription(replace(d.fiber, handles=tuple(handles)), tuple(cycles),
                                tuple(co), tuple(cert), sh, deform, almost, record, ledger)


def _recombined_layout_intact(d: LefschetzDescription) -> bool:
    r = d.recombination
    if r is None or d.m != 3 * len(r.blocks):
        return False
    for i, b in enumerate(r.blocks):
        a, l2, l1 = d.cycles[3 * i: 3 * i + 3]
        expect = TwistWord(b.base).twisted_by(b.l1).twisted_by(b.l2, r.rho)
        if (a.base, a.twists) != (expect.base, expect.twists) or l2 != TwistWord(b.l2) \
                or l1 != TwistWord(b.l1):
            return False
    return True


def hf_table(d: LefschetzDescription, k: CoeffField, disc: str, start_block: int = 0,
             skip: int = 0) -> HFDimTable:
    """Table for the recombined collection from block ``start_block`` on, with
    the first ``skip`` cycles of that block removed, against test disc ``disc``.

    Only entries supplied by the local double-handle computations are
    populated; every other pair entry raises on access.
    """
    if not _recombined_layout_intact(d):
        raise RecombinationError("no Floer data: description is not a recombination output",
                                 d.fiber.id)
    r = d.recombination
    n = r.u.n
    twist = twist_floer_dims(r.u, k, r.rho, n)
    h = u_minus_cohomology(r.u, k)
    labels, test = [], {}
    pairs = {}
    pos: dict[str, int] = {}
    for bi in range(start_block, len(r.blocks)):
        b = r.blocks[bi]
        names = [f"V~[{b.base}]", b.l2, b.l1]
        if bi == start_block:
            names = names[skip:]
        for nm in names:
            labels.append(nm)
            pos[nm] = len(labels)
            zero = GradedDims.zero()
            val = zero
            if disc == b.w2:
                val = {f"V~[{b.base}]": twist, b.l2: GradedDims.of({0: 1}), b.l1: zero}[nm]
            elif disc == b.fibre_disc:
                val = GradedDims.of({0: 1}) if nm == b.l1 else zero
            test[pos[nm]] = val
        if f"V~[{b.base}]" in pos and b.l2 in pos:
            pairs[(pos[b.l2], pos[f"V~[{b.base}]"])] = h.shift(-(r.rho * (n - 1) + 1))
    return HFDimTable(len(labels), pairs, test, tuple(labels))


def cascade_provider(d: LefschetzDescription, k: CoeffField):
    """Steps of the thimble-removal induction for a recombination output:
    per block, test disc W^2 for the twisted cycle and for L^2, then the
    cotangent-fibre disc for L^1."""
    if not _recombined_layout_intact(d):
        return (lambda step: None), d.m
    blocks = d.recombination.blocks

    def provider(step: int) -> Optional[HFDimTable]:
        bi, r = divmod(step, 3)
        b = blocks[bi]
        disc = b.fibre_disc if r == 2 else b.w2
        return hf_table(d, k, disc, bi, r)

    return provider, d.m


def run_cascade(d: LefschetzDescription, k: CoeffField) -> CascadeState:
    provider, size = cascade_provider(d, k)
    return cascade(provider, size)


# moves ------------------------------------------------------------------------------

def _swap(t: tuple, i: int, a, b) -> tuple:
    return t[:i] + (a, b) + t[i + 2:]


def hurwitz_move(d: LefschetzDescription, position: int, direction: str) -> LefschetzDescription:
    """``right``: (tau_A^e(X), A) -> (A, tau_A^{e-1}(X));
    ``left``: (A, X) -> (tau_A(X), A).  Positions are 0-based."""
    i = position
    if not 0 <= i < d.m - 1:
        raise RecombinationError(f"Hurwitz position {i} needs a right neighbour", f"position {i}")
    x, a = d.cycles[i], d.cycles[i + 1]
    if direction == "right":
        if not x.twists or x.twists[0][0] != a.label:
            raise RecombinationError(
                f"{x} is not of the form tau[{a.label}](...)", f"position {i}")
        new = _swap(d.cycles, i, a, TwistWord(x.base, ((a.label, -1),) + x.twists))
        perm = (i + 1, i)
    elif direction == "left":
        a, x = d.cycles[i], d.cycles[i + 1]
        new = _swap(d.cycles, i, x.twisted_by(a.label), a)
        perm = (i + 1, i)
    else:
        raise RecombinationError(f"direction must be left or right, got {direction!r}", "move")
    co = _swap(d.co_disc, i, d.co_disc[perm[0]], d.co_disc[perm[1]])
    cert = _swap(d.certificates, i, d.certificates[perm[0]], d.certificates[perm[1]])
    return replace(d, cycles=new, co_disc=co, certificates=cert,
                   ledger=d.ledger.add(f"hurwitz {direction} {i}", 0))


def stabilize(d: LefschetzDescription, position: int, label: str,
              slot: int | None = None) -> LefschetzDescription:
    """Attach a handle to the fibre and insert its core sphere as a cycle.

    ``slot`` places the handle in the fibre's handle list (default: last), so
    undoing a destabilization restores the list exactly.
    """
    if not 0 <= position <= d.m:
        raise RecombinationError(f"stabilization position {position} out of range", label)
    if label in d.fiber.handles or any(c.label == label for c in d.cycles):
        raise RecombinationError(f"label {label} already in use", label)
    hs = d.fiber.handles
    slot = len(hs) if slot is None else slot
    if not 0 <= slot <= len(hs):
        raise RecombinationError(f"handle slot {slot} out of range", label)
    ins = lambda t, v: t[:position] + (v,) + t[position:]  # noqa: E731
    ledger = d.ledger.add(f"stabilize handle {label}", 1).add(f"stabilize cycle {label}", 1)
    return replace(d, fiber=replace(d.fiber, handles=hs[:slot] + (label,) + hs[slot:]),
                   cycles=ins(d.cycles, TwistWord(label)), co_disc=ins(d.co_disc, True),
                   certificates=ins(d.certificates, True), ledger=ledger)


def _referenced_elsewhere(d: LefschetzDescription, position: int) -> bool:
    lab = d.cycles[position].base
    return any(j != position and (c.base == lab or any(t == lab for t, _ in c.twists))
               for j, c in enumerate(d.cycles))


def destabilize(d: LefschetzDescription, position: int) -> LefschetzDescription:
    """Cancel a cycle that meets a dual disc once, together with its handle."""
    if not 0 <= position < d.m:
        raise RecombinationError(f"destabilization position {position} out of range",
                                 f"position {position}")
    c = d.cycles[position]
    if not d.certificates[position] or not c.bare:
        raise RecombinationError(f"cycle {c} has no dual-disc certificate", str(c))
    if c.base not in d.fiber.handles:
        raise RecombinationError(f"no handle {c.base} in fibre {d.fiber}", str(c))
    if _referenced_elsewhere(d, position):
        raise RecombinationError(f"other cycles still pass through handle {c.base}", str(c))
    handles = tuple(h for h in d.fiber.handles if h != c.base)
    cut = lambda t: t[:position] + t[position + 1:]  # noqa: E731
    ledger = d.ledger.add(f"destabilize handle {c.base}", -1).add(f"destabilize cycle {c.base}", -1)
    return replace(d, fiber=replace(d.fiber, handles=handles), cycles=cut(d.cycles),
                   co_disc=cut(d.co_disc), certificates=cut(d.certificates), ledger=ledger)


@dataclass(frozen=True)
class Move:
    kind: str  # hurwitz-left | hurwitz-right | stabilize | destabilize
    position: int
    label: str = ""
    slot: int | None = None

    def apply(self, d: LefschetzDescription) -> LefschetzDescription:
        if self.kind == "hurwitz-left":
            return hurwitz_move(d, self.position, "left")
        if self.kind == "hurwitz-right":
            return hurwitz_move(d, self.position, "right")
        if self.kind == "stabilize":
            return stabilize(d, self.position, self.label, self.slot)
        if self.kind == "destabilize":
            return destabilize(d, self.position)
        raise RecombinationError(f"unknown move {self.kind!r}", "move")

    def inverse(self, before: LefschetzDescription) -> "Move":
        if self.kind == "hurwitz-left":
            return Move("hurwitz-right", self.position)
        if self.kind == "hurwitz-right":
            return Move("hurwitz-left", self.position)
        if self.kind == "stabilize":
            return Move("destabilize", self.position)
        label = before.cycles[self.position].base
        return Move("stabilize", self.position, label, before.fiber.handles.index(label))

    def __str__(self):
        return f"{self.kind} {self.position}" + (f" {self.label}" if self.label else "")


def parse_move(text: str) -> Move:
    f = text.split()
    if not f:
        raise RecombinationError("empty move", "move")
    try:
        if f[0] == "hurwitz" and len(f) == 3 and f[2] in ("left", "right"):
            return Move(f"hurwitz-{f[2]}", int(f[1]))
        if f[0] == "stabilize" and len(f) == 3:
            return Move("stabilize", int(f[1]), f[2])
        if f[0] == "destabilize" and len(f) == 2:
            return Move("destabilize", int(f[1]))
    except ValueError:
        pass
    raise RecombinationError(f"malformed move {text!r}", "move")


def legal_moves(d: LefschetzDescription, fresh: str) -> list[Move]:
    out = []
    for i in range(d.m - 1):
        out.append(Move("hurwitz-left", i))
        x, a = d.cycles[i], d.cycles[i + 1]
        if x.twists and x.twists[0][0] == a.label:
            out.append(Move("hurwitz-right", i))
    for j in range(d.m + 1):
        out.append(Move("stabilize", j, fresh))
    for j, c in enumerate(d.cycles):
        if (d.certificates[j] and c.bare and c.base in d.fiber.handles
                and not _referenced_elsewhere(d, j)):
            out.append(Move("destabilize", j))
    return out


# verdicts -----------------------------------------------------------------------------

@dataclass
class SHVerdict:
    kind: str  # vanishes | nonvanishes-iff-original | inconclusive
    status: str  # vanishes | nonvanishes | unknown
    rule_chain: list[str]
    audit: CascadeState | None = None
    h_tilde: GradedDims | None = None

    @property
    def audit_agrees(self) -> bool | None:
        if self.audit is None:
            return None
        return self.audit.status == "all-vanish"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "status": self.status, "rule_chain": list(self.rule_chain),
                "h_tilde": None if self.h_tilde is None else str(self.h_tilde),
                "cascade": None if self.audit is None else self.audit.as_dict()}


def sh_verdict(d_original: LefschetzDescription, rho: int, u: UMinusSpec, k: CoeffField,
               audit: bool = True, recombined: LefschetzDescription | None = None) -> SHVerdict:
    """Symplectic cohomology of the rho-recombination of ``d_original`` over k."""
    if rho < 1:
        raise RecombinationError("rho must be positive", "rho")
    h = u_minus_cohomology(u, k)
    original = d_original.status(k)
    pre = ["moore-space-divisibility"] if u.variant == "moore" else []
    if rho == 1 or h.is_zero():
        rules = pre + (["rho-one-deformation-equivalent"] if rho == 1 else
                       ["acyclic-u-minus-rho-independent", "rho-one-deformation-equivalent"])
        kind = "inconclusive" if original == "unknown" else "nonvanishes-iff-original"
        return SHVerdict(kind, original, rules, None, h)
    rules = pre + ["twist-growth-rho>=2", "hull-inequality-violated", "thimble-removal-induction",
                   "empty-fibration-base-case", "sh-vanishes-iff-all-hw-vanish"]
    if u.euler_violated and rho % 2 == 1:
        rules.append("dim-two-odd-rho")
    state = None
    if audit:
        rec = recombined if recombined is not None else recombine(d_original, rho, u)
        state = run_cascade(rec, k)
    return SHVerdict("vanishes", "vanishes", rules, state, h)


# boundary connect sums ---------------------------------------------------------------

@dataclass(frozen=True)
class SHPart:
    """SH dimensions and Frobenius fixed-point counts per characteristic."""

    sh: tuple[tuple[int, GradedDims], ...]
    frobenius: tuple[tuple[int, int], ...] = ()
    ledger: int | None = None

    @classmethod
    def of(cls, sh: dict, frobenius: dict | None = None, ledger: int | None = None):
        return cls(tuple(sorted(sh.items())), tuple(sorted((frobenius or {}).items())), ledger)


def boundary_connect_sum(parts: Sequence[SHPart]) -> SHPart:
    """SH adds degreewise (the connecting 1-handles are subcritical); the
    Frobenius counts multiply, a vanishing part counting once; the ledger adds
    one handle per connection."""
    from .mapping_torus import frobenius_product

    if not parts:
        raise RecombinationError("boundary connect sum of nothing", "parts")
    chars = sorted(set().union(*({c for c, _ in p.sh} for p in parts)))
    sh = {}
    for c in chars:
        acc = GradedDims.zero("Z2")
        for p in parts:
            dims = dict(p.sh).get(c)
            if dims is None:
                raise RecombinationError(f"a part lacks SH data in characteristic {c}", str(c))
            acc = acc + dims.reduce_mod2()
        sh[c] = acc
    frob = {}
    fchars = set().union(*({c for c, _ in p.frobenius} for p in parts))
    for c in sorted(fchars):
        counts = []
        for p in parts:
            fc = dict(p.frobenius).get(c)
            if fc is None:
                if not dict(p.sh)[c].is_zero():
                    raise RecombinationError(f"a part lacks a Frobenius count at {c}", str(c))
                fc = 1
            counts.append(fc)
        frob[c] = frobenius_product(counts)
    ledgers = [p.ledger for p in parts]
    ledger = None if None in ledgers else sum(ledgers) + len(parts) - 1
    return SHPart.of(sh, frob, ledger)
