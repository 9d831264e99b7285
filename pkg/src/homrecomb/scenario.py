"""Scenario files, the run/verify pipelines and their reports.

A scenario is a small sectioned text file::

    homrecomb-scenario 1
    id = selective_q6
    [fiber]
    id = M
    complexity = 4
    sh = *:nonvanishes
    [cycles]
    V1 co-disc
    [recombine]
    rho = 2
    u = moore
    q = 6
    n = 6
    [query]
    chars = 0 2 3 5
    rhos = 2 3
    moves = hurwitz 0 right; stabilize 1 S
    [files]
    dga = example.dga

Paths in ``[files]`` are relative to the scenario file.  ``rhos`` defaults
to the recombination's own rho; an optional top-level ``output = path``
names where ``run`` writes its report.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .complexes import ComplexError, GradedDims, IntegralComplex, parse_complex
from .hull import HullError, hull_bound, hull_bound_bruteforce, hull_test, parse_table
from .linalg import CoeffField, LinalgError, is_prime
from .mapping_torus import (
    CIRCLE,
    MappingTorusError,
    e1_page_sh,
    frobenius_count,
    parse_algebra,
    parse_families,
)
from .recombination import (
    STATUSES,
    LefschetzDescription,
    RecombinationError,
    UMinusSpec,
    destabilize,
    hurwitz_move,
    moore_chain_oracle,
    parse_move,
    recombine,
    sh_verdict,
    twist_floer_dims,
    twist_floer_dims_les,
    u_minus_cohomology,
)
from .tensor_dga import DGAError, filtered_acyclicity_check, parse_dga

HEADER = "homrecomb-scenario"
VERSION = 1
SECTIONS = ("fiber", "cycles", "recombine", "query", "files", "truncation")


class ScenarioError(ValueError):
    """Parse or precondition failure; ``line`` and ``obj`` locate it."""

    def __init__(self, message: str, line: int | None = None, obj: str | None = None):
        where = f"line {line}: " if line else ""
        who = f" [{obj}]" if obj else ""
        super().__init__(f"{where}{message}{who}")
        self.line = line
        self.obj = obj


@dataclass
class Scenario:
    id: str
    path: str
    fiber_id: str = "M"
    complexity: int | None = None
    sh_known: dict = field(default_factory=lambda: {"*": "unknown"})
    cycles: list[str] = field(default_factory=list)
    co_disc: list[bool] = field(default_factory=list)
    certificates: list[bool] = field(default_factory=list)
    rho: int | None = None
    u: UMinusSpec | None = None
    chars: list[int] = field(default_factory=list)
    rhos: list[int] = field(default_factory=list)
    output: str | None = None
    moves: list[str] = field(default_factory=list)
    files: dict = field(default_factory=dict)
    P: int | None = None
    N: int | None = None
    lines: dict = field(default_factory=dict)  # key -> line number

    def description(self) -> LefschetzDescription:
        return LefschetzDescription.from_cycles(
            self.fiber_id, self.complexity, self.cycles, self.co_disc, self.sh_known,
            certificates=self.certificates)

    def resolve(self, name: str) -> str:
        return os.path.join(os.path.dirname(os.path.abspath(self.path)), self.files[name])


def _int(value: str, line: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ScenarioError(f"{what} must be an integer, got {value!r}", line) from None


def parse_scenario(text: str, path: str = "<string>") -> Scenario:
    rows = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((n, line))
    if not rows or rows[0][1].split() != [HEADER, str(VERSION)]:
        raise ScenarioError(f"first line must be '{HEADER} {VERSION}'", rows[0][0] if rows else 1)
    sc = Scenario(id=os.path.splitext(os.path.basename(path))[0], path=path)
    section = None
    recomb: dict[str, tuple[str, int]] = {}
    for n, line in rows[1:]:
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ScenarioError(f"unknown section [{section}]", n)
            continue
        if section == "cycles":
            parts = line.split()
            name, flags = parts[0], set(parts[1:])
            unknown = flags - {"co-disc", "no-co-disc", "certificate"}
            if unknown:
                raise ScenarioError(f"unknown cycle flag(s) {sorted(unknown)}", n, name)
            if name in sc.cycles:
                raise ScenarioError(f"duplicate cycle {name}", n, name)
            sc.cycles.append(name)
            sc.co_disc.append("no-co-disc" not in flags)
            sc.certificates.append("certificate" in flags)
            sc.lines[f"cycle:{name}"] = n
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", n)
        key, value = (s.strip() for s in line.split("=", 1))
        sc.lines[f"{section}:{key}"] = n
        if section is None:
            if key == "id":
                sc.id = value
            elif key == "output":
                sc.output = value
            else:
                raise ScenarioError(f"unknown top-level key {key!r}", n)
        elif section == "fiber":
            if key == "id":
                sc.fiber_id = value
            elif key == "complexity":
                sc.complexity = None if value == "unknown" else _int(value, n, "complexity")
            elif key == "sh":
                table = {}
                for item in value.split():
                    if ":" not in item:
                        raise ScenarioError(f"sh entries look like 'char:status', got {item!r}", n)
                    c, st = item.split(":", 1)
                    if st not in STATUSES:
                        raise ScenarioError(f"unknown SH status {st!r}", n)
                    if c != "*":
                        ci = _int(c, n, "characteristic")
                        if ci != 0 and not is_prime(ci):
                            raise ScenarioError(f"characteristic {ci} is not 0 or prime", n)
                    table[c] = st
                sc.sh_known = table
            else:
                raise ScenarioError(f"unknown fiber key {key!r}", n)
        elif section == "recombine":
            recomb[key] = (value, n)
        elif section == "query":
            if key == "chars":
                sc.chars = [_int(v, n, "characteristic") for v in value.split()]
                for c in sc.chars:
                    if c != 0 and not is_prime(c):
                        raise ScenarioError(f"characteristic {c} is not 0 or prime", n)
            elif key == "rhos":
                sc.rhos = [_int(v, n, "rho") for v in value.split()]
                if any(r < 1 for r in sc.rhos):
                    raise ScenarioError("query rhos must be positive", n, "rhos")
            elif key == "moves":
                sc.moves = [m.strip() for m in value.split(";") if m.strip()]
                for m in sc.moves:
                    try:
                        parse_move(m)
                    except RecombinationError as exc:
                        raise ScenarioError(str(exc), n) from None
            else:
                raise ScenarioError(f"unknown query key {key!r}", n)
        elif section == "files":
            if key not in ("dga", "table", "families", "algebra", "complex"):
                raise ScenarioError(f"unknown file kind {key!r}", n)
            sc.files[key] = value
        elif section == "truncation":
            if key not in ("P", "N"):
                raise ScenarioError(f"unknown truncation key {key!r}", n)
            setattr(sc, key, _int(value, n, key))
        else:
            raise ScenarioError("key outside any section", n)
    if recomb:
        _parse_recombine(sc, recomb)
    return sc


def _parse_recombine(sc: Scenario, recomb: dict):
    def get(k, default=None):
        return recomb.get(k, (default, None))

    rho, n_rho = get("rho")
    if rho is None:
        raise ScenarioError("[recombine] needs rho", sc.lines.get("recombine:u"))
    sc.rho = _int(rho, n_rho, "rho")
    if sc.rho < 1:
        raise ScenarioError("rho must be positive", n_rho, "rho")
    variant, n_u = get("u", "moore")
    n_val, n_n = get("n")
    if n_val is None:
        raise ScenarioError("[recombine] needs n", n_u)
    nn = _int(n_val, n_n, "n")
    q_val, n_q = get("q")
    q = _int(q_val, n_q, "q") if q_val is not None else None
    cx = None
    if variant == "explicit":
        if "complex" not in sc.files:
            raise ScenarioError("u = explicit needs a complex file under [files]", n_u)
        try:
            with open(sc.resolve("complex")) as fh:
                cx = parse_complex(fh.read())
        except OSError as exc:
            raise ScenarioError(f"cannot read complex file: {exc}", n_u) from None
        except (ComplexError, LinalgError) as exc:
            raise ScenarioError(f"complex file: {exc}", n_u) from None
        if not isinstance(cx, IntegralComplex):
            raise ScenarioError("explicit U_- complex must be integral", n_u)
    try:
        sc.u = UMinusSpec(variant, nn, q, cx)
    except RecombinationError as exc:
        raise ScenarioError(str(exc), n_q if variant == "moore" else n_u, exc.obj) from None
    for k, (_, line) in recomb.items():
        if k not in ("rho", "u", "q", "n"):
            raise ScenarioError(f"unknown recombine key {k!r}", line)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None
    return parse_scenario(text, path)


# running ------------------------------------------------------------------------------

@dataclass
class Audit:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    scenario: str
    data: dict
    audits: list[Audit]

    @property
    def ok(self) -> bool:
        return all(a.passed for a in self.audits)

    def to_json(self) -> str:
        d = dict(self.data)
        d["audits"] = [{"name": a.name, "passed": a.passed, "detail": a.detail}
                       for a in self.audits]
        return json.dumps(d, indent=2, sort_keys=True)

    def to_text(self) -> str:
        out = [f"scenario {self.scenario}"]
        d = self.data
        if "description" in d:
            desc = d["description"]
            out.append(f"  fibre {desc['fiber']}  cycles {len(desc['cycles'])}  "
                       f"ledger {desc['ledger']}")
        rec = d.get("recombination")
        if rec:
            out.append(f"  recombination rho={rec['rho']} u={rec['u']} n={rec['n']}: "
                       f"{len(rec['cycles'])} cycles, ledger {rec['ledger']['bound']} "
                       f"(+{rec['ledger']['increment']}, cap +{rec['ledger']['cap']})")
        if d.get("queries"):
            out.append(f"  {'char':>5} {'rho':>4}  {'H~(U-)':<14} {'verdict':<26} "
                       f"{'status':<12} cascade")
            for q in d["queries"]:
                out.append(f"  {q['char']:>5} {q['rho']:>4}  {q['h_tilde']:<14} {q['kind']:<26} "
                           f"{q['status']:<12} {q['cascade'] or '-'}")
        if d.get("moves"):
            mv = d["moves"]
            out.append(f"  moves: {'; '.join(mv['applied'])} -> ledger {mv['ledger']}")
        for key in ("dga", "table", "families", "algebra"):
            if key in d:
                out.append(f"  {key}: " + ", ".join(f"{k}={v}" for k, v in sorted(d[key].items())
                                                    if not isinstance(v, (dict, list))))
        for a in self.audits:
            out.append(f"  audit {a.name:<34} {'PASS' if a.passed else 'FAIL'}"
                       + (f"  {a.detail}" if a.detail else ""))
        return "\n".join(out)

    def render(self) -> str:
        return self.to_text() + "\n--- json ---\n" + self.to_json() + "\n"


def _dims(g: GradedDims) -> str:
    return str(g)


def _audit_moves(sc: Scenario, base: LefschetzDescription, audits: list[Audit], data: dict):
    cur = base
    history = []
    for text in sc.moves:
        mv = parse_move(text)
        try:
            nxt = mv.apply(cur)
        except RecombinationError as exc:
            raise ScenarioError(f"move '{text}': {exc}", sc.lines.get("query:moves"), exc.obj) \
                from None
        history.append((mv, cur))
        cur = nxt
    back = cur
    for mv, before in reversed(history):
        back = mv.inverse(before).apply(back)
    audits.append(Audit("move-roundtrip", back == base))
    c = cur.fiber.complexity
    consistent = c is None or cur.ledger.bound == c + len(cur.fiber.handles) + cur.m
    audits.append(Audit("ledger-after-moves", consistent, f"bound {cur.ledger}"))
    audits.append(Audit("moves-keep-deformation-class",
                        cur.deformation_class == base.deformation_class))
    data["moves"] = {"applied": list(sc.moves), "cycles": cur.cycle_strings(),
                     "ledger": cur.ledger.bound, "deformation_class": cur.deformation_class}


def _rho_one_chain(d: LefschetzDescription, u: UMinusSpec) -> bool:
    """Hurwitz moves then cancellations take the rho = 1 output back to d."""
    cur = recombine(d, 1, u)
    for i in range(d.m):
        cur = hurwitz_move(cur, i, "right")
        cur = hurwitz_move(cur, i + 1, "right")
        cur = destabilize(destabilize(cur, i), i)
    return (cur.cycles == d.cycles and cur.fiber == d.fiber
            and cur.co_disc == d.co_disc and cur.ledger.bound == d.ledger.bound)


def _file_sections(sc: Scenario, audits: list[Audit], data: dict, verdicts: bool):
    def read(kind):
        try:
            with open(sc.resolve(kind)) as fh:
                return fh.read()
        except OSError as exc:
            raise ScenarioError(f"cannot read {kind} file: {exc}",
                                sc.lines.get(f"files:{kind}")) from None

    if "dga" in sc.files:
        line = sc.lines.get("files:dga")
        try:
            g = parse_dga(read("dga"))
        except DGAError as exc:
            raise ScenarioError(f"dga file: {exc}", line) from None
        if sc.P is not None or sc.N is not None:
            g = g.with_truncation(sc.P if sc.P is not None else g.P, sc.N)
        wit = g.square_zero_witness()
        audits.append(Audit("dga-d-squared", wit is None,
                            "" if wit is None else f"d^2 != 0 on {g.word_str(wit)}"))
        if wit is None:
            rep = filtered_acyclicity_check(g)
            audits.append(Audit("dga-filtered-acyclicity", rep.implication_holds,
                                f"diag acyclic={rep.diag_acyclic} certified={rep.total_certified}"))
            audits.append(Audit("dga-graded-pieces", rep.graded_pieces_ok))
            entry = {"P": rep.P, "N": rep.N, "diag_acyclic": rep.diag_acyclic,
                     "total_certified": rep.total_certified, "vacuous": rep.vacuous}
            if verdicts:
                entry.update(diag_homology_truncated=str(rep.diag_dims),
                             total_homology_truncated=str(rep.total_dims),
                             length_cap_binds=rep.length_cap_binds)
            data["dga"] = entry
    if "table" in sc.files:
        try:
            t = parse_table(read("table"))
        except HullError as exc:
            raise ScenarioError(f"table file: {exc}", sc.lines.get("files:table")) from None
        if t.m <= 12:
            a, b = hull_bound(t), hull_bound_bruteforce(t)
            audits.append(Audit("hull-dp-vs-bruteforce", a == b, f"{a} vs {b}"))
        if verdicts and t.m:
            v = hull_test(t)
            data["table"] = {"m": t.m, "lhs": v.lhs, "bound": v.bound, "verdict": v.label}
    if "families" in sc.files:
        try:
            fam = parse_families(read("families"))
        except MappingTorusError as exc:
            raise ScenarioError(f"families file: {exc}", sc.lines.get("files:families")) from None
        page = e1_page_sh(fam, CIRCLE)
        periodic = fam.period is not None and fam.dmu not in (None, 0)
        expect = "asserted" if periodic or not fam.families else "not assertable"
        audits.append(Audit("families-finiteness-flag", page.finiteness == expect,
                            page.finiteness))
        if periodic:
            longer = e1_page_sh(fam.extended(len(fam.families) + fam.period), CIRCLE)
            window = [d for d in set(page.totals) | set(longer.totals) if page.is_certified(d)]
            stable = all(page.totals.get(d, 0) == longer.totals.get(d, 0) for d in window)
            audits.append(Audit("families-window-stable", stable, str(page.certified)))
        if verdicts:
            data["families"] = {"finiteness": page.finiteness,
                                "certified": str(page.certified),
                                "totals": {str(k): v for k, v in page.totals.items()
                                           if page.is_certified(k)}}
    if "algebra" in sc.files:
        try:
            alg = parse_algebra(read("algebra"))
        except MappingTorusError as exc:
            raise ScenarioError(f"algebra file: {exc}", sc.lines.get("files:algebra")) from None
        N = frobenius_count(alg)
        audits.append(Audit("frobenius-at-least-two", N >= 2, f"N = {N}"))
        if verdicts:
            data["algebra"] = {"p": alg.p, "d": alg.d, "N": N}


def run_scenario(sc: Scenario, chars: Optional[list[int]] = None, audit: bool = True,
                 verdicts: bool = True) -> Report:
    """The full pipeline; with ``verdicts=False`` only the audits are kept."""
    chars = sc.chars if chars is None else chars
    audits: list[Audit] = []
    data: dict = {"scenario": sc.id, "version": VERSION}
    try:
        base = sc.description()
    except RecombinationError as exc:
        raise ScenarioError(str(exc), None, exc.obj) from None
    data["description"] = {"fiber": str(base.fiber), "cycles": base.cycle_strings(),
                           "ledger": base.ledger.bound}
    rec = None
    if sc.rho is not None:
        u = sc.u
        try:
            rec = recombine(base, sc.rho, u)
        except RecombinationError as exc:
            raise ScenarioError(str(exc), sc.lines.get(f"cycle:{exc.obj}"), exc.obj) from None
        c = base.fiber.complexity
        inc = None if c is None else rec.ledger.bound - c
        data["recombination"] = {
            "rho": sc.rho, "u": str(u), "n": u.n, "cycles": rec.cycle_strings(),
            "ledger": {"bound": rec.ledger.bound, "increment": inc, "cap": 5 * base.m},
            "almost_symplectomorphic_to": rec.almost_symplectomorphic_to,
            "deformation_class": rec.deformation_class,
        }
        if audit:
            audits.append(Audit("ledger-5m-bound", inc is None or inc <= 5 * base.m,
                                f"+{inc} <= +{5 * base.m}"))
            audits.append(Audit("recombined-cycle-count", rec.m == 3 * base.m))
            audits.append(Audit("rho-one-chain-recovers-original", _rho_one_chain(base, u)))
        queries = []
        for p in chars:
            k = CoeffField(p)
            h = u_minus_cohomology(u, k)
            if audit and u.variant == "moore":
                audits.append(Audit(f"moore-oracle[char {p}]", h == moore_chain_oracle(u.q, k)))
            for rho in sc.rhos or [sc.rho]:
                tag = f"char {p}, rho {rho}"
                if audit:
                    les = twist_floer_dims_les(u, k, rho)
                    direct = twist_floer_dims(u, k, rho)
                    audits.append(Audit(f"les-vs-direct-sum[{tag}]", les == direct))
                v = sh_verdict(base, rho, u, k, audit=audit,
                               recombined=rec if rho == sc.rho else None)
                if v.audit is not None:
                    audits.append(Audit(f"cascade-vs-verdict[{tag}]", bool(v.audit_agrees),
                                        v.audit.status))
                queries.append({"char": p, "rho": rho, "h_tilde": _dims(h),
                                "twist_dims": _dims(twist_floer_dims(u, k, rho)),
                                "kind": v.kind, "status": v.status,
                                "rule_chain": v.rule_chain,
                                "cascade": None if v.audit is None else v.audit.status})
        if verdicts:
            data["queries"] = queries
        if sc.moves:
            _audit_moves(sc, rec, audits, data)
    elif sc.moves:
        _audit_moves(sc, base, audits, data)
    if audit or verdicts:
        _file_sections(sc, audits, data, verdicts)
    if not verdicts:
        data.pop("queries", None)
        data = {k: v for k, v in data.items() if k in ("scenario", "version")}
    return Report(sc.id, data, audits)


def run(path: str, chars=None, audit: bool = True, P=None, N=None,
        output: str | None = None) -> Report:
    """Run a scenario; the report is written to ``output`` (or the scenario's
    own ``output`` key) when one is given, and returned either way."""
    sc = load_scenario(path)
    if P is not None:
        sc.P = P
    if N is not None:
        sc.N = N
    rep = run_scenario(sc, chars, audit, verdicts=True)
    dest = output or sc.output
    if dest:
        with open(dest, "w") as fh:
            fh.write(rep.render())
    return rep


def verify(path: str, P=None, N=None) -> Report:
    sc = load_scenario(path)
    if P is not None:
        sc.P = P
    if N is not None:
        sc.N = N
    return run_scenario(sc, None, audit=True, verdicts=False)


def fixture_dir() -> str:
    return os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_paths() -> list[str]:
    d = fixture_dir()
    return sorted(os.path.join(d, f) for f in os.listdir(d) if f.endswith(".scn"))
