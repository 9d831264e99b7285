import random

import pytest
from hypothesis import given, settings, strategies as st

from homrecomb import tensor_dga as td
from homrecomb.linalg import QQ, CoeffField
from homrecomb.tensor_dga import (
    DGAError,
    FilteredBimoduleDGA,
    Form,
    Letter,
    Word,
    canonicalize,
    cyclic_complex,
    cyclic_differential,
    diagonal_part,
    extend_differential,
    filtered_acyclicity_check,
    format_dga,
    forms,
    graded_pieces_match,
    parse_dga,
    random_filtered_dga,
    s_map,
    total_complex,
    unit_witness_filtration,
)


def _add(acc, key, val, p):
    v = acc.get(key, 0) + val
    if p:
        v %= p
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def oracle_canonical(g, letters, mark):
    """Rotate one slot at a time until the marked letter leads.

    Moving the leading slot x to the back costs (-1)^{|x| |rest|}, with the
    marked slot carrying one extra degree.
    """
    slots = [(a, g.letters[a].degree + (1 if i == mark else 0)) for i, a in enumerate(letters)]
    marked = [i == mark for i in range(len(letters))]
    sign = 1
    while not marked[0]:
        first_deg = slots[0][1]
        rest = sum(d for _, d in slots[1:])
        if first_deg % 2 and rest % 2:
            sign = -sign
        slots = slots[1:] + slots[:1]
        marked = marked[1:] + marked[:1]
    return sign, Form(slots[0][0], tuple(a for a, _ in slots[1:]))


def oracle_cyclic_differential(g, letters, mark):
    """delta on x1 .. dx_k .. xr as a graded derivation of the whole string,
    with delta(dx) = -d(delta x), then reduced by the slow rotation."""
    p = g.field.characteristic
    degs = [g.letters[a].degree + (1 if i == mark else 0) for i, a in enumerate(letters)]
    out = {}
    before = 0
    for i, a in enumerate(letters):
        koszul = -1 if before % 2 else 1
        pre, post = list(letters[:i]), list(letters[i + 1:])
        for w, coeff in g.gen_diff[a].items():
            img = list(w.letters)
            if i != mark:
                new_mark = mark if mark < i else mark + len(img) - 1
                s, f = oracle_canonical(g, pre + img + post, new_mark)
                _add(out, f, koszul * s * coeff, p)
            else:
                # -d(delta x): d lands on each letter of the image in turn
                inner = 0
                for j in range(len(img)):
                    s, f = oracle_canonical(g, pre + img + post, len(pre) + j)
                    sgn = -1 if inner % 2 else 1
                    _add(out, f, -koszul * sgn * s * coeff, p)
                    inner += g.letters[img[j]].degree
        before += degs[i]
    return out


def dgas(n, seed=0, **kw):
    rng = random.Random(seed)
    return [random_filtered_dga(rng, **kw) for _ in range(n)]


def test_composability_convention():
    g = FilteredBimoduleDGA(2, [Letter("a", 1, 2, 0, 1), Letter("b", 2, 1, 0, 1)], {})
    assert g.composable(Word(1, 1, (1, 0)))  # b a: 1 -> 2 -> 1
    with pytest.raises(DGAError, match="not composable"):
        FilteredBimoduleDGA(2, [Letter("a", 1, 2, 1, 1), Letter("c", 1, 2, 0, 3)],
                            {"c": [(1, ["a", "a"])]})


def test_differential_must_lower_filtration_and_flip_degree():
    with pytest.raises(DGAError, match="filtration"):
        FilteredBimoduleDGA(1, [Letter("a", 1, 1, 0, 1), Letter("b", 1, 1, 1, 1)],
                            {"b": [(1, ["a"])]})
    with pytest.raises(DGAError, match="degree"):
        FilteredBimoduleDGA(1, [Letter("a", 1, 1, 0, 1), Letter("b", 1, 1, 0, 2)],
                            {"b": [(1, ["a"])]})


def test_unit_killer_is_acyclic_and_certified():
    g = FilteredBimoduleDGA(1, [Letter("y", 1, 1, 1, 1)], {"y": [(1, [])]}, QQ, P=6)
    assert unit_witness_filtration(g) == 1
    rep = filtered_acyclicity_check(g, strict=True)
    assert rep.diag_acyclic and rep.total_certified and rep.graded_pieces_ok


def test_broken_leibniz_is_caught():
    g = parse_dga("dga 1\nring 1\nfield F2\ntruncate 6 6\n"
                  "letter a 1 1 0 3\nletter b 1 1 1 2\nletter c 1 1 0 1\n"
                  "a -> 1 b\nb -> 1 c\n")
    assert g.word_str(g.square_zero_witness()) == "a"
    with pytest.raises(DGAError, match="d\\^2"):
        total_complex(g)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(DGAError, match="line 3"):
        parse_dga("dga 1\nring 1\nletter a 1 1 0\n")
    with pytest.raises(DGAError, match="line 1"):
        parse_dga("dga 2\n")


def test_dga_text_roundtrip():
    for g in dgas(10, seed=11):
        h = parse_dga(format_dga(g))
        assert format_dga(h) == format_dga(g)


def test_rotation_oracle_agrees_with_canonicalize():
    for g in dgas(30, seed=5):
        for w in g.words():
            if w.letters and w.source == w.target:
                for mark in range(len(w.letters)):
                    assert canonicalize(g, w.letters, mark) == \
                        oracle_canonical(g, w.letters, mark)


def test_cyclic_differential_matches_rotation_oracle():
    checked = 0
    for g in dgas(40, seed=7):
        for f in forms(g):
            letters = (f.marked,) + f.tail
            assert cyclic_differential(g, f) == oracle_cyclic_differential(g, letters, 0)
            checked += 1
    assert checked > 50


def test_cyclic_differential_is_rotation_invariant():
    """Starting from a rotated representative gives the same answer up to
    the rotation sign, so delta^cycl is well defined on the quotient."""
    for g in dgas(40, seed=9):
        p = g.field.characteristic
        for f in forms(g):
            letters = (f.marked,) + f.tail
            for r in range(1, len(letters)):
                rot = letters[r:] + letters[:r]
                mark = len(letters) - r
                s, canon = oracle_canonical(g, rot, mark)
                assert canon == f
                got = oracle_cyclic_differential(g, rot, mark)
                want = {k: (s * v) % p if p else s * v
                        for k, v in cyclic_differential(g, f).items()}
                assert got == want


def test_s_anticommutes_with_the_differentials():
    """S is odd, so the off-diagonal entry of the total differential squared
    is delta S + S delta^cycl; it must vanish."""
    for g in dgas(40, seed=13):
        p = g.field.characteristic
        words = set(w for w in g.words() if w.source == w.target)
        for f in forms(g):
            lhs = {}
            for w, v in s_map(g, f).items():
                for w2, u in g.apply(w).items():
                    _add(lhs, w2, v * u, p)
            rhs = {}
            for h, v in cyclic_differential(g, f).items():
                for w2, u in s_map(g, h).items():
                    _add(rhs, w2, -v * u, p)
            keep = lambda d: {k: v for k, v in d.items() if k in words}  # noqa: E731
            assert keep(lhs) == keep(rhs)


def test_flipped_s_sign_breaks_d_squared(monkeypatch):
    """The d^2 check has teeth: perturbing a sign in S is detected."""
    original = td.s_map

    def flipped(g, f):
        out = original(g, f)
        return {w: (v if w.letters[:1] == (f.marked,) else -v) for w, v in out.items()}

    monkeypatch.setattr(td, "s_map", flipped)
    failures = 0
    for g in dgas(100, seed=1):
        try:
            total_complex(g)
        except DGAError:
            failures += 1
    assert failures > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_square_zero_on_all_three_complexes(seed):
    g = random_filtered_dga(random.Random(seed))
    for build in (extend_differential, diagonal_part, cyclic_complex, total_complex):
        cx = build(g)
        cx.check_square_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_acyclicity_implication_and_graded_pieces(seed):
    g = random_filtered_dga(random.Random(seed))
    rep = filtered_acyclicity_check(g)
    assert rep.implication_holds
    assert graded_pieces_match(g)
    if rep.diag_acyclic and not rep.vacuous:
        assert rep.total_certified


def test_killer_instances_are_certified():
    certified = 0
    for g in dgas(60, seed=21, killer_prob=1.0):
        rep = filtered_acyclicity_check(g)
        if rep.diag_acyclic:
            assert rep.implication_holds
            certified += bool(rep.total_certified)
    assert certified > 5


def test_truncation_never_changes_low_filtration_homology_claims():
    g = FilteredBimoduleDGA(1, [Letter("y", 1, 1, 1, 1)], {"y": [(CoeffField(3)(1), [])]},
                            CoeffField(3), P=8)
    for P in range(3, 9):
        assert filtered_acyclicity_check(g.with_truncation(P)).implication_holds
