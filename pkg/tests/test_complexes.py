import random

import pytest
from hypothesis import given, settings, strategies as st

from homrecomb.complexes import (
    AbelianGroup,
    ComplexError,
    FieldComplex,
    GradedDims,
    IntegralComplex,
    IntegralHomology,
    complex_from_matrices,
    direct_sum,
    format_complex,
    homology,
    integral_homology,
    les_dimension_split,
    parse_complex,
    uniquely_p_divisible,
    universal_coefficients,
)
from homrecomb.linalg import QQ, ZZ, CoeffField, ExactMatrix, smith_normal_form

CHARS = [0, 2, 3, 5, 7]


def _unimodular(n, rng, steps=6):
    """A random unimodular matrix and its inverse, as row lists."""
    a = [[int(i == j) for j in range(n)] for i in range(n)]
    inv = [row[:] for row in a]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        k = rng.choice([-2, -1, 1, 2])
        for c in range(n):  # row_i += k row_j on a
            a[i][c] += k * a[j][c]
        for r in range(n):  # col_j -= k col_i on the inverse
            inv[r][j] -= k * inv[r][i]
    return a, inv


def _invariant_factors(torsion):
    """Z/3 + Z/4 and Z/12 are the same group; compare in invariant-factor form."""
    if not torsion:
        return ()
    diag = ExactMatrix.from_triplets(len(torsion), len(torsion), ZZ,
                                     [(i, i, t) for i, t in enumerate(torsion)])
    return tuple(t for t in smith_normal_form(diag).divisors if t > 1)


def random_integral_complex(seed, top=3):
    """Elementary pieces Z -t-> Z scrambled by unimodular changes of basis.

    Returns the complex and its integral cohomology computed by hand.
    """
    rng = random.Random(seed)
    gens = {d: [] for d in range(top + 1)}  # per degree: list of (partner, t)
    expected = {d: [0, []] for d in range(top + 1)}
    for _ in range(rng.randint(1, 6)):
        d = rng.randint(0, top)
        if d < top and rng.random() < 0.6:
            t = rng.choice([1, 2, 3, 4, 6, 9])
            gens[d].append((len(gens[d + 1]), t))
            gens[d + 1].append(None)
            if t > 1:
                expected[d + 1][1].append(t)
        else:
            gens[d].append(None)
            expected[d][0] += 1
    dims = {d: len(v) for d, v in gens.items()}
    change = {d: _unimodular(dims[d], rng) for d in gens if dims[d]}
    diffs = {}
    for d in range(top):
        if not dims[d] or not dims[d + 1]:
            continue
        trip = [(partner, j, t) for j, g in enumerate(gens[d]) if g is not None
                for partner, t in [g]]
        core = ExactMatrix.from_triplets(dims[d + 1], dims[d], ZZ, trip)
        P = ExactMatrix.from_rows(change[d + 1][0], ZZ)
        Q = ExactMatrix.from_rows(change[d][1], ZZ)
        diffs[d] = P @ core @ Q
    cx = IntegralComplex("Z", dims, diffs)
    groups = {d: AbelianGroup(f, _invariant_factors(t)) for d, (f, t) in expected.items()}
    return cx, IntegralHomology.of(groups)


def test_moore_complex_torsion():
    cx = complex_from_matrices("Z", {0: 1, 1: 1, 2: 1}, {0: [[0]], 1: [[6]]}, ZZ)
    h = integral_homology(cx)
    assert h[0].free_rank == 1 and h[1].is_trivial() and h[2].torsion == (6,)
    assert universal_coefficients(h, CoeffField(2)) == GradedDims.of({0: 1, 1: 1, 2: 1})
    assert universal_coefficients(h, CoeffField(5)) == GradedDims.of({0: 1})
    assert universal_coefficients(h, CoeffField(0)) == GradedDims.of({0: 1})
    assert not uniquely_p_divisible(h, 3)


def test_z2_graded_complex_wraps_degrees():
    cx = complex_from_matrices("Z2", {0: 1, 1: 1}, {0: [[2]], 1: [[0]]}, ZZ)
    h = integral_homology(cx)
    assert h[1].torsion == (2,) and h[3].torsion == (2,)
    assert universal_coefficients(h, CoeffField(2)) == GradedDims.of({0: 1, 1: 1}, "Z2")
    with pytest.raises(ComplexError):
        complex_from_matrices("Z2", {0: 1, 2: 1}, {}, ZZ)


def test_square_zero_is_enforced():
    with pytest.raises(ComplexError, match="d\\^2"):
        complex_from_matrices("Z", {0: 1, 1: 1, 2: 1}, {0: [[1]], 1: [[1]]}, ZZ)


def test_les_split_shift_and_guard():
    left = GradedDims.of({5: 1})
    middle = GradedDims.of({1: 2})
    assert les_dimension_split(left, middle, 3) == GradedDims.of({1: 2, 4: 1})
    with pytest.raises(ComplexError):
        les_dimension_split(GradedDims.of({2: 1}), middle, 3)


def test_graded_dims_shift_convention():
    h = GradedDims.of({3: 1})
    assert h.shift(1)[2] == 1  # X[1]^d = X^{d+1}
    assert h.shift(-1)[4] == 1


def test_complex_text_roundtrip_and_errors():
    cx, _ = random_integral_complex(5)
    assert parse_complex(format_complex(cx)) == cx
    with pytest.raises(ComplexError, match="line 1"):
        parse_complex("cochains Z 0 1 Z\n")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_integral_homology_recovers_scrambled_pieces(seed):
    cx, expected = random_integral_complex(seed)
    h = integral_homology(cx)
    for d in range(4):
        assert h[d] == expected[d]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(CHARS))
def test_universal_coefficients_match_field_homology(seed, p):
    cx, _ = random_integral_complex(seed)
    k = CoeffField(p)
    assert universal_coefficients(cx, k) == homology(cx.over(k))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.sampled_from(CHARS))
def test_homology_is_additive(s1, s2, p):
    k = CoeffField(p)
    a = random_integral_complex(s1)[0].over(k)
    b = random_integral_complex(s2)[0].over(k)
    assert homology(direct_sum(a, b)) == homology(a) + homology(b)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_euler_characteristic_is_field_independent(seed):
    cx, _ = random_integral_complex(seed)
    chain_euler = sum((-1) ** d * n for d, n in cx.dims.items())
    for p in CHARS:
        assert homology(cx.over(CoeffField(p))).euler_characteristic() == chain_euler


def test_field_complex_ring_mismatch():
    m = ExactMatrix.from_rows([[1]], CoeffField(3))
    with pytest.raises(ComplexError):
        FieldComplex("Z", {0: 1, 1: 1}, {0: m}, field=QQ)
