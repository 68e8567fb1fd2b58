import time
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from rootdistiller.distiller import (
    FilterParams,
    bracket_sign_changes,
    dedup_union,
    distill,
    error_estimate,
    error_filter,
    filter_near_bisector,
    platform_representative,
    residual_filter,
)
from rootdistiller.educated_map import MapConfig, educated_g
from rootdistiller.grid_sampler import SampleList, is_invariant, sample_map, uniform_mesh
from rootdistiller.mpcontext import make_context, to_decimal
from rootdistiller.oracle import chebyshev_roots
from rootdistiller.polynomial import ExactPolynomial, Polynomial, chebyshev_T, round_coeffs

from _util import frac

T4_ROOTS = ["-0.92387953", "-0.38268343", "0.38268343", "0.92387953"]


def t4(k=3, prec=8):
    ctx = make_context(prec)
    f = round_coeffs(chebyshev_T(4), ctx)
    cfg = MapConfig(f, ctx.real(-1), ctx.real(1), k)
    mesh = uniform_mesh(cfg.a, cfg.b, ctx.real("0.1"))
    return ctx, cfg, mesh


def pts(ctx, *pairs):
    return [(ctx.real(x), ctx.real(y)) for x, y in pairs]


def exact_table_brackets(cfg, mesh, c="0.1"):
    """Bracket count from exact Newton iterates (mpmath, 80 digits) with the same rules."""
    mp = mpmath.MPContext()
    mp.dps = 80
    coeffs = [mp.mpf(frac(v).numerator) / frac(v).denominator for v in cfg.f.coeffs]
    dcoeffs = [i * c_ for i, c_ in enumerate(coeffs)][1:]

    def ev(cs, x):
        acc = mp.zero
        for cc in reversed(cs):
            acc = acc * x + cc
        return acc

    a, b = (mp.mpf(frac(v).numerator) / frac(v).denominator for v in (cfg.a, cfg.b))
    data1 = []
    for node in mesh.nodes:
        x = mp.mpf(frac(node).numerator) / frac(node).denominator
        y = x
        for _ in range(cfg.k + 1):
            d = ev(dcoeffs, y)
            if d == 0:
                y = None
                break
            y = y - ev(coeffs, y) / d
        if y is None or y < a or y > b or abs(y - x) > b - a:
            continue
        if (y - x) ** 2 < mp.mpf(c):
            data1.append((x, y))
    return sum(1 for p, q in zip(data1, data1[1:]) if (p[1] - p[0]) * (q[1] - q[0]) < 0)


def test_filter_params_defaults_and_validation():
    ctx = make_context(8)
    p = FilterParams.defaults(ctx)
    assert p.bisector_c == ctx.real("0.1")
    assert p.dedup_tol == ctx.real("1e-8")
    assert p.error_tol == ctx.real("1e-7")
    assert p.residual_threshold == ctx.real("1e-4")
    assert FilterParams.defaults(ctx, error_tol="1e-3").error_tol == ctx.real("1e-3")
    with pytest.raises(ValueError):
        FilterParams.defaults(ctx, dedup_tol="0")
    with pytest.raises(ValueError):
        FilterParams.defaults(ctx, bisector_c="-1")


def test_filter_near_bisector_examples():
    ctx = make_context(8)
    c = ctx.real("0.1")
    L = SampleList(((ctx.real("0.5"), ctx.real("0.5")), (ctx.real(0), ctx.real("0.9")), (ctx.real(1), None)))
    kept = filter_near_bisector(L, c)
    assert kept == [(ctx.real("0.5"), ctx.real("0.5"))]


def test_every_t4_platform_reaches_the_bisector():
    ctx, cfg, mesh = t4()
    data1 = filter_near_bisector(sample_map(cfg, mesh), ctx.real("0.1"))
    for r in T4_ROOTS:
        assert any(abs(y - ctx.real(r)) < ctx.real("1e-4") for _, y in data1)


def test_bracket_examples():
    ctx = make_context(8)
    assert len(bracket_sign_changes(pts(ctx, ("0.3", "0.4"), ("0.5", "0.4")))) == 1
    assert bracket_sign_changes(pts(ctx, ("0.3", "0.35"), ("0.5", "0.55"))) == []


@pytest.mark.parametrize("k", [3, 4, 10])
def test_t4_bracket_count_matches_exact_iterates(k):
    # besides one crossing per platform, jumps between platforms flip the sign of y - x too
    ctx, cfg, mesh = t4(k)
    data2 = bracket_sign_changes(filter_near_bisector(sample_map(cfg, mesh), ctx.real("0.1")))
    expected = exact_table_brackets(cfg, mesh)
    assert len(data2) == expected == 7


def test_dedup_examples():
    ctx = make_context(8)
    br = lambda ys: [((ctx.real(0), ctx.real(y1)), (ctx.real(1), ctx.real(y2))) for y1, y2 in ys]
    out = dedup_union(br([("0.38268343", "0.38268343"), ("0.92387953", "0.38268343")]), ctx.real("1e-8"))
    assert [to_decimal(v) for v in out] == ["0.38268343", "0.92387953"]
    ctx12 = make_context(12)
    half = ctx12.real("0.5")
    out = dedup_union([((half, half), (half, half + ctx12.real("1e-9")))], ctx12.real("1e-8"))
    assert len(out) == 1 and out[0] == half


def test_dedup_keeps_first_of_cluster():
    ctx = make_context(12)
    vals = ["0.1", "0.1000000000005", "0.1000000000009", "0.3"]
    data2 = [((ctx.real(0), ctx.real(v)), (ctx.real(0), ctx.real(v))) for v in reversed(vals)]
    out = dedup_union(data2, ctx.real("1e-12"))
    assert out == [ctx.real("0.1"), ctx.real("0.3")]


def test_t4_union_has_four_values():
    ctx, cfg, mesh = t4(3)
    data2 = bracket_sign_changes(filter_near_bisector(sample_map(cfg, mesh), ctx.real("0.1")))
    assert len(dedup_union(data2, ctx.real("1e-8"))) == 4


def test_t4_union_once_stationary():
    for k in (4, 5, 10):
        ctx, cfg, mesh = t4(k)
        data2 = bracket_sign_changes(filter_near_bisector(sample_map(cfg, mesh), ctx.real("0.1")))
        assert [to_decimal(v) for v in dedup_union(data2, ctx.real("1e-8"))] == T4_ROOTS


def test_residual_examples():
    ctx = make_context(8)
    lin = Polynomial.from_strings(["0", "1"], ctx)
    thr = ctx.real("1e-8")
    assert residual_filter([ctx.real(0)], lin, thr) == [ctx.real(0)]
    assert residual_filter([ctx.real(1)], lin, thr) == []
    # absolute value: a root approached from below (negative residual) is kept
    quad = Polynomial.from_strings(["-2", "0", "1"], ctx)
    below = ctx.real("1.41421356")
    assert (quad(below)).sign() < 0
    assert residual_filter([below], quad, ctx.real("1e-6")) == [below]


def test_error_estimate_examples():
    ctx = make_context(30)
    quad = Polynomial.from_strings(["-1", "0", "1"], ctx)
    cfg = MapConfig(quad, ctx.real(0), ctx.real(2), 0)
    assert error_estimate(cfg, ctx.real(1)) == 0
    y = 1 + ctx.real("1e-4")
    eps = frac(y) - 1
    # one Newton step from 1 + eps lands at 1 + eps**2 / (2 (1 + eps))
    expected = eps**2 / (2 * (1 + eps)) - eps
    got = frac(error_estimate(cfg, y))
    assert abs(got - expected) <= abs(expected) * Fraction(1, 10**28)
    assert abs(got + Fraction(1, 10**4)) < Fraction(1, 10**8)
    assert error_estimate(cfg, ctx.real(0)) is None


def test_error_filter_examples():
    ctx = make_context(30)
    quad = Polynomial.from_strings(["-1", "0", "1"], ctx)
    cfg = MapConfig(quad, ctx.real(0), ctx.real(2), 0)
    tol = ctx.real("1e-20")
    kept = error_filter([ctx.real(1)], cfg, tol)
    assert len(kept) == 1 and kept[0].error_estimate == 0 and kept[0].residual == 0
    y = 1 + ctx.real("1e-6")
    err = abs(error_estimate(cfg, y))
    assert error_filter([y], cfg, err / 2) == []
    assert len(error_filter([y], cfg, err * 2)) == 1
    assert error_filter([ctx.real(0)], cfg, tol) == []  # estimate unavailable


def test_t4_error_filter_keeps_four():
    ctx, cfg, mesh = t4(3)
    report = distill(cfg, mesh, FilterParams.defaults(ctx, error_tol="1e-8"))
    assert len(report.roots) == 4


def test_platform_representative_examples():
    ctx, cfg, mesh = t4(3)
    reps = platform_representative(sample_map(cfg, mesh))
    assert [to_decimal(v) for v in reps] == T4_ROOTS


def test_platform_representative_on_stationary_t4():
    for k in (4, 5, 10, 11):
        ctx, cfg, mesh = t4(k)
        assert [to_decimal(v) for v in platform_representative(sample_map(cfg, mesh))] == T4_ROOTS


def test_platform_representative_trivial_cases():
    ctx = make_context(8)
    lin = Polynomial.from_strings(["-0.25", "1"], ctx)
    cfg = MapConfig(lin, ctx.real(-1), ctx.real(1), 0)
    L = sample_map(cfg, uniform_mesh(cfg.a, cfg.b, ctx.real("0.25")))
    assert platform_representative(L) == [ctx.real("0.25")]
    assert platform_representative(SampleList(((ctx.real(0), None), (ctx.real(1), None)))) == []


def test_distill_t4():
    ctx, cfg, mesh = t4(3)
    t0 = time.perf_counter()
    report = distill(cfg, mesh)
    assert time.perf_counter() - t0 < 1.0
    assert [to_decimal(r.root) for r in report.roots] == T4_ROOTS
    oracle = chebyshev_roots(4, cfg.a, cfg.b, make_context(16))
    for r, o in zip(report.roots, oracle):
        assert abs(frac(r.root) - frac(o.value)) < Fraction(1, 10**8)
    assert report.stage_counts == {
        "nodes": 21, "data": 18, "data1": 16, "data2": 7, "union": 6, "finalA": 4, "final": 4,
    }


def check_report_invariants(report, cfg, mesh):
    params = report.params
    roots = [r.root for r in report.roots]
    assert all(a < b and b - a > params.dedup_tol for a, b in zip(roots, roots[1:]))
    c = report.stage_counts
    assert c["union"] >= c["finalA"] >= c["final"] == len(report.roots)
    L = dict((frac(x), y) for x, y in report.samples)
    for r in report.roots:
        # soundness, recomputed directly
        assert abs(cfg.evaluate(cfg.f, r.root)) < params.residual_threshold
        assert abs(educated_g(cfg, r.root) - r.root) < params.error_tol
        assert r.residual < params.residual_threshold and abs(r.error_estimate) < params.error_tol
        # bracket validity against the sampled table
        x1, x2 = r.bracket
        assert x1 < x2
        y1, y2 = L[frac(x1)], L[frac(x2)]
        assert ((y1 - x1) * (y2 - x2)).sign() < 0


def test_report_invariants_t4_and_t40():
    for k in (3, 4, 10):
        ctx, cfg, mesh = t4(k)
        report = distill(cfg, mesh)
        check_report_invariants(report, cfg, mesh)
    ctx = make_context(8)
    cfg = MapConfig(round_coeffs(chebyshev_T(40), ctx), ctx.real(-1), ctx.real(1), 6)
    mesh = uniform_mesh(cfg.a, cfg.b, ctx.real("0.01"))
    check_report_invariants(distill(cfg, mesh), cfg, mesh)


def test_bracket_spans_adjacent_retained_nodes():
    # brackets join neighbours in data1, so a filtered node in between widens them beyond h
    ctx, cfg, mesh = t4(3)
    widths = {frac(r.bracket[1] - r.bracket[0]) for r in distill(cfg, mesh).roots}
    assert all(w >= frac(mesh.h) * Fraction(99, 100) for w in widths)


@pytest.mark.parametrize("k", [4, 10, 12, 13])
def test_two_variants_agree_on_stationary_samples(k):
    ctx, cfg, mesh = t4(k)
    assert is_invariant(cfg, mesh, ctx.real("1e-7"))
    report = distill(cfg, mesh)
    reps = platform_representative(report.samples)
    assert len(reps) == len(report.roots)
    for a, b in zip(reps, (r.root for r in report.roots)):
        assert abs(a - b) <= report.params.dedup_tol


def rational_roots_poly(roots, ctx):
    exact = ExactPolynomial.from_roots(roots)
    return Polynomial(tuple(ctx.real(c) for c in exact.coeffs), ctx)


# roots kept off the mesh: a node exactly at a root has y - x = 0 and yields no strict sign change
@pytest.mark.parametrize("roots", [
    [Fraction(-4, 9), Fraction(1, 3)],
    [Fraction(-7, 9), Fraction(1, 7), Fraction(5, 7)],
    [Fraction(-5, 6), Fraction(-1, 3), Fraction(1, 6), Fraction(2, 3)],
])
def test_idempotence_around_each_root(roots):
    ctx = make_context(30)
    f = rational_roots_poly(roots, ctx)
    cfg = MapConfig(f, ctx.real(-1), ctx.real(1), 6)
    h = ctx.real("0.05")
    report = distill(cfg, uniform_mesh(cfg.a, cfg.b, h))
    assert len(report.roots) == len(roots)
    for r in report.roots:
        sub = MapConfig(f, r.root - h, r.root + h, cfg.k)
        # three cells, so the root itself is not a node (a node at the root gives no sign change)
        again = distill(sub, uniform_mesh(sub.a, sub.b, h * 2 / 3))
        assert any(abs(s.root - r.root) <= report.params.dedup_tol for s in again.roots)


def test_root_on_a_mesh_node_is_not_bracketed():
    ctx = make_context(30)
    f = rational_roots_poly([Fraction(1, 2)], ctx)
    cfg = MapConfig(f, ctx.real(0), ctx.real(1), 4)
    on = distill(cfg, uniform_mesh(cfg.a, cfg.b, ctx.real("0.25")))
    off = distill(cfg, uniform_mesh(cfg.a, cfg.b, ctx.real("0.2")))
    assert on.roots == []
    assert [r.root for r in off.roots] == [ctx.real("0.5")]


def test_empty_result_is_a_valid_report():
    ctx = make_context(8)
    f = Polynomial.from_strings(["1", "0", "1"], ctx)  # x**2 + 1: no real roots
    cfg = MapConfig(f, ctx.real(-1), ctx.real(1), 3)
    report = distill(cfg, uniform_mesh(cfg.a, cfg.b, ctx.real("0.1")))
    assert report.roots == []
    assert report.to_dict()["root_count"] == 0


def test_report_json_shape():
    ctx, cfg, mesh = t4(3)
    d = distill(cfg, mesh).to_dict({"k": 3})
    assert set(d) == {"roots", "root_count", "stage_counts", "map", "filter", "mesh", "config"}
    assert d["roots"][0]["root"] == "-0.92387953"
    assert d["map"]["order"] == "16"
    assert d["mesh"]["nodes"] == 21


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-90, 90), min_size=1, max_size=6, unique=True), st.integers(20, 40))
def test_soundness_on_random_known_roots(nums, digits):
    ctx = make_context(digits)
    roots = [Fraction(n, 100) for n in nums]
    f = rational_roots_poly(roots, ctx)
    cfg = MapConfig(f, ctx.real(-1), ctx.real(1), 6)
    mesh = uniform_mesh(cfg.a, cfg.b, ctx.real("0.01"))
    report = distill(cfg, mesh)
    check_report_invariants(report, cfg, mesh)
