"""Tests for H, G, sheet-aware inversion and the maps psi1, psi2."""

import cmath

import numpy as np
import pytest

from src.exceptions import BranchPointError, OnCutError, PoleError
from src.maps import (
    CURVE_CACHE_SIZE,
    _trace,
    cubic_coeffs,
    eval_G,
    eval_H,
    eval_H_prime,
    extract_laurent,
    invert_G,
    mobius_constant,
    near_branch_point,
    preimages,
    psi1,
    psi2,
    psi_from_root,
    psi_user,
    symmetric_cubic_coeffs,
    trace_branch_curves,
    winding_number,
    winding_numbers,
)
from src.models import INFINITY, IntervalPair, SurfacePoint
from src.solver import continuation_solve
from src.surface import normalize_intervals


@pytest.fixture(scope="module")
def sol():
    # lambda = 2, mu = 5: slits [-5, -1] and [1, 2]
    return continuation_solve(IntervalPair(2.0, 5.0))


@pytest.fixture(scope="module")
def symmetric_sol():
    return continuation_solve(IntervalPair(2.0, 2.0))


def _random_w(n, seed):
    rng = np.random.default_rng(seed)
    re = rng.uniform(-6.0, 3.0, n)
    im = rng.uniform(0.05, 3.0, n) * rng.choice([-1.0, 1.0], n)
    return re + 1j * im


def _near_axis_w(n, seed):
    rng = np.random.default_rng(seed)
    re = rng.uniform(-6.0, 3.0, n)
    im = 10.0 ** rng.uniform(-6.0, np.log10(7.0), n) * rng.choice([-1.0, 1.0], n)
    return re + 1j * im


class TestEvalH:
    def test_poles_raise(self, sol):
        for z in (1.0, -1.0, complex(1.0, 0.0)):
            with pytest.raises(PoleError):
                eval_H(sol, z)
            with pytest.raises(PoleError):
                eval_H_prime(sol, z)

    def test_value_at_a(self, sol):
        assert eval_H(sol, sol.crit.a) == pytest.approx(sol.coeffs.H_at_a, rel=1e-12)
        assert eval_G(sol, sol.crit.a) == pytest.approx(1.0, rel=1e-12)

    def test_critical_values_are_branch_points(self, sol):
        for z, t in zip(sol.crit.as_tuple(), sol.intervals.branch_points()):
            assert eval_G(sol, z).real == pytest.approx(t, rel=1e-9)

    def test_derivative_forms_agree(self, sol):
        for z in (0.3 + 0.7j, -2.5 - 1.0j, 4.0, -0.2j):
            additive = eval_H_prime(sol, z)
            factored = eval_H_prime(sol, z, form="factored")
            assert abs(additive - factored) < 1e-11 * max(1.0, abs(additive))

    def test_derivative_at_zero(self, sol):
        assert eval_H_prime(sol, 0.0) == pytest.approx(1 + sol.coeffs.A + sol.coeffs.B, abs=1e-14)

    def test_derivative_vanishes_at_critical_points(self, sol):
        for z in sol.crit.as_tuple():
            assert abs(eval_H_prime(sol, z)) < 1e-11

    def test_unknown_form_raises(self, sol):
        with pytest.raises(ValueError):
            eval_H_prime(sol, 0.5, form="product")


class TestCubic:
    def test_roots_solve_g(self, sol):
        w = 0.7 - 0.4j
        c2, c1, c0 = cubic_coeffs(sol, w)
        for z in np.roots([1.0, c2, c1, c0]):
            assert abs(eval_G(sol, z) - w) < 1e-10

    def test_symmetric_form_matches(self, symmetric_sol):
        a = symmetric_sol.crit.a
        for w in (0.5, -3.0 + 1.0j, 2.0j):
            general = cubic_coeffs(symmetric_sol, w)
            special = symmetric_cubic_coeffs(a, w)
            assert np.allclose(general, special, rtol=1e-10, atol=1e-12)


class TestWinding:
    SQUARE = np.array([0, 1, 1 + 1j, 1j, 0], dtype=complex)

    def test_inside_and_outside(self):
        assert winding_number(0.5 + 0.5j, self.SQUARE) == 1
        assert winding_number(2.0 + 0.5j, self.SQUARE) == 0
        assert winding_number(0.5 - 0.5j, self.SQUARE) == 0

    def test_reversed_orientation(self):
        assert winding_number(0.5 + 0.5j, self.SQUARE[::-1]) == -1

    def test_vectorized(self):
        counts = winding_numbers(np.array([0.5 + 0.5j, 3.0, 0.25 + 0.75j]), self.SQUARE)
        assert list(counts) == [1, 0, 1]


class TestBranchCurves:
    def test_curves_enclose_poles(self, sol):
        regions = trace_branch_curves(sol)
        assert abs(winding_number(-1.0, regions.curve0)) == 1
        assert abs(winding_number(1.0, regions.curve2)) == 1
        assert winding_number(1.0, regions.curve0) == 0
        assert winding_number(-1.0, regions.curve2) == 0

    def test_curves_pass_through_critical_points(self, sol):
        regions = trace_branch_curves(sol)
        mid = len(regions.curve0) // 2
        assert regions.curve0[0] == sol.crit.beta
        assert regions.curve0[mid] == sol.crit.alpha
        assert regions.curve2[0] == sol.crit.a
        assert regions.curve2[len(regions.curve2) // 2] == sol.crit.b

    def test_curves_map_onto_slits(self, sol):
        regions = trace_branch_curves(sol, 128)
        for curve, (left, right) in ((regions.curve0, (-5.0, -1.0)), (regions.curve2, (1.0, 2.0))):
            values = np.array([eval_G(sol, z) for z in curve])
            assert np.max(np.abs(values.imag)) < 1e-8
            assert np.all(values.real > left - 1e-8)
            assert np.all(values.real < right + 1e-8)

    def test_conjugate_symmetry(self, sol):
        regions = trace_branch_curves(sol)
        for curve in (regions.curve0, regions.curve2):
            assert np.array_equal(curve, np.conj(curve[::-1]))

    def test_symmetric_curves_mirror(self, symmetric_sol):
        regions = trace_branch_curves(symmetric_sol)
        left = np.sort_complex(regions.curve0[:-1])
        right = np.sort_complex(-regions.curve2[:-1])
        assert np.allclose(left, right, atol=1e-9)

    def test_low_resolution_raises(self, sol):
        with pytest.raises(ValueError):
            trace_branch_curves(sol, 32)

    def test_memoized(self, sol):
        assert trace_branch_curves(sol, 128) is trace_branch_curves(sol, 128)

    def test_memo_is_bounded(self, sol):
        for resolution in range(64, 64 + CURVE_CACHE_SIZE + 4):
            trace_branch_curves(sol, resolution)
        assert _trace.cache_info().currsize == CURVE_CACHE_SIZE


class TestPreimages:
    @pytest.mark.parametrize("w", [-10.0, -0.5, 0.0, 0.5, 10.0])
    def test_real_points_off_slits(self, sol, w):
        beta, alpha, a, b = sol.crit.as_tuple()
        roots = preimages(sol, w)
        z0, z1, z2 = (roots[s].z for s in (0, 1, 2))
        assert all(z.imag == 0.0 for z in (z0, z1, z2))
        assert beta < z0.real < alpha
        assert a < z2.real < b
        assert not (beta <= z1.real <= alpha or a <= z1.real <= b)
        for z in (z0, z1, z2):
            assert abs(eval_G(sol, z) - w) < 1e-10 * max(1.0, abs(w))

    def test_on_slit_without_bank_raises(self, sol):
        with pytest.raises(OnCutError):
            preimages(sol, -3.0)
        with pytest.raises(OnCutError):
            preimages(sol, 1.5)

    @pytest.mark.parametrize("w", [-3.0, 1.5])
    @pytest.mark.parametrize("bank,sign", [("upper", 1.0), ("lower", -1.0)])
    def test_banks_are_limits_from_each_side(self, sol, w, bank, sign):
        on_cut = preimages(sol, w, bank=bank)
        nearby = preimages(sol, complex(w, sign * 1e-10))
        for s in (0, 1, 2):
            assert abs(on_cut[s].z - nearby[s].z) < 1e-6, s

    def test_banks_swap_the_glued_sheets(self, sol):
        upper = preimages(sol, -3.0, bank="upper")
        lower = preimages(sol, -3.0, bank="lower")
        assert upper[0].z == lower[1].z
        assert upper[1].z == lower[0].z
        assert upper[2].z == lower[2].z
        assert upper[1].z.imag > 0.0

    def test_branch_point_merges_sheets(self, sol):
        roots = preimages(sol, 1.0)
        assert roots[1].z == roots[2].z == sol.crit.a
        assert roots[1].multiplicity == roots[2].multiplicity == 2
        assert roots[0].multiplicity == 1
        assert sol.crit.beta < roots[0].z.real < sol.crit.alpha
        assert eval_G(sol, roots[0].z) == pytest.approx(1.0, abs=1e-10)

    def test_near_branch_point(self, sol):
        assert near_branch_point(sol, -5.0) == -5.0
        assert near_branch_point(sol, 2.0 + 1e-13) == 2.0
        assert near_branch_point(sol, 1.0 + 1e-6) is None

    def test_infinity(self, sol):
        roots = preimages(sol, INFINITY)
        assert roots[0].z == -1.0
        assert cmath.isinf(roots[1].z)
        assert roots[2].z == 1.0


class TestInvertG:
    def test_round_trip_on_every_sheet(self, sol):
        regions = trace_branch_curves(sol)
        for w in _random_w(1000, seed=11):
            zs = [invert_G(sol, SurfacePoint(w, s), regions=regions) for s in (0, 1, 2)]
            for z in zs:
                assert abs(eval_G(sol, z) - w) < 1e-10 * max(1.0, abs(w))
            assert min(abs(zs[0] - zs[1]), abs(zs[1] - zs[2]), abs(zs[0] - zs[2])) > 1e-6

    def test_regions(self, sol):
        regions = trace_branch_curves(sol)
        for w in _random_w(50, seed=12):
            z0 = invert_G(sol, SurfacePoint(w, 0))
            z1 = invert_G(sol, SurfacePoint(w, 1))
            z2 = invert_G(sol, SurfacePoint(w, 2))
            assert winding_number(z0, regions.curve0) != 0
            assert winding_number(z2, regions.curve2) != 0
            assert winding_number(z1, regions.curve0) == 0
            assert winding_number(z1, regions.curve2) == 0

    def test_continuous_across_real_axis_off_slits(self, sol):
        for x in (-7.0, 0.0, 0.8, 4.0):
            for s in (0, 1, 2):
                above = invert_G(sol, SurfacePoint(complex(x, 1e-9), s))
                below = invert_G(sol, SurfacePoint(complex(x, -1e-9), s))
                exact = invert_G(sol, SurfacePoint(x, s))
                assert abs(above - exact) < 1e-6
                assert abs(below - exact) < 1e-6

    def test_conjugation_symmetry(self, sol):
        regions = trace_branch_curves(sol)
        for w in _near_axis_w(1000, seed=13):
            for s in (0, 1, 2):
                p = SurfacePoint(w, s)
                z = invert_G(sol, p, regions=regions)
                assert invert_G(sol, p.conjugate(), regions=regions) == z.conjugate()

    @pytest.mark.parametrize("lam,mu", [(1.01, 1.10), (2.0, 5.0)])
    def test_conjugation_symmetry_of_psi(self, lam, mu):
        thin = continuation_solve(IntervalPair(lam, mu))
        regions = trace_branch_curves(thin, 256)
        for w in _near_axis_w(300, seed=17):
            for s in (0, 1, 2):
                z = invert_G(thin, SurfacePoint(w, s), regions=regions)
                zc = invert_G(thin, SurfacePoint(w.conjugate(), s), regions=regions)
                for which in (1, 2):
                    value = psi_from_root(thin, which, z)
                    assert abs(psi_from_root(thin, which, zc) - value.conjugate()) <= 1e-11 * max(
                        1.0, abs(value)
                    )

    def test_images_of_distinct_points_are_distinct(self, sol):
        regions = trace_branch_curves(sol)
        rng = np.random.default_rng(21)
        sheets = rng.integers(0, 3, 500)
        images = np.array([
            invert_G(sol, SurfacePoint(w, int(s)), regions=regions)
            for w, s in zip(_random_w(500, seed=22), sheets)
        ])
        gaps = np.abs(images[:, None] - images[None, :])
        assert gaps[np.triu_indices(len(images), k=1)].min() > 0.0

    def test_conjugation_flips_bank(self, sol):
        p = SurfacePoint(-3.0, 1, "upper")
        assert invert_G(sol, p.conjugate()) == invert_G(sol, p).conjugate()

    def test_third_sheet_needs_no_bank(self, sol):
        z = invert_G(sol, SurfacePoint(-3.0, 2))
        assert z.imag == 0.0
        assert sol.crit.a < z.real < sol.crit.b
        z = invert_G(sol, SurfacePoint(1.5, 0))
        assert sol.crit.beta < z.real < sol.crit.alpha

    def test_glued_sheet_needs_bank(self, sol):
        with pytest.raises(OnCutError):
            invert_G(sol, SurfacePoint(-3.0, 0))
        with pytest.raises(OnCutError):
            invert_G(sol, SurfacePoint(1.5, 2))

    def test_strict_branch_point(self, sol):
        with pytest.raises(BranchPointError) as excinfo:
            invert_G(sol, SurfacePoint(1.0, 1), strict=True)
        assert excinfo.value.branch_point == 1.0
        assert excinfo.value.multiplicity == 2
        assert invert_G(sol, SurfacePoint(1.0, 1)) == sol.crit.a
        invert_G(sol, SurfacePoint(1.0, 0), strict=True)


class TestPsi:
    def test_values_at_infinity(self, sol):
        H = sol.coeffs.H_at_a
        assert psi1(sol, SurfacePoint.infinity(0)) == 0.0
        assert psi2(sol, SurfacePoint.infinity(0)) == 0.0
        assert psi1(sol, SurfacePoint.infinity(2)) == pytest.approx(2.0 / H)
        assert psi2(sol, SurfacePoint.infinity(1)) == pytest.approx(mobius_constant(sol))

    def test_poles(self, sol):
        with pytest.raises(PoleError):
            psi1(sol, SurfacePoint.infinity(1))
        with pytest.raises(PoleError):
            psi2(sol, SurfacePoint.infinity(2))

    def test_mobius_relation(self, sol):
        C2 = mobius_constant(sol)
        at_inf2 = 2.0 / sol.coeffs.H_at_a
        for w in _random_w(30, seed=14):
            for s in (0, 1, 2):
                p = SurfacePoint(w, s)
                v1, v2 = psi1(sol, p), psi2(sol, p)
                assert abs(v2 - C2 * v1 / (v1 - at_inf2)) < 1e-9 * max(1.0, abs(v2))

    def test_psi_grows_like_w(self, sol):
        w = 1e6 + 3e5j
        assert psi1(sol, SurfacePoint(w, 1)) / w == pytest.approx(1.0, rel=1e-5)
        assert psi2(sol, SurfacePoint(w, 2)) / w == pytest.approx(1.0, rel=1e-5)

    def test_user_coordinates(self):
        intervals, chart = normalize_intervals(0.0, 2.0, 6.0, 14.0)
        user_sol = continuation_solve(intervals, chart=chart)
        x = 1e6 + 1e5j
        value = psi_user(user_sol, 1, SurfacePoint(x, 1))
        assert value / x == pytest.approx(1.0, rel=1e-4)
        w = 0.3 + 0.8j
        direct = chart.scale * psi1(user_sol, SurfacePoint(w, 0))
        assert psi_user(user_sol, 1, SurfacePoint(chart.to_user(w), 0)) == pytest.approx(direct, rel=1e-12)


class TestLaurent:
    def test_psi1_at_infinity_on_sheet_one(self, sol):
        c = sol.coeffs
        head = extract_laurent(sol, 1, SurfacePoint.infinity(1), k=2)
        assert head.coeffs[0] == pytest.approx(1.0, abs=1e-8)
        assert head.coeffs[1] == pytest.approx((1 - c.h + c.A - c.B) / c.H_at_a, abs=1e-8)
        assert head.error < 1e-8

    def test_psi2_at_infinity_on_sheet_two(self, sol):
        c = sol.coeffs
        head = extract_laurent(sol, 2, SurfacePoint.infinity(2), k=2)
        assert head.coeffs[0] == pytest.approx(1.0, abs=1e-7)
        assert head.coeffs[1] == pytest.approx(-(c.h + 1 - c.A / 2 + c.B / 2) / c.H_at_a, abs=1e-7)

    def test_zero_at_infinity_on_sheet_zero(self, sol):
        c = sol.coeffs
        head1 = extract_laurent(sol, 1, SurfacePoint.infinity(0), k=3)
        head2 = extract_laurent(sol, 2, SurfacePoint.infinity(0), k=3)
        assert abs(head1.coeffs[0]) < 1e-10 and abs(head1.coeffs[1]) < 1e-10
        assert head1.coeffs[2] == pytest.approx(-c.B / c.H_at_a**2, rel=1e-6)
        assert head2.coeffs[2] == pytest.approx(-c.A * c.B / (4 * c.H_at_a**2), rel=1e-6)

    def test_finite_center_rejected(self, sol):
        with pytest.raises(ValueError):
            extract_laurent(sol, 1, SurfacePoint(0.0, 1))

    def test_k_out_of_range(self, sol):
        with pytest.raises(ValueError):
            extract_laurent(sol, 1, SurfacePoint.infinity(1), k=5)
