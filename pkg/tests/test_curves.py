import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sobolevcurves import Arc, Curve, CurveError, build_curve


class TestSegment:
    def test_length_and_endpoints(self):
        c = Curve.segment(-1, 1)
        assert c.length == pytest.approx(2.0)
        assert not c.closed
        assert c.point_at(0.0) == pytest.approx(-1 + 0j)
        assert c.point_at(2.0) == pytest.approx(1 + 0j)
        assert c.point_at(1.0) == pytest.approx(0j)

    def test_diagonal_segment(self):
        c = Curve.segment(0, 3 + 4j)
        assert c.length == pytest.approx(5.0)
        assert c.point_at(2.5) == pytest.approx(1.5 + 2j)

    def test_exact_affine_points(self):
        c = Curve.segment(0, 1, a_exact=(Fraction(0), Fraction(0)),
                          b_exact=(Fraction(1), Fraction(0)))
        assert c.point_exact(Fraction(1, 3)) == (Fraction(1, 3), Fraction(0))
        assert c.exact_length == 1

    def test_degenerate_rejected(self):
        with pytest.raises(CurveError):
            Curve.segment(1j, 1j)

    def test_out_of_domain_rejected(self):
        c = Curve.segment(0, 1)
        with pytest.raises(CurveError):
            c.point_at(1.5)

    @given(st.floats(0, 2), st.floats(0, 2))
    def test_lipschitz_in_parameter(self, s, t):
        c = Curve.segment(-1j, -1j + 2)
        assert abs(c.point_at(s) - c.point_at(t)) <= abs(s - t) + 1e-12


class TestCircle:
    def test_full_circle_geometry(self):
        c = Curve.full_circle(1j, 2.0)
        assert c.closed
        assert c.length == pytest.approx(4 * math.pi)
        assert c.point_at(0.0) == pytest.approx(2 + 1j)
        # quarter of the arc length advances the angle by pi/2
        assert c.point_at(math.pi) == pytest.approx(1j + 2j)

    def test_wraparound(self):
        c = Curve.full_circle(0, 1.0)
        assert c.point_at(c.length) == pytest.approx(c.point_at(0.0))

    def test_circle_arc(self):
        c = Curve.circle_arc(0, 1.0, 0.0, math.pi / 2)
        assert not c.closed
        assert c.length == pytest.approx(math.pi / 2)
        assert c.point_at(c.length) == pytest.approx(1j)

    def test_circle_arc_full_turn_rejected(self):
        with pytest.raises(CurveError):
            Curve.circle_arc(0, 1.0, 0.0, 2 * math.pi)

    def test_cut_opens_the_circle(self):
        c = Curve.full_circle(0, 1.0).cut()
        assert not c.closed
        assert c.length == pytest.approx(2 * math.pi)
        assert c.point_at(math.pi / 2) == pytest.approx(1j)

    @given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
    def test_lipschitz_in_parameter(self, s, t):
        c = Curve.full_circle(0, 1.0)
        # chord length never exceeds arc length, including the wrap
        d = abs(c.point_at(s) - c.point_at(t))
        gap = abs(s - t)
        gap = min(gap, c.length - gap)
        assert d <= gap + 1e-12


class TestPolyline:
    def test_vertices_hit_at_cumulative_lengths(self):
        c = Curve.polyline([0, 1, 1 + 1j])
        assert c.length == pytest.approx(2.0)
        assert c.point_at(1.0) == pytest.approx(1 + 0j)
        assert c.point_at(2.0) == pytest.approx(1 + 1j)

    def test_closed_polyline(self):
        c = Curve.polyline([0, 1, 1 + 1j, 1j, 0])
        assert c.closed
        assert c.length == pytest.approx(4.0)

    def test_self_intersection_rejected(self):
        with pytest.raises(CurveError):
            Curve.polyline([0, 1 + 1j, 1, 1j])

    def test_zero_edge_rejected(self):
        with pytest.raises(CurveError):
            Curve.polyline([0, 1, 1, 2])


class TestTransforms:
    def test_reversed_segment(self):
        c = Curve.segment(0, 2 + 1j)
        r = c.reversed()
        for t in (0.0, 0.7, c.length):
            assert r.point_at(c.length - t) == pytest.approx(c.point_at(t))

    def test_reversed_polyline_round_trip(self):
        c = Curve.polyline([0, 1, 1 + 2j])
        rr = c.reversed().reversed()
        for t in (0.0, 0.5, 1.7, c.length):
            assert rr.point_at(t) == pytest.approx(c.point_at(t))

    def test_closed_curve_reversal_rejected(self):
        with pytest.raises(CurveError):
            Curve.full_circle(0, 1.0).reversed()

    def test_scaled(self):
        c = Curve.segment(0, 1).scaled(2j)
        assert c.length == pytest.approx(2.0)
        assert c.point_at(1.0) == pytest.approx(1j)

    def test_bounding_disk_contains_samples(self):
        for c in (Curve.segment(-1, 1 + 1j), Curve.full_circle(1, 2.0),
                  Curve.polyline([0, 1j, 2 + 1j])):
            z0, rad = c.bounding_disk()
            n = 37
            for i in range(n + 1):
                t = c.length * i / n
                assert abs(c.point_at(t) - z0) <= rad + 1e-12

    def test_max_abs(self):
        assert Curve.segment(-3, 1).max_abs() == pytest.approx(3.0)
        assert Curve.full_circle(1, 1.0).max_abs() == pytest.approx(2.0)


class TestJson:
    def test_segment_round_trip_keeps_exactness(self):
        c = Curve.segment(0, 1, a_exact=(Fraction(0), Fraction(0)),
                          b_exact=(Fraction(1), Fraction(0)))
        c2 = build_curve(c.to_json())
        assert c2.exact_affine is not None
        assert c2.to_json() == c.to_json()

    def test_circle_round_trip(self):
        c = Curve.full_circle(1j, 2.5)
        c2 = build_curve(c.to_json())
        assert c2.length == pytest.approx(c.length)
        assert c2.point_at(1.0) == pytest.approx(c.point_at(1.0))

    def test_polyline_round_trip(self):
        c = Curve.polyline([0, 1, 1 + 1j])
        c2 = build_curve(c.to_json())
        assert c2.length == pytest.approx(c.length)

    def test_bad_kind_rejected(self):
        with pytest.raises(CurveError):
            build_curve({"kind": "spiral"})
        with pytest.raises(CurveError):
            build_curve({})


class TestArc:
    def test_contains_respects_inclusion_flags(self):
        a = Arc(0, 1, include_left=False)
        assert not a.contains(0.0)
        assert a.contains(0.5)
        assert a.contains(1.0)

    def test_interior_contains(self):
        a = Arc(0, 1)
        assert a.interior_contains(0.5)
        assert not a.interior_contains(0.0)

    def test_arc_length_of(self):
        c = Curve.full_circle(0, 1.0)
        assert c.arc_length_of(Arc(0.0, math.pi)) == pytest.approx(math.pi)
