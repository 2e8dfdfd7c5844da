import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    GeneralForm,
    MeasureComponent,
    PowerForm,
    WeightPiece,
    component_ac_mass,
    component_mass,
    integrate_piece,
    integrate_weighted,
    piece_rule,
    total_mass,
)

F = Fraction


class TestClosedForms:
    def test_lebesgue_mass(self):
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))
        val, err = integrate_piece(pc)
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_inverse_sqrt_singularity(self):
        # integral of t^(-1/2) over [0,1] is 2
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(-1, 2), F(0)))
        val, err = integrate_piece(pc)
        assert val == pytest.approx(2.0, rel=1e-10)

    def test_beta_moment(self):
        # both endpoints algebraically singular: B(1/2, 1/2) = pi
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(-1, 2), F(-1, 2)))
        val, _ = integrate_piece(pc)
        assert val == pytest.approx(math.pi, rel=1e-10)

    def test_semicircle_weight(self):
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(1, 2), F(1, 2)))
        val, _ = integrate_piece(pc)
        assert val == pytest.approx(math.pi / 8, rel=1e-10)

    def test_monomial_against_exact(self):
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))
        val, _ = integrate_piece(pc, f=lambda t: t * t)
        assert val == pytest.approx(1 / 3, rel=1e-12)

    def test_power_piece_with_smooth_hook(self):
        # independent high-precision oracle for a genuinely lumpy weight
        pc = WeightPiece(Arc(F(0), F(1)),
                         PowerForm(F(1), F(-1, 3), F(-1, 4), smooth_expr="2 + sin(3*t)"))
        val, _ = integrate_piece(pc)
        ref = mpmath.quad(
            lambda t: t ** (-mpmath.mpf(1) / 3) * (1 - t) ** (-mpmath.mpf(1) / 4)
            * (2 + mpmath.sin(3 * t)),
            [0, 1])
        assert val == pytest.approx(float(ref), rel=1e-9)


class TestRules:
    def test_piece_rule_weights_nonnegative(self):
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(-1, 2), F(0)))
        ts, ws = piece_rule(pc, n=64)
        assert len(ts) == len(ws)
        assert all(w >= 0 for w in ws)
        assert all(0 <= t <= 1 for t in ts)

    def test_rule_sums_to_mass(self):
        pc = WeightPiece(Arc(F(0), F(2)), PowerForm(F(3)))
        ts, ws = piece_rule(pc, n=48)
        assert sum(ws) == pytest.approx(6.0, rel=1e-10)

    @given(st.integers(1, 6))
    @settings(max_examples=20, deadline=None)
    def test_polynomial_exactness_degree(self, d):
        # Gauss-type rules integrate low-degree polynomials to rounding error
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))
        val, _ = integrate_piece(pc, f=lambda t, d=d: t ** d)
        assert val == pytest.approx(1 / (d + 1), rel=1e-11)


class TestMasses:
    def test_component_mass_includes_atoms(self):
        comp = MeasureComponent(0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))],
                                [Atom(F(1, 2), F(1, 4))])
        assert component_ac_mass(comp) == pytest.approx(1.0, rel=1e-10)
        assert component_mass(comp) == pytest.approx(1.25, rel=1e-10)

    def test_windowed_ac_mass(self):
        comp = MeasureComponent(0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
        assert component_ac_mass(comp, 0.25, 0.75) == pytest.approx(0.5, rel=1e-10)

    def test_total_mass_sums_orders(self, corpus_docs):
        from sobolevcurves import parse_measure
        mu = parse_measure(corpus_docs["sobolev_leb_k1.json"])
        assert total_mass(mu) == pytest.approx(2.0, rel=1e-10)

    def test_circle_arc_length_mass(self):
        curve = Curve.full_circle(0, 1.0)
        comp = MeasureComponent(0, [WeightPiece(Arc(0.0, 2 * math.pi), PowerForm(1.0))], [])
        assert component_ac_mass(comp) == pytest.approx(2 * math.pi, rel=1e-10)


class TestWeightedIntegrator:
    def test_result_fields_and_convergence(self):
        curve = Curve.segment(0, 1)
        pieces = [WeightPiece(Arc(0.0, 1.0), PowerForm(1.0, -0.5, 0.0))]
        res = integrate_weighted(curve, Arc(0.0, 1.0), pieces)
        assert res.converged
        assert res.value == pytest.approx(2.0, rel=1e-9)
        assert res.error_estimate < 1e-8

    def test_general_form_against_mpmath(self):
        curve = Curve.segment(0, 1)
        pieces = [WeightPiece(Arc(0.0, 1.0), GeneralForm("exp(t) * (1 + t**2)"))]
        res = integrate_weighted(curve, Arc(0.0, 1.0), pieces)
        ref = mpmath.quad(lambda t: mpmath.exp(t) * (1 + t ** 2), [0, 1])
        assert res.value == pytest.approx(float(ref), rel=1e-9)

    def test_integrand_hook(self):
        curve = Curve.segment(0, 1)
        pieces = [WeightPiece(Arc(0.0, 1.0), PowerForm(1.0))]
        res = integrate_weighted(curve, Arc(0.0, 1.0), pieces, f=lambda t: t)
        assert res.value == pytest.approx(0.5, rel=1e-10)
