import math
from fractions import Fraction

import mpmath
import pytest

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    MeasureComponent,
    PowerForm,
    VectorialMeasure,
    WeightAnalysis,
    WeightPiece,
    admissibility,
    arc_consistency,
    dyadic_counterexample,
    hardy_constant,
    lambda_minus,
    lambda_plus,
)
from sobolevcurves.weights import ScalarMeasure, one_sided_bp

F = Fraction


def scalar_lebesgue(lo=0.0, hi=1.0):
    comp = MeasureComponent(0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
    return ScalarMeasure.from_component(comp, lo, hi)


def scalar_power(alpha_left, alpha_right=0):
    comp = MeasureComponent(
        0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(alpha_left), F(alpha_right)))], [])
    return ScalarMeasure.from_component(comp, 0.0, 1.0)


class TestMuckenhouptFunctional:
    def test_lebesgue_pair_equals_quarter(self):
        # sup_z z * (1 - z) over (0, 1) at p = 2
        rep = lambda_plus(scalar_lebesgue(), scalar_lebesgue(), 0.0, 1.0, 2, levels=12)
        assert rep.finite
        assert rep.value == pytest.approx(0.25, abs=1e-4)
        assert rep.witness == pytest.approx(0.5, abs=1e-2)

    def test_cubic_weight_diverges(self):
        # nu density t^3: the tail integral of t^-3 blows up at the left end
        rep = lambda_plus(scalar_lebesgue(), scalar_power(3), 0.0, 1.0, 2, levels=12)
        assert not rep.finite
        assert rep.certificate in ("symbolic-divergent", "structural-infinite")

    def test_mirrored_functional(self):
        rep = lambda_minus(scalar_lebesgue(), scalar_lebesgue(), 0.0, 1.0, 2, levels=12)
        assert rep.value == pytest.approx(0.25, abs=1e-4)

    def test_exact_sup_against_mpmath(self):
        # mu = Lebesgue, nu density (1+t): head z, tail log((1+1)/(1+z))
        comp = MeasureComponent(
            0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), smooth_expr="1 + t"))], [])
        nu = ScalarMeasure.from_component(comp, 0.0, 1.0)
        rep = lambda_plus(scalar_lebesgue(), nu, 0.0, 1.0, 2, levels=14)
        ref = float(max(mpmath.mpf(z) / 1000 * mpmath.log(2 / (1 + mpmath.mpf(z) / 1000))
                        for z in range(1, 1000)))
        assert rep.value == pytest.approx(ref, abs=1e-3)

    def test_hardy_constant_formula(self):
        # p = 2: C = (lam * p * p')^(1/p) = 2 sqrt(lam)
        assert hardy_constant(0.25, 2) == pytest.approx(1.0)
        assert math.isinf(hardy_constant(math.inf, 2))

    def test_hardy_inequality_on_test_functions(self):
        # int_0^1 |F|^2 <= C^2 int_0^1 |f|^2 with F(z) = int_0^z f, C = 2
        import numpy as np
        rng = np.random.default_rng(7)
        rep = lambda_plus(scalar_lebesgue(), scalar_lebesgue(), 0.0, 1.0, 2, levels=12)
        C = hardy_constant(rep.value, 2)
        ts = np.linspace(0.0, 1.0, 4001)
        dt = ts[1] - ts[0]
        for _ in range(25):
            coef = rng.normal(size=4)
            f = sum(c * np.cos((i + 1) * math.pi * ts) for i, c in enumerate(coef))
            Fz = np.concatenate([[0.0], np.cumsum((f[1:] + f[:-1]) / 2) * dt])
            lhs = float(np.sum(Fz ** 2) * dt)
            rhs = float(np.sum(f ** 2) * dt)
            assert lhs <= (C ** 2) * rhs * (1 + 1e-6) + 1e-12


class TestBpChecks:
    def test_constant_weight_is_bp(self):
        comp = MeasureComponent(1, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
        assert one_sided_bp(comp, 0.0, "right", 2) == "yes"
        assert one_sided_bp(comp, 1.0, "left", 2) == "yes"

    def test_zero_weight_is_not(self):
        comp = MeasureComponent(1, [], [])
        assert one_sided_bp(comp, 0.0, "right", 2) == "no"

    def test_integrability_threshold(self):
        # 1/w integrable to the power 1/(p-1) iff alpha < p - 1
        mild = MeasureComponent(1, [WeightPiece(Arc(F(0), F(1)),
                                                PowerForm(F(1), F(1, 2), F(0)))], [])
        steep = MeasureComponent(1, [WeightPiece(Arc(F(0), F(1)),
                                                 PowerForm(F(1), F(3), F(0)))], [])
        assert one_sided_bp(mild, 0.0, "right", 2) == "yes"
        assert one_sided_bp(steep, 0.0, "right", 2) == "no"

    def test_arc_consistency_constant(self):
        comp = MeasureComponent(1, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
        assert arc_consistency(comp, 0.0, 1.0, 2, "right").verdict == "yes"
        assert arc_consistency(comp, 0.0, 1.0, 2, "left").verdict == "yes"


class TestOmegaAndRegularity:
    def test_dyadic_structure(self):
        # frozen structure: orders 1 and 2 carry no density, order 3 covers
        # every cell interior, and the chained set reaches the right endpoint
        mu = dyadic_counterexample(2)
        wa = WeightAnalysis(mu)
        assert not wa.omega(1).arcs
        assert not wa.omega(2).arcs
        om3 = wa.omega(3)
        assert om3.contains_interior(0.3)
        assert not om3.contains_interior(2 ** -4)  # cell junction
        assert not om3.covers_open_arc(2 ** -6, 1.0)  # junctions punch holes

    def test_flat_measure_full_omegas(self, corpus_docs):
        from sobolevcurves import parse_measure
        mu = parse_measure(corpus_docs["flat_k3.json"])
        wa = WeightAnalysis(mu)
        for j in (1, 2, 3):
            assert wa.omega(j).contains_interior(1.0)
        rs = wa.regular_set(0)
        assert rs.fully_regular(1.0) == "yes"

    def test_split_support_junction_not_regular(self, corpus_docs):
        from sobolevcurves import parse_measure
        mu = parse_measure(corpus_docs["split_support_k1.json"])
        wa = WeightAnalysis(mu)
        om = wa.omega(1)
        assert om.contains_interior(0.2)
        assert not om.contains_interior(0.5)


class TestAdmissibility:
    def test_lebesgue_strongly_admissible(self, corpus_docs):
        from sobolevcurves import parse_measure
        rep = admissibility(WeightAnalysis(parse_measure(corpus_docs["sobolev_leb_k1.json"])))
        assert rep.admissible == "yes"
        assert rep.strongly == "yes"

    def test_dyadic_admissible(self):
        rep = admissibility(WeightAnalysis(dyadic_counterexample(1)))
        assert rep.admissible == "yes"

    def test_interior_atom_of_intermediate_order_violates(self):
        # an order-1 atom at a point with no order-1 regularity is singular
        curve = Curve.segment(0, 1)
        mu = VectorialMeasure(curve, 2, [
            MeasureComponent(0, [WeightPiece(Arc(0.0, 1.0), PowerForm(1.0))], []),
            MeasureComponent(1, [], [Atom(0.5, 1.0)]),
            MeasureComponent(2, [], []),
        ])
        rep = admissibility(WeightAnalysis(mu))
        assert rep.admissible == "no"
        assert rep.violations
