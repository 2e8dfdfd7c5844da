import math
from fractions import Fraction

import pytest

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    GeneralForm,
    MeasureComponent,
    MonotoneForm,
    PowerForm,
    VectorialMeasure,
    WeightAnalysis,
    WeightPiece,
    boundedness_verdict,
    classify_monotone_ac,
    classify_type_a,
    classify_type_b,
    classify_type_c,
    component_mass,
    esd,
    esd_closure,
    kernel_certificate,
    measure_finite,
    prop_k1_kernel_dim,
    seam_cut,
    solve_kernel,
    structural_breakpoints,
)
from conftest import load_corpus_measure

F = Fraction


def seg(x0, x1):
    return Curve.segment(x0, x1, a_exact=(F(x0), F(0)), b_exact=(F(x1), F(0)))


def leb(a, b, c=F(1)):
    return WeightPiece(Arc(F(a), F(b)), PowerForm(c))


class TestESD:
    def test_equal_components_dominate_with_constant_one(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], []),
            MeasureComponent(1, [leb(0, 1)], []),
        ])
        rep = esd(mu)
        assert rep.is_esd == "yes"
        assert rep.constant == pytest.approx(1.0)

    def test_lebesgue_never_dominated_by_an_atom(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [], [Atom(F(0), F(1))]),
            MeasureComponent(1, [leb(0, 1)], []),
        ])
        rep = esd(mu)
        assert rep.is_esd == "no"
        assert math.isinf(rep.constant)
        assert rep.per_order[0]["verdict"] == "no"

    def test_atom_ratio_gives_the_constant(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [], [Atom(F(1, 2), F(2))]),
            MeasureComponent(1, [], [Atom(F(1, 2), F(3))]),
        ])
        rep = esd(mu)
        assert rep.is_esd == "yes"
        assert rep.constant == pytest.approx(1.5)

    def test_closure_is_the_tail_sum(self):
        # atom at the midpoint, order-2 weight on the left half, order-3 on
        # the right half; tail sums spread both weights downward
        mu = VectorialMeasure(seg(-1, 1), F(2), [
            MeasureComponent(0, [], [Atom(F(1), F(1))]),
            MeasureComponent(1, [], []),
            MeasureComponent(2, [leb(0, 1)], []),
            MeasureComponent(3, [leb(1, 2)], []),
        ])
        rep = esd(mu)
        assert rep.is_esd == "no"
        cl = rep.closure
        c0, c1, c2, c3 = (cl.component(j) for j in range(4))
        assert [(float(a.t), float(a.mass)) for a in c0.atoms] == [(1.0, 1.0)]
        for c in (c0, c1, c2):
            assert c.weight_at(0.3) == pytest.approx(1.0)
            assert c.weight_at(1.7) == pytest.approx(1.0)
        assert c3.weight_at(0.3) == 0.0
        assert c3.weight_at(1.7) == pytest.approx(1.0)
        assert not (c1.atoms or c2.atoms or c3.atoms)

    def test_closure_always_satisfies_domination(self):
        mu = VectorialMeasure(seg(-1, 1), F(2), [
            MeasureComponent(0, [], [Atom(F(1), F(1))]),
            MeasureComponent(1, [], []),
            MeasureComponent(2, [leb(0, 1)], []),
            MeasureComponent(3, [leb(1, 2)], []),
        ])
        rep = esd(esd_closure(mu))
        assert rep.is_esd == "yes"
        assert rep.constant <= 1.0 + 1e-12

    def test_closure_components_are_pointwise_sums(self, corpus_manifest):
        for entry in corpus_manifest:
            if entry["k"] == 0:
                continue
            mu = load_corpus_measure(entry["file"][:-5])
            cl = esd_closure(mu)
            L = mu.curve.length
            samples = [L * s for s in (0.137, 0.304, 0.551, 0.773, 0.926)]
            for j in range(mu.k + 1):
                for t in samples:
                    want = sum(mu.component(i).weight_at(t)
                               for i in range(j, mu.k + 1))
                    got = cl.component(j).weight_at(t)
                    assert got == pytest.approx(want, rel=1e-9, abs=1e-12), (
                        entry["file"], j, t)
                # mixed-form sums integrate through the generic evaluator,
                # which is the loosest quadrature in play
                want = sum(component_mass(mu.component(i))
                           for i in range(j, mu.k + 1))
                got = component_mass(cl.component(j))
                assert got == pytest.approx(want, rel=2e-6, abs=1e-12), (
                    entry["file"], j)


class TestTypeA:
    def test_constant_top_weight_passes_muckenhoupt_case(self):
        mu = load_corpus_measure("sobolev_leb_k1")
        rep = classify_type_a(WeightAnalysis(mu))
        assert rep.applies == "yes"
        assert all(c.case == "2" for c in rep.arc_cases)

    def test_vanishing_derivative_weights_pass_trivially(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], []),
            MeasureComponent(1, [], []),
        ])
        rep = classify_type_a(WeightAnalysis(mu))
        assert rep.applies == "yes"
        assert all(c.case == "1" for c in rep.arc_cases)

    def test_partition_endpoints_are_the_curve_endpoints(self):
        mu = load_corpus_measure("ramp_k2")
        rep = classify_type_a(WeightAnalysis(mu))
        assert rep.partition[0] == 0.0
        assert rep.partition[-1] == pytest.approx(mu.curve.length)

    def test_monotone_annotated_weight_classifies(self):
        mu = load_corpus_measure("exp_weight_k1")
        rep = classify_type_a(WeightAnalysis(mu))
        assert rep.applies == "yes"

    def test_closed_curve_is_not_directly_classified(self):
        mu = load_corpus_measure("circle_k1")
        assert classify_type_a(WeightAnalysis(mu)).applies == "no"
        cut = seam_cut(mu)
        assert classify_type_a(WeightAnalysis(cut)).applies == "yes"


class TestTypeB:
    def test_jacobi_weight_splits_into_two_monotone_pieces(self):
        mu = VectorialMeasure(seg(-1, 1), F(2), [
            MeasureComponent(0, [leb(0, 2)], []),
            MeasureComponent(1, [WeightPiece(
                Arc(F(0), F(2)), PowerForm(F(1), F(1, 2), F(1, 2)))], []),
        ])
        rep = classify_type_b(WeightAnalysis(mu))
        assert rep.applies == "yes"
        dirs = [d["direction"] for d in rep.per_order[1]]
        assert dirs == ["nondecreasing", "nonincreasing"]
        assert rep.per_order[1][0]["arc"][1] == pytest.approx(1.0)

    def test_unannotated_monotone_form_downgrades(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], []),
            MeasureComponent(1, [WeightPiece(
                Arc(F(0), F(1)),
                MonotoneForm("t**2 + 1", "nondecreasing", comparable=False))], []),
        ])
        rep = classify_type_b(WeightAnalysis(mu))
        assert rep.applies == "unknown"
        assert rep.violations

    def test_type_b_implies_type_a_on_the_corpus(self, corpus_manifest):
        for entry in corpus_manifest:
            mu = load_corpus_measure(entry["file"][:-5])
            if mu.curve.closed:
                mu = seam_cut(mu)
            an = WeightAnalysis(mu)
            tb = classify_type_b(an)
            if tb.applies == "yes":
                assert classify_type_a(an).applies == "yes", entry["file"]


class TestTypeC:
    def test_steep_cusp_routes_to_the_shifted_sandwich(self):
        # w1 = t^3 at p = 2: exponent 3 above p - 1 at the left end
        mu = load_corpus_measure("cusp_cubic_k1")
        rep = classify_type_c(WeightAnalysis(mu))
        assert rep.applies == "yes"
        assert rep.end_cases["left"][1] == "2.4"
        assert rep.end_cases["right"][1] == "3.1"

    def test_shallow_cusp_stays_muckenhoupt_at_the_end(self):
        # w1 = t^(1/2): exponent below p - 1, the weight is Muckenhoupt there
        mu = load_corpus_measure("cusp_sqrt_k1")
        rep = classify_type_c(WeightAnalysis(mu))
        assert rep.applies == "yes"
        assert rep.end_cases["left"][1] == "2.2"

    def test_interior_points_lie_strictly_inside(self):
        mu = load_corpus_measure("cusp_cubic_k1")
        rep = classify_type_c(WeightAnalysis(mu))
        L = mu.curve.length
        assert 0.0 < rep.a2 <= rep.a3 < L


class TestMonotoneAC:
    def test_atoms_on_derivative_orders_break_the_route(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], []),
            MeasureComponent(1, [leb(0, 1)], [Atom(F(1, 2), F(1))]),
        ])
        rep = classify_monotone_ac(mu)
        assert rep.applies == "no"
        assert any("atoms" in v for v in rep.violations)

    def test_pure_ac_constant_weights_pass(self):
        mu = load_corpus_measure("sobolev_leb_k1")
        assert classify_monotone_ac(mu).applies == "yes"

    def test_atoms_on_the_value_order_are_harmless(self):
        mu = load_corpus_measure("atom_mix_k1")
        assert classify_monotone_ac(mu).applies == "yes"


class TestStructure:
    def test_breakpoints_cover_bounds_atoms_and_peaks(self):
        mu = VectorialMeasure(seg(-1, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], [Atom(F(3, 2), F(1))]),
            MeasureComponent(1, [WeightPiece(
                Arc(F(0), F(2)), PowerForm(F(1), F(1), F(1)))], []),
        ])
        pts = structural_breakpoints(mu)
        assert pts[0] == 0.0 and pts[-1] == pytest.approx(2.0)
        for t in (1.0, 1.5):
            assert any(abs(t - s) < 1e-9 for s in pts)
        # symmetric double anchor peaks at the midpoint
        assert any(abs(1.0 - s) < 1e-9 for s in pts)

    def test_bounded_corpus_measures_are_finite(self, corpus_manifest):
        for entry in corpus_manifest:
            mu = load_corpus_measure(entry["file"][:-5])
            assert measure_finite(mu) == "yes", entry["file"]


class TestPropK1:
    def test_matches_the_solver_on_first_order_corpus(self, corpus_manifest):
        seen = 0
        for entry in corpus_manifest:
            if entry["k"] != 1:
                continue
            mu = load_corpus_measure(entry["file"][:-5])
            dim = solve_kernel(mu).dim
            assert prop_k1_kernel_dim(WeightAnalysis(mu)) == dim, entry["file"]
            seen += 1
        assert seen >= 5

    def test_rejects_higher_order_measures(self):
        mu = load_corpus_measure("ramp_k2")
        with pytest.raises(ValueError):
            prop_k1_kernel_dim(WeightAnalysis(mu))

    def test_central_atom_fills_the_single_component(self):
        mu = VectorialMeasure(seg(-1, 1), F(2), [
            MeasureComponent(0, [], [Atom(F(1), F(1))]),
            MeasureComponent(1, [leb(0, 2)], []),
        ])
        assert prop_k1_kernel_dim(WeightAnalysis(mu)) == 0
        verdict = boundedness_verdict(mu)
        assert verdict.verdict == "bounded"
        assert verdict.kernel_dim == 0


class TestVerdict:
    def test_two_sided_example_is_unbounded_with_certificate(self):
        mu = load_corpus_measure("two_sided_dim2")
        v = boundedness_verdict(mu)
        assert v.verdict == "unbounded"
        assert v.kernel_dim == 2
        assert v.routes
        c = v.certificate
        assert c is not None
        assert c.element_norm < 1e-8 * c.scale
        assert c.image_norm > 1e-6 * c.scale
        assert c.power == 1

    def test_extra_atoms_restore_boundedness(self):
        mu = load_corpus_measure("two_sided_dim2")
        comps = [MeasureComponent(c.j, list(c.pieces), list(c.atoms))
                 for c in mu.components]
        comps[0] = MeasureComponent(0, [], comps[0].atoms
                                    + [Atom(F(1, 2), F(1)), Atom(F(3, 2), F(1))])
        fixed = VectorialMeasure(mu.curve, mu.p, comps)
        v = boundedness_verdict(fixed)
        assert v.verdict == "bounded"
        assert v.kernel_dim == 0

    def test_corpus_verdicts_match_the_manifest(self, corpus_manifest):
        for entry in corpus_manifest:
            mu = load_corpus_measure(entry["file"][:-5])
            v = boundedness_verdict(mu)
            assert v.verdict == entry["expect"]["verdict"], entry["file"]
            assert v.kernel_dim == entry["expect"]["kernelDim"], entry["file"]

    def test_bounded_needs_a_verified_route(self, corpus_manifest):
        for entry in corpus_manifest:
            mu = load_corpus_measure(entry["file"][:-5])
            v = boundedness_verdict(mu)
            if v.verdict == "bounded":
                assert v.theorem is not None, entry["file"]
                assert v.kernel_dim == 0, entry["file"]

    def test_unverifiable_weight_yields_unknown(self):
        mu = VectorialMeasure(seg(0, 1), F(2), [
            MeasureComponent(0, [leb(0, 1)], []),
            MeasureComponent(1, [WeightPiece(
                Arc(F(0), F(1)), GeneralForm("2 + sin(40/(t + 0.01))"))], []),
        ])
        an = WeightAnalysis(mu)
        assert classify_type_a(an).applies == "unknown"
        assert classify_type_b(an).applies == "unknown"
        assert classify_type_c(an).applies == "unknown"
        assert classify_monotone_ac(mu).applies == "unknown"
        v = boundedness_verdict(mu)
        assert v.verdict == "unknown"
        assert v.theorem is None

    def test_mult_equivalence_value_mass_decides_type_c(self):
        # both carry the same cubic derivative weight; only the value-order
        # mass differs, and it alone flips the verdict
        with_mass = load_corpus_measure("cusp_cubic_k1")
        without = load_corpus_measure("no_mass_cusp_k1")
        for mu, want in ((with_mass, "bounded"), (without, "unbounded")):
            v = boundedness_verdict(mu)
            assert classify_type_c(WeightAnalysis(mu)).applies == "yes"
            assert v.evidence.get("w1Mass", 0) > 0 or component_mass(
                mu.component(1)) > 0
            mass0 = component_mass(mu.component(0))
            assert v.verdict == want
            assert (v.verdict == "bounded") == (mass0 > 0)

    def test_invariant_under_reversal_and_positive_scaling(self):
        for name in ("sobolev_leb_k1", "split_support_k1", "cusp_cubic_k1",
                     "two_sided_dim2"):
            mu = load_corpus_measure(name)
            v = boundedness_verdict(mu)
            vr = boundedness_verdict(mu.reversed())
            vs = boundedness_verdict(mu.mass_scaled(F(7, 2)))
            assert (vr.verdict, vr.kernel_dim) == (v.verdict, v.kernel_dim), name
            assert (vs.verdict, vs.kernel_dim) == (v.verdict, v.kernel_dim), name

    def test_closed_curves_answer_through_the_cut_model(self):
        mu = load_corpus_measure("circle_k1")
        v = boundedness_verdict(mu)
        assert v.verdict == "bounded"
        assert "cutKernelDim" in v.evidence
        assert any("seam-cut" in n for n in v.notes)
        cut = seam_cut(mu)
        assert not cut.curve.closed
        assert cut.curve.length == pytest.approx(mu.curve.length)

    def test_certificate_absent_for_trivial_kernels(self):
        mu = load_corpus_measure("legendre_k0")
        assert kernel_certificate(mu) is None
