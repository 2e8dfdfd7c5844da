import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    GeneralForm,
    MeasureComponent,
    MeasureError,
    MonotoneForm,
    PowerForm,
    VectorialMeasure,
    WeightPiece,
    ZeroForm,
    dyadic_counterexample,
    parse_measure,
)
from sobolevcurves.measures import dump_number, parse_number

F = Fraction


def leb_on_unit(k=1):
    curve = Curve.segment(0, 1, a_exact=(F(0), F(0)), b_exact=(F(1), F(0)))
    comps = [MeasureComponent(j, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
             for j in range(k + 1)]
    return VectorialMeasure(curve, F(2), comps)


class TestNumbers:
    @given(st.fractions())
    def test_fraction_round_trip(self, q):
        assert parse_number(dump_number(q)) == q

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_float_round_trip(self, x):
        assert parse_number(dump_number(x)) == x

    def test_string_rationals(self):
        assert parse_number("1/2") == F(1, 2)
        assert parse_number(3) == F(3)
        assert isinstance(parse_number(0.25), float)


class TestForms:
    def test_power_validation(self):
        with pytest.raises(MeasureError):
            PowerForm(0)
        with pytest.raises(MeasureError):
            PowerForm(-1)
        with pytest.raises(MeasureError):
            PowerForm(1, alpha_left=-1)
        with pytest.raises(MeasureError):
            PowerForm(1, alpha_right=F(-3, 2))

    def test_monotone_direction_validation(self):
        with pytest.raises(MeasureError):
            MonotoneForm("t", "upwards")

    def test_expression_validation_is_eager(self):
        with pytest.raises(SyntaxError):
            GeneralForm("import os")
        with pytest.raises(MeasureError):
            GeneralForm("unknown_name(t)")
        with pytest.raises(MeasureError):
            GeneralForm("__import__('os')")

    def test_power_split_keeps_mass(self):
        from sobolevcurves import integrate_piece
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(1, 2), F(1, 2)))
        left, right = pc.split(F(2, 5))
        whole, _ = integrate_piece(pc)
        l, _ = integrate_piece(left)
        r, _ = integrate_piece(right)
        assert l + r == pytest.approx(whole, rel=1e-9)

    def test_exponent_at_reads_the_near_anchor(self):
        pc = WeightPiece(Arc(F(0), F(1)), PowerForm(F(1), F(3), F(1, 2)))
        assert pc.exponent_at(0.0, "right") == F(3)
        assert pc.exponent_at(1.0, "left") == F(1, 2)
        # interior points see a positive continuous factor
        assert pc.exponent_at(0.5, "right") == 0


class TestParsing:
    def test_minimal_document(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2, "k": 1,
               "components": [{"j": 0, "atoms": [{"t": "1/2", "mass": 1}]},
                              {"j": 1, "pieces": [{"arc": [0, 1],
                                                   "form": {"type": "power", "c": 1}}]}]}
        mu = parse_measure(doc)
        assert mu.k == 1
        assert mu.is_exact

    def test_declared_k_pads_components(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2, "k": 2,
               "components": [{"j": 0, "atoms": [{"t": 0, "mass": 1}]}]}
        mu = parse_measure(doc)
        assert mu.k == 2

    def test_declared_k_below_component_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2, "k": 0,
               "components": [{"j": 1, "pieces": [{"arc": [0, 1],
                                                   "form": {"type": "power", "c": 1}}]}]}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_reversed_arc_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2,
               "components": [{"j": 0, "pieces": [{"arc": [1, 0],
                                                   "form": {"type": "power", "c": 1}}]}]}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_arc_outside_curve_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2,
               "components": [{"j": 0, "pieces": [{"arc": [0, 2],
                                                   "form": {"type": "power", "c": 1}}]}]}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_p_below_one_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 0.5, "components": []}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_negative_mass_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2,
               "components": [{"j": 0, "atoms": [{"t": 0, "mass": -1}]}]}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_family_block_expands(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2, "family": {"name": "dyadic_counterexample", "depth": 2}}
        mu = parse_measure(doc)
        assert mu.k == 3
        assert mu.truncation is not None
        assert mu.truncation.depth == 2

    def test_unknown_family_rejected(self):
        doc = {"curve": {"kind": "segment", "a": [0, 0], "b": [1, 0]},
               "p": 2, "family": {"name": "nope"}}
        with pytest.raises(MeasureError):
            parse_measure(doc)

    def test_round_trip_is_a_fixed_point_on_corpus(self, corpus_docs):
        for name, doc in corpus_docs.items():
            once = parse_measure(doc).to_json()
            twice = parse_measure(once).to_json()
            assert once == twice, name

    def test_round_trip_preserves_truncation(self):
        mu = dyadic_counterexample(1)
        mu2 = parse_measure(mu.to_json())
        assert mu2.truncation is not None
        assert mu2.truncation.frontier == mu.truncation.frontier


class TestDyadicFamily:
    def test_structure_at_depth(self):
        mu = dyadic_counterexample(2)
        atoms0 = sorted(float(a.t) for a in mu.components[0].atoms)
        assert atoms0 == [2 ** -5, 2 ** -3, 2 ** -1]
        atoms1 = sorted(float(a.t) for a in mu.components[1].atoms)
        assert atoms1 == [3 * 2 ** -6, 3 * 2 ** -4, 3 * 2 ** -2]
        assert not mu.components[2].atoms and not mu.components[2].nonzero_pieces()
        cells = [(float(pc.t0), float(pc.t1)) for pc in mu.components[3].nonzero_pieces()]
        assert sorted(cells) == [(2 ** -6, 2 ** -4), (2 ** -4, 2 ** -2), (2 ** -2, 1.0)]

    def test_exactness(self):
        assert dyadic_counterexample(1).is_exact

    def test_negative_depth_rejected(self):
        with pytest.raises(MeasureError):
            dyadic_counterexample(-1)


class TestTransforms:
    def test_restrict_keeps_inside_atoms(self):
        mu = dyadic_counterexample(1)
        r = mu.restrict([Arc(F(1, 16), F(1))])
        assert len(r.components[0].atoms) == 2
        assert all(float(a.t) >= 1 / 16 for a in r.components[0].atoms)

    def test_reversed_round_trip_masses(self):
        from sobolevcurves import total_mass
        mu = leb_on_unit()
        assert total_mass(mu.reversed()) == pytest.approx(total_mass(mu), rel=1e-9)

    def test_reversed_swaps_power_anchors(self):
        curve = Curve.segment(0, 1)
        mu = VectorialMeasure(curve, 2, [MeasureComponent(
            0, [WeightPiece(Arc(0, 1), PowerForm(1, 3, 0))], [])])
        r = mu.reversed()
        pc = r.components[0].nonzero_pieces()[0]
        assert pc.exponent_at(1.0, "left") == 3

    def test_mass_scaled(self):
        from sobolevcurves import total_mass
        mu = leb_on_unit()
        assert total_mass(mu.mass_scaled(F(7, 2))) == pytest.approx(3.5 * total_mass(mu))
        with pytest.raises(MeasureError):
            mu.mass_scaled(0)

    def test_scaled_preserves_masses(self):
        from sobolevcurves import total_mass
        mu = leb_on_unit()
        assert total_mass(mu.scaled(2j)) == pytest.approx(total_mass(mu), rel=1e-9)


class TestComponents:
    def test_clipped_pieces_exact_fragments(self):
        comp = MeasureComponent(0, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], [])
        frags = comp.clipped_pieces(0.25, 0.5)
        assert len(frags) == 1
        assert float(frags[0].t0) == 0.25 and float(frags[0].t1) == 0.5

    def test_zero_pieces_invisible(self):
        comp = MeasureComponent(0, [WeightPiece(Arc(F(0), F(1)), ZeroForm())], [])
        assert comp.clipped_pieces(0.0, 1.0) == []

    def test_atom_masses_preserved_by_parse(self):
        mu = leb_on_unit()
        doc = mu.to_json()
        doc["components"][0]["atoms"] = [{"t": "1/3", "mass": "2/7"}]
        mu2 = parse_measure(doc)
        assert mu2.components[0].atoms[0].mass == F(2, 7)
