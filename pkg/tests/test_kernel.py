import numpy as np
import pytest
from fractions import Fraction

from sobolevcurves import (
    Arc,
    Atom,
    Curve,
    MeasureComponent,
    PowerForm,
    VectorialMeasure,
    WeightPiece,
    check_c0,
    dyadic_counterexample,
    parse_measure,
    solve_kernel,
    sobolev_norm,
    span_residual,
    stable_kernel_dim,
)
from conftest import load_corpus_measure

F = Fraction


def two_sided_example(extra_atoms=()):
    """Segment [-1, 1] (parameter t in [0, 2], midpoint atom at t = 1):
    order-2 density left of the atom, order-3 density right of it."""
    curve = Curve.segment(-1, 1, a_exact=(F(-1), F(0)), b_exact=(F(1), F(0)))
    atoms = [Atom(F(1), F(1))] + [Atom(F(t), F(1)) for t in extra_atoms]
    return VectorialMeasure(curve, F(2), [
        MeasureComponent(0, [], atoms),
        MeasureComponent(1, [], []),
        MeasureComponent(2, [WeightPiece(Arc(F(0), F(1)), PowerForm(F(1)))], []),
        MeasureComponent(3, [WeightPiece(Arc(F(1), F(2)), PowerForm(F(1)))], []),
    ])


def project_out(vecs, target):
    """Relative residual of target against span(vecs), all sampled rows."""
    B = np.vstack(vecs).T
    Q, _ = np.linalg.qr(B)
    r = target - Q @ (Q.conj().T @ target)
    return float(np.linalg.norm(r) / np.linalg.norm(target))


def sample(poly, ts, orders=(0, 1, 2)):
    return np.concatenate(
        [[poly.eval_param(float(t), o) for t in ts] for o in orders]).astype(complex)


class TestTwoSidedExample:
    def test_dim_two(self):
        res = solve_kernel(two_sided_example())
        assert res.dim == 2
        assert not res.low_confidence
        assert res.exact_dim == 2

    def test_span_is_x_and_plus_part_squared(self):
        res = solve_kernel(two_sided_example())
        # 800 points never hit the two-piece junction t = 1 exactly, where
        # one-sided evaluation would make the comparison ambiguous
        ts = np.linspace(0.0, 2.0, 800)
        basis = [sample(b, ts) for b in res.basis]
        # f(z) = z on the whole curve: z = t - 1
        fx = np.concatenate([ts - 1, np.ones_like(ts), np.zeros_like(ts)]).astype(complex)
        # g(z) = z^2 on z >= 0, 0 on z < 0
        zp = np.where(ts >= 1, ts - 1, 0.0)
        g = np.concatenate([zp ** 2, 2 * zp, np.where(ts >= 1, 2.0, 0.0)]).astype(complex)
        assert project_out(basis, fx) < 1e-8
        assert project_out(basis, g) < 1e-8

    def test_basis_members_have_tiny_seminorm(self):
        res = solve_kernel(two_sided_example())
        for b in res.basis:
            assert sobolev_norm(res.mu, b) < 1e-8

    def test_two_more_atoms_kill_the_kernel(self):
        # atoms at z = -1/2 and z = 1/2, i.e. t = 1/2 and 3/2
        res = solve_kernel(two_sided_example(extra_atoms=(F(1, 2), F(3, 2))))
        assert res.dim == 0
        assert res.exact_dim == 0

    def test_duplicate_atom_is_inert(self):
        # a second atom at the same point adds a dependent row only
        res = solve_kernel(two_sided_example(extra_atoms=(F(1),)))
        assert res.dim == 2

    def test_atom_where_kernel_lives_drops_dim_by_one(self):
        # one extra constraint at a point some kernel element does not vanish
        # at removes exactly one dimension, twice over
        assert solve_kernel(two_sided_example(extra_atoms=(F(3, 2),))).dim == 1
        assert solve_kernel(two_sided_example(extra_atoms=(F(3, 2), F(0)))).dim == 0


class TestDyadicFamily:
    @pytest.mark.parametrize("depth", [1, 2, 3, 4])
    def test_plain_dim_one_stable_dim_zero(self, depth):
        res = solve_kernel(dyadic_counterexample(depth))
        assert res.dim == 1
        assert stable_kernel_dim(res) == 0

    def test_window_keeps_g1(self):
        mu = dyadic_counterexample(1).restrict([Arc(F(1, 16), F(1))])
        res = solve_kernel(mu)
        assert res.dim == 1
        ts = np.linspace(1 / 16, 1.0, 1501)
        basis = [sample(b, ts) for b in res.basis]

        def g1(order):
            out = []
            for t in ts:
                x = float(t)
                if x <= 1 / 4 + 1e-15:
                    v = {0: (x - 1 / 4) * (x - 1 / 8), 1: 2 * x - 3 / 8, 2: 2.0}[order]
                else:
                    v = 0.0
                out.append(v)
            return out

        target = np.concatenate([g1(o) for o in (0, 1, 2)]).astype(complex)
        assert project_out(basis, target) < 1e-8

    def test_exact_agrees_with_float(self):
        res = solve_kernel(dyadic_counterexample(2))
        fv = [b.coefficient_vector() for b in res.basis]
        assert res.exact_dim == res.dim
        assert span_residual(fv, res.exact_basis) < 1e-8
        assert span_residual(res.exact_basis, fv) < 1e-8


class TestFirstOrder:
    def test_split_support_indicator(self):
        mu = load_corpus_measure("split_support_k1")
        res = solve_kernel(mu)
        assert res.dim == 1
        b = res.basis[0]
        # the kernel element is the indicator of the massless island
        v_left = b.eval_param(0.2, 0)
        v_right = b.eval_param(0.8, 0)
        assert abs(v_left) < 1e-8 * abs(v_right)
        assert abs(b.eval_param(0.9, 1)) < 1e-8 * abs(v_right)

    def test_full_mass_trivial_kernel(self):
        mu = load_corpus_measure("sobolev_leb_k1")
        assert solve_kernel(mu).dim == 0

    def test_empty_decomposition(self):
        mu = load_corpus_measure("legendre_k0")
        res = solve_kernel(mu)
        assert res.dim == 0
        assert res.method == "empty"


class TestC0Check:
    def test_two_sided_example_not_in_c0(self):
        res = solve_kernel(two_sided_example())
        assert check_c0(res) == "no"

    def test_trivial_kernel_in_c0(self):
        res = solve_kernel(load_corpus_measure("sobolev_leb_k1"))
        assert check_c0(res) == "yes"

    def test_truncated_family_above_k2_unknown(self):
        res = solve_kernel(dyadic_counterexample(2))
        assert check_c0(res) == "unknown"


class TestCorpusAgreement:
    def test_exact_matches_float_on_rational_members(self, corpus_manifest, corpus_docs):
        for entry in corpus_manifest:
            if not entry["rational"]:
                continue
            mu = parse_measure(corpus_docs[entry["file"]])
            if len([c for c in mu.components]) > 3:
                continue
            res = solve_kernel(mu)
            assert res.exact_dim is not None, entry["file"]
            assert res.exact_dim == res.dim, entry["file"]
            if res.dim:
                fv = [b.coefficient_vector() for b in res.basis]
                assert span_residual(fv, res.exact_basis) < 1e-8, entry["file"]

    def test_manifest_dims(self, corpus_manifest, corpus_docs):
        for entry in corpus_manifest:
            mu = parse_measure(corpus_docs[entry["file"]])
            assert solve_kernel(mu).dim == entry["expect"]["kernelDim"], entry["file"]
