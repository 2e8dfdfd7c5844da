"""Weighted Sobolev spaces on plane curves.

Measures are vectors of nonnegative components, one per derivative order,
each a sum of atoms and weighted arc length.  The package computes the
structural sets driving regularity (Muckenhoupt-manageable sets, regular
sets), the kernel of the Sobolev seminorm, classification certificates under
which boundedness of multiplication by z is decidable, and the p = 2
orthogonal-polynomial machinery (Gram matrices, truncated multiplication
operators, zero bounds).
"""

__version__ = "0.1.0"

from .curves import Curve, CurveError, build_curve
from .measures import (Arc, Atom, GeneralForm, MeasureComponent, MeasureError,
                       MonotoneForm, PowerForm, TruncationInfo, VectorialMeasure,
                       WeightPiece, ZeroForm, dyadic_counterexample, parse_measure)
from .quadrature import (QuadratureResult, component_ac_mass, component_mass,
                         gauss_legendre, integrate_piece, integrate_weighted,
                         piece_rule, total_mass)
from .weights import (AdmissibilityReport, ConsistencyReport, MuckenhouptReport,
                      OmegaSet, RegularSet, WeightAnalysis, admissibility,
                      arc_consistency, hardy_constant, lambda_minus, lambda_plus,
                      one_sided_bp)
from .kernel import (KernelResult, PiecewisePolynomial, check_c0, solve_kernel,
                     span_residual, stable_kernel_dim)
from .orthopoly import (AdaptedBasis, BasisPolynomial, GramMatrix, MultOpReport,
                        NullPolynomialError, NumericsError, OrthoBasis,
                        UnsupportedOperation, ZeroSet, gram_matrix,
                        multiplication_matrix, ortho_basis,
                        orthonormality_residual, poly_zeros, sobolev_inner,
                        sobolev_norm, verify_zero_bound)
from .classify import (ArcCase, BoundednessVerdict, ESDReport, KernelCertificate,
                       MonotoneACReport, TypeAReport, TypeBReport, TypeCReport,
                       boundedness_verdict, classify_monotone_ac, classify_type_a,
                       classify_type_b, classify_type_c, esd, esd_closure,
                       kernel_certificate, measure_finite, prop_k1_kernel_dim,
                       regular_components, seam_cut, structural_breakpoints)

__all__ = [name for name in dir() if not name.startswith("_")]
