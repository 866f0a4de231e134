#pragma once

#include "coulomblab/field.hpp"
#include "coulomblab/grid.hpp"
#include "coulomblab/su2.hpp"

namespace clab {

/// Scalar-array stencils (periodic 4th-order central laterally, SBP rows in x3).
void apply_dlat(const DomainGrid& g, const double* in, double* out, int axis);
void apply_d3(const DomainGrid& g, const double* in, double* out);
void apply_d3_transpose(const DomainGrid& g, const double* in, double* out);

/// Exterior derivative: p in {0,1}. Throws std::invalid_argument for p = 2.
FormField exterior_d(const FormField& u);

/// Exact discrete adjoint of exterior_d under the weighted inner product,
/// with the boundary rows removed by the tangential-trace projection (the
/// projected part pairs to zero against conductor fields, so
/// <d u, v> = <u, d* v> holds to round-off for conductor u). p in {1,2}.
FormField codifferential(const FormField& v);

/// Tangential-trace projection per degree; idempotent.
FormField conductor_project(const FormField& u);
/// Max tangential-trace magnitude on the faces (0 for conductor fields).
double conductor_defect(const FormField& u);

/// [alpha . beta] = sum_ij [alpha_i, beta_j] g^{ij}; antisymmetric.
FormField wedge_dot(const FormField& alpha, const FormField& beta);
/// [alpha, phi](X) = [alpha(X), phi].
FormField bracket_form(const FormField& alpha, const FormField& phi);
/// Nodewise bracket of two 0-forms.
FormField bracket0(const FormField& x, const FormField& y);

/// Hodge star on 1-forms, *dx_j = a g^{jm} mu_m.
FormField hodge_star_1to2(const FormField& alpha);
/// Inverse star via the minor identity for the inverse metric.
FormField hodge_star_2to1(const FormField& v);

/// L2 inner products (deterministic summation order).
double inner(const FormField& u, const FormField& v);
double norm(const FormField& u);

struct Gram {
  static double coeff(const FormField& f, int k);
};

/// Covariant operators at connection form eta (a conductor 1-form).
FormField covariant_d(const FormField& eta, const FormField& u);
FormField covariant_d_star(const FormField& eta, const FormField& v);
/// Delta_A f = d*_A d_A f, face values zeroed (interior contract).
FormField laplacian(const FormField& eta, const FormField& f);
/// Independent expansion path: Delta_0 f + d*([eta,f]) - [eta . df] - [eta . [eta,f]].
FormField laplacian_expanded(const FormField& eta, const FormField& f);

/// Constant-coefficient 0-form from algebra coefficients.
FormField constant_field(const DomainGrid& g, const double* coeff, int lie_dim = 3);

}  // namespace clab
