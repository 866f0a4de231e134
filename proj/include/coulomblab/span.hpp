#pragma once

#include <array>
#include <optional>

#include "coulomblab/coulomb.hpp"

namespace clab {

struct SupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The explicit exp-cutoff with unit integral, supported on (lo, hi).
struct BumpProfile {
  double lo = 0, hi = 1;
  double normalization = 1;  // fixed so the composite-Simpson integral is 1
  double eval(double t) const;
  /// Samples on n uniformly spaced nodes of step h starting at 0, Simpson-normalized.
  static std::vector<double> sampled(int n, double h, double lo, double hi);
};

/// Smooth plateau cutoff: 1 on [p, q], supported in (u, v).
double plateau(double t, double u, double p, double q, double v);

/// Cumulative composite Simpson along one axis (O(h^4)).
std::vector<double> cumulative_simpson_axis1(const DomainGrid& g, const std::vector<double>& f);

struct SpanTerm {
  FormField alpha;
  FormField beta;
  double coeff = 1.0;  // contribution is coeff * [alpha . beta]
};

struct SpanCertificate {
  FormField target;
  std::vector<SpanTerm> terms;
  double reconstruction_error = 0;  // sup norm
  double max_dstar_residual = 0;
  double max_cbc_defect = 0;
  /// Re-evaluates sum coeff_i [alpha_i . beta_i] - target from the stored forms.
  double reverify() const;
  FormField reconstruct() const;
};

/// Axis windows a < j < k < ie < iv < c < d < l < b of one construction cube.
/// The eta window (k, ie) and the cutoff ramp (iv, c) are separated by at
/// least the stencil reach so their discrete supports cannot touch.
struct SpanWindows {
  double a, b;          // cube
  double j, k, ie;      // eta bump on (k, ie)
  double iv, c, d, l;   // cutoffs: 1 on [c,d], supported in (iv, l)
};
SpanWindows layout_windows(double cube_lo, double cube_hi, double s0, double s1, double h);

/// One interior term (Lemma-noboundary1 mechanism on a normal-adapted metric):
/// alpha = d* omega_1, beta = d* omega_2 with [alpha . beta] = psi [e_a, e_b].
/// psi is a real scalar field supported in the windows' (c,d)^3 box, at least
/// two cells from the faces. Lateral axes may be rolled by (shift1, shift2).
SpanTerm interior_realize(const DomainGrid& g, const FormField& psi, int basis_a, int basis_b,
                          const std::array<double, 2>& cube_x, const std::array<double, 2>& cube_y,
                          const std::array<double, 2>& cube_z, int shift1 = 0, int shift2 = 0);

/// Span realization of a k-valued 0-form with interior support
/// (finite overlapping cube cover + subordinate partition of unity).
SpanCertificate interior_span(const FormField& Psi);

/// One conductor-boundary term (Lemma-lbo mechanism): traces of alpha, beta
/// vanish exactly, d* residual at round-off, [alpha . beta] = psi [e_a, e_b].
/// psi must satisfy d psi(nu) = -2 tau psi on the face within `compat_tol`.
SpanTerm boundary_realize(const DomainGrid& g, const FormField& psi, int basis_a, int basis_b,
                          Face face, double compat_tol = 1e-8);

/// Periodic-lateral chart cover of one face (the multi-chart path of the
/// boundary lemma): realizes a k-valued field supported near the face.
SpanCertificate boundary_span(const FormField& PsiFace, Face face, double compat_tol = 1e-6);

struct BoundaryDataRealization {
  std::vector<std::pair<FormField, FormField>> gh_pairs;  // (g_i, h_i), 0-forms
  FormField f_sum;                                        // sum [g_i, h_i]
  double t_residual = 0;        // sup |T_0(f_sum) - F| over faces
  double hopf_margin = 0;
  std::array<LieBoundary, 2> target;
};

/// Lemma-smooth2 mechanism: realize boundary data F as T_0(sum [g_i, h_i]).
BoundaryDataRealization realize_boundary_data(const DomainGrid& grid,
                                              const std::array<LieBoundary, 2>& F);

struct DecompositionReport {
  std::array<LieBoundary, 2> trace;         // u = T_0(g)
  BoundaryDataRealization boundary_layer;   // f with T_0(f) = u
  double trace_residual_after = 0;          // sup |T_0(g - f)|
  SpanCertificate interior_cert;            // realization of the interior part of w
  SpanCertificate face_cert[2];             // realization near each face
  double total_reconstruction_error = 0;    // sup |sum [a.b] - Delta(g-f)|
  double w_scale = 0;
};

/// Theorem-mainthm pipeline at the flat base connection.
DecompositionReport decompose_gauge_element(const DomainGrid& grid, const FormField& g0);

/// Serialization: JSON manifest + binary field blobs next to it.
void save_certificate(const SpanCertificate& cert, const std::string& dir,
                      const std::string& name);
SpanCertificate load_certificate(const DomainGrid& grid, const std::string& dir,
                                 const std::string& name);

/// Strong-form codifferential of a 1-form by direct stencils (consistent at
/// every node; used where nodal values near the faces matter).
FormField codifferential_direct(const FormField& v);

}  // namespace clab
