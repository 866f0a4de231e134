#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace clab {

enum class Face { F0 = 0, F1 = 1 };  // x3 = 0 and x3 = 1

/// Metric on the slab T^2 x [0,1] in normal-adapted form: g13 = g23 = 0 and
/// g33 = 1 everywhere, positive definite lateral block.
struct MetricSpec {
  enum class Family { Flat, Warped, Custom };
  Family family = Family::Flat;
  /// Warped family: g = diag(e^{2 phi(x3)}, e^{2 phi(x3)}, 1), phi a polynomial.
  std::vector<double> phi_coeffs;
  /// Custom: lateral block callback (must keep g33 = 1, g13 = g23 = 0).
  std::function<std::array<double, 3>(double, double, double)> lateral;  // g11, g12, g22

  static MetricSpec flat() { return MetricSpec{}; }
  static MetricSpec warped(std::vector<double> coeffs);

  double phi(double x3) const;
  double dphi(double x3) const;
  double d2phi(double x3) const;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scalar samples on the lateral grid of one boundary face.
struct BoundaryField {
  int nlat = 0;
  std::vector<double> values;  // nlat*nlat, row-major (i1, i2)
  double& at(int i1, int i2) { return values[static_cast<size_t>(i1) * nlat + i2]; }
  double at(int i1, int i2) const { return values[static_cast<size_t>(i1) * nlat + i2]; }
  double max_abs() const;
};

/// One-dimensional derivative operator along x3: 4th-order central rows in the
/// interior with the 4-row second-order boundary closure, plus the compatible
/// quadrature weights (the pair satisfies summation by parts, which is what
/// makes the discrete codifferential exact; see ops.cpp).
struct Axis3Op {
  int n = 0;
  double h = 0;
  std::vector<double> weights;                      // quadrature weights (length n)
  std::vector<std::vector<std::pair<int, double>>> rows;   // D
  std::vector<std::vector<std::pair<int, double>>> rows_t; // D^T
  void build(int n_, double h_);
};

/// Discretized slab domain with cached metric tensors.
class DomainGrid {
 public:
  DomainGrid(const MetricSpec& spec, int nlat, int nnorm);

  int nlat() const { return nlat_; }
  int nnorm() const { return nnorm_; }
  size_t nodes() const { return static_cast<size_t>(nlat_) * nlat_ * nnorm_; }
  double hlat() const { return hlat_; }
  double h3() const { return h3_; }
  double hmax() const { return hlat_ > h3_ ? hlat_ : h3_; }
  size_t index(int i1, int i2, int i3) const {
    return (static_cast<size_t>(i1) * nlat_ + i2) * nnorm_ + i3;
  }
  double x1(int i) const { return i * hlat_; }
  double x3(int i) const { return i * h3_; }

  const MetricSpec& spec() const { return spec_; }
  const Axis3Op& axis3() const { return ax3_; }

  // per-node metric caches
  const std::vector<double>& a() const { return a_; }          // sqrt(det g)
  const std::vector<double>& g11() const { return g11_; }
  const std::vector<double>& g12() const { return g12_; }
  const std::vector<double>& g22() const { return g22_; }
  const std::vector<double>& gi11() const { return gi11_; }    // inverse lateral block
  const std::vector<double>& gi12() const { return gi12_; }
  const std::vector<double>& gi22() const { return gi22_; }
  /// Quadrature weight times volume factor, w(x) a(x).
  const std::vector<double>& wa() const { return wa_; }
  double volume() const { return volume_; }

  int face_node(Face f) const { return f == Face::F0 ? 0 : nnorm_ - 1; }
  /// +1 if the inward normal is +d/dx3 (F0), -1 at F1.
  double inward_sign(Face f) const { return f == Face::F0 ? 1.0 : -1.0; }

  /// tau = da(nu)/a on a face, evaluated from the analytic warp when available,
  /// else by the one-sided stencil. H = tau/2.
  BoundaryField mean_curvature_tau(Face f) const;
  /// Same tau through the lateral-block determinant route (Lemma-level identity check).
  BoundaryField mean_curvature_tau_minor_route(Face f) const;
  /// d(tau-extension)/d nu at the face: derivative of the bulk field da(x)/a along inward normal.
  BoundaryField dtau_dnu(Face f) const;

  /// Restriction of a scalar nodal field to a face.
  BoundaryField boundary_restrict(const std::vector<double>& field, Face f) const;
  /// One-sided O(h^2) three-point derivative along the inward normal.
  BoundaryField normal_derivative(const std::vector<double>& field, Face f) const;
  /// One-sided derivative of order `deriv` at the face from `npts` nodes (inward parametrized).
  BoundaryField face_derivative(const std::vector<double>& field, Face f, int deriv, int npts) const;
  /// Trace at the face extrapolated from interior nodes first..first+2 (quadratic).
  BoundaryField face_extrapolate(const std::vector<double>& field, Face f, int first) const;

 private:
  MetricSpec spec_;
  int nlat_, nnorm_;
  double hlat_, h3_;
  Axis3Op ax3_;
  std::vector<double> a_, g11_, g12_, g22_, gi11_, gi12_, gi22_, wa_;
  double volume_ = 0;
};

/// Weights c_k with sum_k c_k f(k h) ~ f^(deriv)(0), exact on polynomials of
/// degree npts-1.
std::vector<double> onesided_coeffs(int deriv, int npts, double h);

}  // namespace clab
