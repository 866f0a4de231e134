#pragma once

#include <array>

#include "coulomblab/solver.hpp"

namespace clab {

/// k-valued samples on one face (one BoundaryField per algebra coefficient).
struct LieBoundary {
  std::vector<BoundaryField> comp;
  double max_abs() const;
  LieBoundary& operator-=(const LieBoundary& o);
};

/// K-valued map on the grid, identity on both faces (conductor gauge group).
class GaugeTransform {
 public:
  explicit GaugeTransform(const DomainGrid& grid);  // identity
  static GaugeTransform exp_field(const FormField& X);  // X conductor 0-form

  const DomainGrid& grid() const { return *grid_; }
  cplx* at(size_t node) { return data_.data() + 4 * node; }
  const cplx* at(size_t node) const { return data_.data() + 4 * node; }

  GaugeTransform inverse() const;
  GaugeTransform compose(const GaugeTransform& h) const;  // pointwise this * h
  FormField log() const;                                  // principal branch
  double distance_to_identity() const;                    // sup over nodes
  double boundary_identity_defect() const;
  double unitarity_defect() const;

 private:
  const DomainGrid* grid_ = nullptr;
  std::vector<cplx> data_;
};

/// Ad(g^{-1}) (or Ad(g) with inverse = false) applied nodewise to a k-valued form.
FormField adjoint_transport(const GaugeTransform& g, const FormField& omega, bool inverse = true);

/// Gauge action on the connection form: eta' = g^{-1} dg + Ad(g^{-1}) eta.
FormField gauge_act(const ConnectionState& A, const GaugeTransform& g);

struct GaugeFixResult {
  GaugeTransform g;
  SolveReport solve;
  int newton_iterations = 0;
  double residual = 0;
};

/// Coulomb gauge fixing (local slice): conductor g with d*_A((A+eta).g - A) = 0,
/// Newton iteration with G_A as approximate inverse of the linearization.
GaugeFixResult coulomb_gauge_fix(const ConnectionState& A, const FormField& eta,
                                 double tol = 1e-9, int max_newton = 50,
                                 double smallness = -1.0);

struct HorizontalForm {
  FormField form;
  double dstar_residual = 0;  // relative
};

/// P_A omega = omega - d_A G_A d*_A omega; idempotent, range in H_A.
HorizontalForm horizontal_project(const ConnectionState& A, const FormField& omega);

bool is_horizontal(const ConnectionState& A, const FormField& alpha, double rel_tol = 1e-8);

/// R_A(alpha, beta) = -2 G_A([alpha . beta]); requires certified horizontal inputs.
FormField coulomb_curvature(const ConnectionState& A, const FormField& alpha,
                            const FormField& beta, SolveReport* rep = nullptr);

/// T_A(f) = d_A(Delta_A f)(nu) + 2 tau Delta_A f per face. Pass lap_known when
/// Delta_A f is available exactly (f in the range of G_A); otherwise the trace
/// is evaluated from f by one-sided stencils (flat connection only).
std::array<LieBoundary, 2> boundary_operator_T(const ConnectionState& A, const FormField& f,
                                               const FormField* lap_known = nullptr);
double boundary_sup(const std::array<LieBoundary, 2>& t);

struct BctReport {
  double residual_horizontal = 0;  // sup of d_A[a.b](nu) + 2 tau [a.b] over faces
  double residual_general = 0;     // including the codifferential correction terms
};

BctReport verify_bct(const ConnectionState& A, const FormField& alpha, const FormField& beta,
                     bool require_horizontal = true);

struct Smooth1Report {
  double identity_residual = 0;   // boundary bracket-trace identity, sup over faces
  double expansion_residual = 0;  // Delta[g1,g2] vs expansion at deep interior nodes, relative
};

/// Bracket identity of the boundary trace operator for L_0-type inputs
/// (flat connection; pass the known Laplacians of g1, g2).
Smooth1Report verify_smooth1(const FormField& g1, const FormField& g2, const FormField& lap_g1,
                             const FormField& lap_g2);

}  // namespace clab
