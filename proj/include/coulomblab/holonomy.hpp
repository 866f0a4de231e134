#pragma once

#include "coulomblab/coulomb.hpp"

namespace clab {

/// Closed loop of connection forms, piecewise linear in the parameter.
struct ConnectionLoop {
  std::vector<double> times;      // ascending, t[0] = 0, t.back() = 1
  std::vector<FormField> eta;     // conductor 1-forms per sample
  void validate() const;          // closure, sample count, conductor checks
};

/// Square loop of side eps in span{alpha, beta} based at A.
ConnectionLoop square_loop(const ConnectionState& A, const FormField& alpha,
                           const FormField& beta, double eps, int steps_per_edge);

struct HolonomyResult {
  GaugeTransform g_end;
  std::vector<double> vertical_residuals;  // per step, relative
  int steps = 0;
  std::string integrator = "rkmk4";
};

/// Horizontal lift of the loop with respect to the Coulomb connection
/// (connection form G_A d*_A), integrating g' = g gamma(t) with
/// gamma = -G_{A(t).g} d*_{A(t).g} (Ad(g^{-1}) eta'(t)).
HolonomyResult horizontal_lift(const ConnectionState& base, const ConnectionLoop& loop,
                               double cg_tol = 1e-11);

struct HolonomyStudyRow {
  double eps;
  double coeff_error;  // || log(g)/eps^2 - R_A(alpha,beta) || / ||R||
};

struct HolonomyStudy {
  std::vector<HolonomyStudyRow> rows;
  double fitted_order = 0;  // of coeff_error vs eps
  double retrace_norm = 0;  // || log g || for a retraced loop at the largest eps
};

HolonomyStudy curvature_holonomy_study(const ConnectionState& A, const FormField& alpha,
                                       const FormField& beta, const std::vector<double>& eps_list,
                                       int steps_per_edge = 16);

}  // namespace clab
