#pragma once

#include <optional>

#include "coulomblab/field.hpp"
#include "coulomblab/ops.hpp"

namespace clab {

struct SolveReport {
  int iterations = 0;
  double residual = 0;   // final relative residual
  double tolerance = 0;
  bool breakdown = false;
};

struct SolverError : std::runtime_error {
  SolveReport report;
  SolverError(const std::string& msg, SolveReport r) : std::runtime_error(msg), report(r) {}
};

struct SolverConfig {
  double tolerance = 1e-10;
  int max_iterations = 0;  // 0: 20 * sqrt(#unknowns)
};

/// A connection nabla_A = nabla_0 + eta with cached solver scaffolding.
class ConnectionState {
 public:
  ConnectionState(const DomainGrid& grid, FormField eta, SolverConfig cfg = {});
  /// Flat connection.
  explicit ConnectionState(const DomainGrid& grid, SolverConfig cfg = {});

  const DomainGrid& grid() const { return *grid_; }
  const FormField& eta() const { return eta_; }
  const SolverConfig& config() const { return cfg_; }
  bool flat() const { return flat_; }

  FormField d(const FormField& u) const;       // d_A on 0-forms
  FormField d_star(const FormField& v) const;  // d*_A on 1-forms
  FormField lap(const FormField& f) const;     // Delta_A, faces zeroed

  /// Jacobi diagonal of the covariant Laplacian (per lie component).
  const std::vector<double>& diagonal(int liecomp) const { return diag_[liecomp]; }

 private:
  void build_diag();
  const DomainGrid* grid_;
  FormField eta_;
  SolverConfig cfg_;
  bool flat_;
  std::vector<std::vector<double>> diag_;
};

/// Green operator u = G_A f: Delta_A u = f at interior nodes, u = 0 on faces.
std::pair<FormField, SolveReport> green(const ConnectionState& A, const FormField& f,
                                        std::optional<double> tol = std::nullopt,
                                        const FormField* initial = nullptr);

/// Scalar (real-valued) Dirichlet Green operator used by Lemma-smooth2 style
/// constructions. phi must be >= 0, not identically zero, supported at least
/// two cells away from the faces; the result is positive at interior nodes.
FormField scalar_green(const DomainGrid& grid, const FormField& phi, SolveReport* rep = nullptr);

/// Inward normal derivative of a scalar Green solution on a face; all values
/// must be strictly positive (Hopf margin), else a degeneracy error is thrown.
BoundaryField hopf_normal_derivative(const DomainGrid& grid, const FormField& gphi, Face f);

struct PoincareEstimate {
  double sampled_max = 0;   // max ||f|| / ||d_A f|| over random conductor samples
  double sharp = 0;         // 1/sqrt(lambda_min) via inverse power iteration
  int power_iterations = 0;
};

PoincareEstimate poincare_estimate(const ConnectionState& A, int samples, uint64_t seed = 1234);

/// Random smooth conductor 0-form (low-frequency trig modes), for tests/studies.
FormField random_smooth_conductor(const DomainGrid& g, uint64_t seed, int kmax = 2,
                                  int lie_dim = 3);
/// Random conductor 1-form with smooth profile.
FormField random_smooth_conductor_1form(const DomainGrid& g, uint64_t seed, int kmax = 2);

}  // namespace clab
