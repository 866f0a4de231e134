#include "coulomblab/solver.hpp"

#include <cmath>
#include <random>

namespace clab {

namespace {

double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;  // deterministic across platforms
}

double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng), u2 = uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

ConnectionState::ConnectionState(const DomainGrid& grid, FormField eta, SolverConfig cfg)
    : grid_(&grid), eta_(std::move(eta)), cfg_(cfg), flat_(false) {
  if (eta_.degree() != 1) throw std::invalid_argument("ConnectionState: eta must be a 1-form");
  if (conductor_defect(eta_) > 1e-12)
    throw std::invalid_argument("ConnectionState: eta violates conductor boundary conditions");
  flat_ = eta_.max_abs() == 0.0;
  build_diag();
}

ConnectionState::ConnectionState(const DomainGrid& grid, SolverConfig cfg)
    : grid_(&grid), eta_(grid, 1, 3), cfg_(cfg), flat_(true) {
  build_diag();
}

FormField ConnectionState::d(const FormField& u) const {
  if (flat_ || u.lie_dim() == 1) return exterior_d(u);
  return covariant_d(eta_, u);
}

FormField ConnectionState::d_star(const FormField& v) const {
  if (flat_ || v.lie_dim() == 1) return codifferential(v);
  return covariant_d_star(eta_, v);
}

FormField ConnectionState::lap(const FormField& f) const {
  return conductor_project(d_star(d(f)));
}

void ConnectionState::build_diag() {
  const DomainGrid& g = *grid_;
  const size_t n = g.nodes();
  const int nl = g.nlat(), nn = g.nnorm();
  std::vector<double> flatdiag(n, 0.0);
  const auto& wa = g.wa();
  const auto& gi11 = g.gi11();
  const auto& gi22 = g.gi22();

  const double c1 = 8.0 / (12.0 * g.hlat()), c2 = 1.0 / (12.0 * g.hlat());
  for (int i1 = 0; i1 < nl; ++i1) {
    for (int i2 = 0; i2 < nl; ++i2) {
      for (int i3 = 0; i3 < nn; ++i3) {
        size_t id = g.index(i1, i2, i3);
        double s = 0;
        // lateral axis 1 rows touching column (i1,i2,i3)
        auto lat = [&](int axis, const std::vector<double>& fac) {
          double acc = 0;
          for (int off : {-2, -1, 1, 2}) {
            double coef = (std::abs(off) == 1) ? c1 : c2;
            int j1 = i1, j2 = i2;
            if (axis == 0)
              j1 = (i1 + off + 2 * nl) % nl;
            else
              j2 = (i2 + off + 2 * nl) % nl;
            size_t row = g.index(j1, j2, i3);
            acc += wa[row] * fac[row] * coef * coef;
          }
          return acc;
        };
        s += lat(0, gi11);
        s += lat(1, gi22);
        // x3 axis: rows r with column i3
        for (auto [r, v] : g.axis3().rows_t[i3]) {
          size_t row = g.index(i1, i2, r);
          s += wa[row] * v * v;
        }
        flatdiag[id] = s / wa[id];
      }
    }
  }
  int dim = eta_.grid() ? eta_.lie_dim() : 3;
  diag_.assign(dim, flatdiag);
  if (!flat_) {
    const auto& gi12 = g.gi12();
    for (size_t i = 0; i < n; ++i) {
      double e[3][3];
      for (int c = 0; c < 3; ++c)
        for (int k = 0; k < 3; ++k) e[c][k] = eta_.comp(c, k)[i];
      // diagonal of -[eta . [eta, .]] per lie component:
      // sum_ij g^{ij} ( (eta_i . eta_j) - eta_i,a eta_j,a )
      auto dot = [&](const double* x, const double* y) {
        return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
      };
      double gij[3][3] = {{gi11[i], gi12[i], 0}, {gi12[i], gi22[i], 0}, {0, 0, 1.0}};
      for (int a = 0; a < 3; ++a) {
        double add = 0;
        for (int ci = 0; ci < 3; ++ci)
          for (int cj = 0; cj < 3; ++cj) {
            if (gij[ci][cj] == 0) continue;
            add += gij[ci][cj] * (dot(e[ci], e[cj]) - e[ci][a] * e[cj][a]);
          }
        diag_[a][i] += add;
      }
    }
  }
}

std::pair<FormField, SolveReport> green(const ConnectionState& A, const FormField& f,
                                        std::optional<double> tol_opt, const FormField* initial) {
  const DomainGrid& g = A.grid();
  SolveReport rep;
  rep.tolerance = tol_opt.value_or(A.config().tolerance);
  int maxit = A.config().max_iterations;
  if (maxit <= 0) maxit = static_cast<int>(20.0 * std::sqrt(static_cast<double>(g.nodes())));

  FormField b = conductor_project(f);
  double nb = norm(b);
  FormField x(g, 0, f.lie_dim());
  if (nb == 0.0) return {x, rep};
  if (initial) x = conductor_project(*initial);

  auto precond = [&](const FormField& r) {
    FormField z = r;
    for (int k = 0; k < r.lie_dim(); ++k) {
      const auto& dgk = A.diagonal(f.lie_dim() == 1 ? 0 : k);
      double* p = z.comp(0, k);
      for (size_t i = 0; i < g.nodes(); ++i) p[i] /= dgk[i];
    }
    return conductor_project(z);
  };

  FormField r = b - A.lap(x);
  FormField z = precond(r);
  FormField p = z;
  double rz = inner(r, z);
  double rn = norm(r);
  int it = 0;
  while (rn > rep.tolerance * nb && it < maxit) {
    FormField Ap = A.lap(p);
    double pAp = inner(p, Ap);
    if (!(pAp > 0) || !std::isfinite(pAp)) {
      rep.breakdown = true;
      rep.iterations = it;
      rep.residual = rn / nb;
      throw SolverError("green: CG breakdown", rep);
    }
    double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    rn = norm(r);
    if (rn <= rep.tolerance * nb) {
      ++it;
      break;
    }
    z = precond(r);
    double rz2 = inner(r, z);
    double beta = rz2 / rz;
    rz = rz2;
    FormField pn = z;
    pn += beta * p;
    p = pn;
    ++it;
  }
  rep.iterations = it;
  rep.residual = rn / nb;
  if (rep.residual > rep.tolerance) {
    rep.breakdown = true;
    throw SolverError("green: max iterations exceeded", rep);
  }
  return {x, rep};
}

FormField scalar_green(const DomainGrid& grid, const FormField& phi, SolveReport* out_rep) {
  if (phi.lie_dim() != 1 || phi.degree() != 0)
    throw std::invalid_argument("scalar_green: real scalar 0-form required");
  const double* p = phi.comp(0, 0);
  double mx = 0;
  for (size_t i = 0; i < grid.nodes(); ++i) {
    if (p[i] < -1e-14) throw std::invalid_argument("scalar_green: phi must be nonnegative");
    mx = std::max(mx, p[i]);
  }
  if (mx == 0.0) throw std::invalid_argument("scalar_green: phi must not be identically zero");
  for (int i1 = 0; i1 < grid.nlat(); ++i1)
    for (int i2 = 0; i2 < grid.nlat(); ++i2)
      for (int i3 : {0, 1, grid.nnorm() - 2, grid.nnorm() - 1})
        if (std::abs(p[grid.index(i1, i2, i3)]) > 0)
          throw std::invalid_argument("scalar_green: support must stay 2 cells away from faces");
  ConnectionState flat(grid);
  auto [u, rep] = green(flat, phi);
  if (out_rep) *out_rep = rep;
  return u;
}

BoundaryField hopf_normal_derivative(const DomainGrid& grid, const FormField& gphi, Face f) {
  auto d = grid.normal_derivative(gphi.scalar_slice(0, 0), f);
  double margin = 1e300;
  for (double v : d.values) margin = std::min(margin, v);
  if (!(margin > 0))
    throw std::runtime_error("hopf_normal_derivative: non-positive margin (grid too coarse)");
  return d;
}

PoincareEstimate poincare_estimate(const ConnectionState& A, int samples, uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("poincare_estimate: samples >= 1 required");
  PoincareEstimate est;
  const DomainGrid& g = A.grid();
  for (int s = 0; s < samples; ++s) {
    FormField f = random_smooth_conductor(g, seed + s, 3);
    double ratio = norm(f) / norm(A.d(f));
    est.sampled_max = std::max(est.sampled_max, ratio);
  }
  // inverse power iteration on Delta_A for the sharp constant
  FormField u = random_smooth_conductor(g, seed ^ 0x9e3779b97f4a7c15ull, 2);
  double lambda = 0, prev = -1;
  for (int it = 0; it < 100; ++it) {
    auto [v, rep] = green(A, u, 1e-11);
    double nv = norm(v);
    v *= 1.0 / nv;
    FormField dv = A.d(v);
    lambda = inner(dv, dv) / inner(v, v);
    u = v;
    est.power_iterations = it + 1;
    if (prev > 0 && std::abs(lambda - prev) < 1e-8 * lambda) break;
    prev = lambda;
  }
  est.sharp = 1.0 / std::sqrt(lambda);
  return est;
}

FormField random_smooth_conductor(const DomainGrid& g, uint64_t seed, int kmax, int lie_dim) {
  std::mt19937_64 rng(seed);
  FormField out(g, 0, lie_dim);
  for (int k = 0; k < lie_dim; ++k) {
    for (int n3 = 1; n3 <= kmax + 1; ++n3) {
      for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = 0; k2 <= kmax; ++k2) {
          double cc = gaussian(rng), cs = gaussian(rng);
          double w = 1.0 / (1.0 + n3 * n3 + k1 * k1 + k2 * k2);
          double* p = out.comp(0, k);
          for (int i1 = 0; i1 < g.nlat(); ++i1)
            for (int i2 = 0; i2 < g.nlat(); ++i2) {
              double ph = 2.0 * M_PI * (k1 * g.x1(i1) + k2 * g.x1(i2));
              double latc = std::cos(ph), lats = std::sin(ph);
              for (int i3 = 0; i3 < g.nnorm(); ++i3) {
                double s3 = std::sin(M_PI * n3 * g.x3(i3));
                p[g.index(i1, i2, i3)] += w * s3 * (cc * latc + cs * lats);
              }
            }
        }
      }
    }
  }
  return conductor_project(out);
}

FormField random_smooth_conductor_1form(const DomainGrid& g, uint64_t seed, int kmax) {
  FormField out(g, 1, 3);
  for (int c = 0; c < 3; ++c) {
    FormField comp = random_smooth_conductor(g, seed * 3 + c, kmax);
    for (int k = 0; k < 3; ++k) {
      std::memcpy(out.comp(c, k), comp.comp(0, k), g.nodes() * sizeof(double));
    }
  }
  return conductor_project(out);
}

}  // namespace clab
