#include "coulomblab/holonomy.hpp"

#include <cmath>

namespace clab {

void ConnectionLoop::validate() const {
  if (times.size() < 9) throw std::invalid_argument("ConnectionLoop: need at least 8 steps");
  if (times.size() != eta.size()) throw std::invalid_argument("ConnectionLoop: size mismatch");
  if (std::abs(times.front()) > 1e-15 || std::abs(times.back() - 1.0) > 1e-15)
    throw std::invalid_argument("ConnectionLoop: parameter must run over [0,1]");
  FormField diff = eta.back() - eta.front();
  if (diff.max_abs() > 1e-12) throw std::invalid_argument("ConnectionLoop: loop not closed");
  for (const auto& e : eta)
    if (conductor_defect(e) > 1e-12)
      throw std::invalid_argument("ConnectionLoop: samples must be conductor 1-forms");
}

ConnectionLoop square_loop(const ConnectionState& A, const FormField& alpha,
                           const FormField& beta, double eps, int steps_per_edge) {
  ConnectionLoop loop;
  const int m = steps_per_edge;
  auto corner = [&](int edge) {
    FormField v(A.grid(), 1, 3);
    switch (edge) {
      case 0:
        break;
      case 1:
        v += alpha;
        break;
      case 2:
        v += alpha;
        v += beta;
        break;
      case 3:
        v += beta;
        break;
      default:
        break;
    }
    v *= eps;
    return v;
  };
  for (int e = 0; e < 4; ++e) {
    FormField a = corner(e), b = corner((e + 1) % 4);
    for (int s = 0; s < m; ++s) {
      double u = static_cast<double>(s) / m;
      loop.times.push_back((e + u) / 4.0);
      FormField v = a;
      FormField d = b - a;
      d *= u;
      v += d;
      loop.eta.push_back(std::move(v));
    }
  }
  loop.times.push_back(1.0);
  loop.eta.push_back(corner(0));
  return loop;
}

namespace {

// dexpinv truncated after the double bracket (enough for 4th order steps)
FormField dexpinv(const FormField& u, const FormField& k) {
  FormField out = k;
  FormField b1 = bracket0(u, k);
  FormField b2 = bracket0(u, b1);
  b1 *= -0.5;
  b2 *= 1.0 / 12.0;
  out += b1;
  out += b2;
  return out;
}

struct LiftContext {
  const DomainGrid* grid;
  const ConnectionLoop* loop;
  double cg_tol;
  FormField warm;  // previous gamma, used as CG initial guess

  FormField eta_at(double t) const {
    const auto& ts = loop->times;
    size_t k = 0;
    while (k + 2 < ts.size() && ts[k + 1] <= t + 1e-15) ++k;
    double dt = ts[k + 1] - ts[k];
    double u = (t - ts[k]) / dt;
    FormField v = loop->eta[k];
    FormField d = loop->eta[k + 1] - loop->eta[k];
    d *= u;
    v += d;
    return v;
  }
  FormField deta_at(double t) const {
    const auto& ts = loop->times;
    size_t k = 0;
    while (k + 2 < ts.size() && ts[k + 1] <= t + 1e-15) ++k;
    FormField d = loop->eta[k + 1] - loop->eta[k];
    d *= 1.0 / (ts[k + 1] - ts[k]);
    return d;
  }

  FormField gamma(double t, const GaugeTransform& g, double* vres) {
    FormField eta_t = eta_at(t);
    FormField etadot = deta_at(t);
    ConnectionState moved(*grid, gauge_act(ConnectionState(*grid, eta_t), g));
    FormField rhs = moved.d_star(adjoint_transport(g, etadot, true));
    auto [u, rep] = green(moved, rhs, cg_tol, warm.grid() ? &warm : nullptr);
    warm = u;
    u *= -1.0;
    if (vres) {
      // verticality of the realized tangent d_A~ gamma + Ad(g^-1) eta'
      FormField tangent = moved.d(u) + adjoint_transport(g, etadot, true);
      double nt = norm(tangent);
      *vres = nt > 0 ? norm(moved.d_star(tangent)) / nt : 0.0;
    }
    return u;
  }
};

}  // namespace

HolonomyResult horizontal_lift(const ConnectionState& base, const ConnectionLoop& loop,
                               double cg_tol) {
  loop.validate();
  const DomainGrid& g = base.grid();
  LiftContext ctx{&g, &loop, cg_tol, FormField()};
  HolonomyResult res{GaugeTransform(g), {}, 0, "rkmk4"};
  const size_t nsteps = loop.times.size() - 1;
  for (size_t s = 0; s < nsteps; ++s) {
    double t0 = loop.times[s], t1 = loop.times[s + 1];
    double dt = t1 - t0;
    double vres = 0;
    FormField K1 = ctx.gamma(t0, res.g_end, &vres);
    FormField u2 = K1;
    u2 *= 0.5 * dt;
    FormField K2 = dexpinv(u2, ctx.gamma(t0 + 0.5 * dt,
                                         res.g_end.compose(GaugeTransform::exp_field(u2)), nullptr));
    FormField u3 = K2;
    u3 *= 0.5 * dt;
    FormField K3 = dexpinv(u3, ctx.gamma(t0 + 0.5 * dt,
                                         res.g_end.compose(GaugeTransform::exp_field(u3)), nullptr));
    FormField u4 = K3;
    u4 *= dt;
    FormField K4 = dexpinv(u4, ctx.gamma(t1, res.g_end.compose(GaugeTransform::exp_field(u4)),
                                         nullptr));
    FormField u = K1;
    K2 *= 2.0;
    K3 *= 2.0;
    u += K2;
    u += K3;
    u += K4;
    u *= dt / 6.0;
    res.g_end = res.g_end.compose(GaugeTransform::exp_field(u));
    res.vertical_residuals.push_back(vres);
    ++res.steps;
  }
  return res;
}

HolonomyStudy curvature_holonomy_study(const ConnectionState& A, const FormField& alpha,
                                       const FormField& beta, const std::vector<double>& eps_list,
                                       int steps_per_edge) {
  if (!is_horizontal(A, alpha) || !is_horizontal(A, beta))
    throw std::invalid_argument("curvature_holonomy_study: inputs must be certified horizontal");
  HolonomyStudy study;
  FormField R = coulomb_curvature(A, alpha, beta);
  double nR = norm(R);
  for (double eps : eps_list) {
    ConnectionLoop loop = square_loop(A, alpha, beta, eps, steps_per_edge);
    HolonomyResult h = horizontal_lift(A, loop);
    FormField X = h.g_end.log();
    X *= 1.0 / (eps * eps);
    FormField diff = X - R;
    study.rows.push_back({eps, norm(diff) / nR});
  }
  if (study.rows.size() >= 2) {
    // least-squares slope of log(err) vs log(eps)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : study.rows) {
      if (r.coeff_error <= 0) continue;
      double x = std::log(r.eps), y = std::log(r.coeff_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n >= 2) study.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  // retraced loop at the largest eps: forward edge then straight back
  {
    double eps = eps_list.empty() ? 0.05 : eps_list.front();
    ConnectionLoop fwd;
    int m = 4 * steps_per_edge;
    for (int s = 0; s <= m; ++s) {
      double t = static_cast<double>(s) / m;
      double u = t < 0.5 ? 2.0 * t : 2.0 * (1.0 - t);
      FormField v = alpha;
      v *= eps * u;
      fwd.times.push_back(t);
      fwd.eta.push_back(std::move(v));
    }
    HolonomyResult h = horizontal_lift(A, fwd);
    study.retrace_norm = norm(h.g_end.log());
  }
  return study;
}

}  // namespace clab
