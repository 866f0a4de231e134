#include "coulomblab/grid.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace clab {

MetricSpec MetricSpec::warped(std::vector<double> coeffs) {
  MetricSpec s;
  s.family = Family::Warped;
  s.phi_coeffs = std::move(coeffs);
  return s;
}

double MetricSpec::phi(double x3) const {
  double p = 0, t = 1;
  for (double c : phi_coeffs) {
    p += c * t;
    t *= x3;
  }
  return p;
}

double MetricSpec::dphi(double x3) const {
  double p = 0, t = 1;
  for (size_t k = 1; k < phi_coeffs.size(); ++k) {
    p += phi_coeffs[k] * k * t;
    t *= x3;
  }
  return p;
}

double MetricSpec::d2phi(double x3) const {
  double p = 0, t = 1;
  for (size_t k = 2; k < phi_coeffs.size(); ++k) {
    p += phi_coeffs[k] * k * (k - 1) * t;
    t *= x3;
  }
  return p;
}

double BoundaryField::max_abs() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

void Axis3Op::build(int n_, double h_) {
  n = n_;
  h = h_;
  weights.assign(n, h);
  static const double hw[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
  static const double closure[4][6] = {
      {-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0},
      {-0.5, 0.0, 0.5, 0.0, 0.0, 0.0},
      {4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0},
      {3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0}};
  for (int r = 0; r < 4; ++r) {
    weights[r] = hw[r] * h;
    weights[n - 1 - r] = hw[r] * h;
  }
  rows.assign(n, {});
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (closure[r][c] != 0.0) {
        rows[r].push_back({c, closure[r][c] / h});
        rows[n - 1 - r].push_back({n - 1 - c, -closure[r][c] / h});
      }
    }
  }
  for (int i = 4; i < n - 4; ++i) {
    rows[i] = {{i - 2, 1.0 / (12 * h)},
               {i - 1, -8.0 / (12 * h)},
               {i + 1, 8.0 / (12 * h)},
               {i + 2, -1.0 / (12 * h)}};
  }
  rows_t.assign(n, {});
  for (int r = 0; r < n; ++r) {
    for (auto [c, v] : rows[r]) rows_t[c].push_back({r, v});
  }
}

DomainGrid::DomainGrid(const MetricSpec& spec, int nlat, int nnorm)
    : spec_(spec), nlat_(nlat), nnorm_(nnorm) {
  if (nlat < 8) throw GeometryError("build_grid: N_lat must be >= 8");
  if (nnorm < 9) throw GeometryError("build_grid: N_norm must be >= 9");
  hlat_ = 1.0 / nlat;
  h3_ = 1.0 / (nnorm - 1);
  ax3_.build(nnorm, h3_);

  size_t n = nodes();
  a_.resize(n);
  g11_.resize(n);
  g12_.resize(n);
  g22_.resize(n);
  gi11_.resize(n);
  gi12_.resize(n);
  gi22_.resize(n);
  wa_.resize(n);
  volume_ = 0;
  for (int i1 = 0; i1 < nlat_; ++i1) {
    for (int i2 = 0; i2 < nlat_; ++i2) {
      for (int i3 = 0; i3 < nnorm_; ++i3) {
        size_t id = index(i1, i2, i3);
        double X1 = x1(i1), X2 = x1(i2), X3 = x3(i3);
        double g11, g12, g22;
        switch (spec_.family) {
          case MetricSpec::Family::Flat:
            g11 = g22 = 1.0;
            g12 = 0.0;
            break;
          case MetricSpec::Family::Warped: {
            double e = std::exp(2.0 * spec_.phi(X3));
            g11 = g22 = e;
            g12 = 0.0;
            break;
          }
          case MetricSpec::Family::Custom: {
            auto g = spec_.lateral(X1, X2, X3);
            g11 = g[0];
            g12 = g[1];
            g22 = g[2];
            break;
          }
          default:
            throw GeometryError("unknown metric family");
        }
        double det = g11 * g22 - g12 * g12;
        if (!(det > 0.0) || !(g11 > 0.0)) {
          throw GeometryError("build_grid: metric not positive definite at a node");
        }
        g11_[id] = g11;
        g12_[id] = g12;
        g22_[id] = g22;
        gi11_[id] = g22 / det;
        gi12_[id] = -g12 / det;
        gi22_[id] = g11 / det;
        a_[id] = std::sqrt(det);  // g33 = 1
        wa_[id] = hlat_ * hlat_ * ax3_.weights[i3] * a_[id];
        volume_ += wa_[id];
      }
    }
  }
}

BoundaryField DomainGrid::boundary_restrict(const std::vector<double>& field, Face f) const {
  BoundaryField out;
  out.nlat = nlat_;
  out.values.resize(static_cast<size_t>(nlat_) * nlat_);
  int i3 = face_node(f);
  for (int i1 = 0; i1 < nlat_; ++i1)
    for (int i2 = 0; i2 < nlat_; ++i2) out.at(i1, i2) = field[index(i1, i2, i3)];
  return out;
}

BoundaryField DomainGrid::face_derivative(const std::vector<double>& field, Face f, int deriv,
                                          int npts) const {
  auto c = onesided_coeffs(deriv, npts, h3_);
  BoundaryField out;
  out.nlat = nlat_;
  out.values.assign(static_cast<size_t>(nlat_) * nlat_, 0.0);
  for (int i1 = 0; i1 < nlat_; ++i1) {
    for (int i2 = 0; i2 < nlat_; ++i2) {
      double s = 0;
      for (int k = 0; k < npts; ++k) {
        int i3 = (f == Face::F0) ? k : nnorm_ - 1 - k;
        s += c[k] * field[index(i1, i2, i3)];
      }
      out.at(i1, i2) = s;
    }
  }
  return out;
}

BoundaryField DomainGrid::normal_derivative(const std::vector<double>& field, Face f) const {
  return face_derivative(field, f, 1, 3);
}

BoundaryField DomainGrid::face_extrapolate(const std::vector<double>& field, Face f,
                                           int first) const {
  // quadratic extrapolation to the face from nodes first, first+1, first+2
  BoundaryField out;
  out.nlat = nlat_;
  out.values.assign(static_cast<size_t>(nlat_) * nlat_, 0.0);
  // Lagrange at 0 of nodes first..first+2 (in units of h): coefficients
  double k0 = first, k1 = first + 1, k2 = first + 2;
  double c0 = (k1 * k2) / ((k1 - k0) * (k2 - k0));
  double c1 = (k0 * k2) / ((k0 - k1) * (k2 - k1));
  double c2 = (k0 * k1) / ((k0 - k2) * (k1 - k2));
  for (int i1 = 0; i1 < nlat_; ++i1) {
    for (int i2 = 0; i2 < nlat_; ++i2) {
      auto node = [&](int k) {
        int i3 = (f == Face::F0) ? k : nnorm_ - 1 - k;
        return field[index(i1, i2, i3)];
      };
      out.at(i1, i2) = c0 * node(first) + c1 * node(first + 1) + c2 * node(first + 2);
    }
  }
  return out;
}

BoundaryField DomainGrid::mean_curvature_tau(Face f) const {
  BoundaryField out;
  out.nlat = nlat_;
  out.values.assign(static_cast<size_t>(nlat_) * nlat_, 0.0);
  if (spec_.family == MetricSpec::Family::Warped) {
    // a = e^{2 phi}: da(nu)/a = 2 phi'(x3) * inward_sign
    double X3 = (f == Face::F0) ? 0.0 : 1.0;
    double t = 2.0 * spec_.dphi(X3) * inward_sign(f);
    for (auto& v : out.values) v = t;
    return out;
  }
  if (spec_.family == MetricSpec::Family::Flat) return out;
  auto da = normal_derivative(a_, f);
  auto af = boundary_restrict(a_, f);
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = da.values[i] / af.values[i];
  return out;
}

BoundaryField DomainGrid::mean_curvature_tau_minor_route(Face f) const {
  // 2 tau = d(det g_lat)(nu) / det g_lat, via the determinant of the lateral block
  std::vector<double> det(nodes());
  for (size_t i = 0; i < nodes(); ++i) det[i] = g11_[i] * g22_[i] - g12_[i] * g12_[i];
  auto dd = normal_derivative(det, f);
  auto df = boundary_restrict(det, f);
  BoundaryField out;
  out.nlat = nlat_;
  out.values.resize(static_cast<size_t>(nlat_) * nlat_);
  for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = 0.5 * dd.values[i] / df.values[i];
  return out;
}

BoundaryField DomainGrid::dtau_dnu(Face f) const {
  BoundaryField out;
  out.nlat = nlat_;
  out.values.assign(static_cast<size_t>(nlat_) * nlat_, 0.0);
  if (spec_.family == MetricSpec::Family::Warped) {
    double X3 = (f == Face::F0) ? 0.0 : 1.0;
    // tau-extension along inward coordinate s: 2 phi'(x3(s)) * sign; d/ds = sign * d/dx3
    double t = 2.0 * spec_.d2phi(X3);  // sign^2 = 1
    for (auto& v : out.values) v = t;
    return out;
  }
  if (spec_.family == MetricSpec::Family::Flat) return out;
  // generic: tau_ext = da/dx3 / a via stencils, then inward derivative
  std::vector<double> tau_ext(nodes());
  const auto& rows = ax3_.rows;
  for (int i1 = 0; i1 < nlat_; ++i1)
    for (int i2 = 0; i2 < nlat_; ++i2)
      for (int i3 = 0; i3 < nnorm_; ++i3) {
        double s = 0;
        for (auto [c, v] : rows[i3]) s += v * a_[index(i1, i2, c)];
        tau_ext[index(i1, i2, i3)] = s / a_[index(i1, i2, i3)];
      }
  auto d = normal_derivative(tau_ext, f);
  double sg = inward_sign(f);
  for (size_t i = 0; i < d.values.size(); ++i) d.values[i] *= sg;  // tau itself carries the sign
  return d;
}

std::vector<double> onesided_coeffs(int deriv, int npts, double h) {
  Eigen::MatrixXd V(npts, npts);
  for (int i = 0; i < npts; ++i)
    for (int k = 0; k < npts; ++k) V(i, k) = std::pow(k * h, i);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(npts);
  double fact = 1;
  for (int i = 2; i <= deriv; ++i) fact *= i;
  rhs(deriv) = fact;
  Eigen::VectorXd c = V.fullPivLu().solve(rhs);
  return std::vector<double>(c.data(), c.data() + npts);
}

}  // namespace clab
