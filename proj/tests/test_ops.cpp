#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "coulomblab/ops.hpp"
#include "coulomblab/solver.hpp"

using namespace clab;

namespace {

FormField random_field(const DomainGrid& g, int degree, uint64_t seed, int lie = 3) {
  FormField f(g, degree, lie);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (auto& v : f.raw()) v = n(rng);
  return f;
}

FormField sampled0(const DomainGrid& g, double (*fn)(double, double, double), int liecomp = 0) {
  FormField f(g, 0, 3);
  for (int i1 = 0; i1 < g.nlat(); ++i1)
    for (int i2 = 0; i2 < g.nlat(); ++i2)
      for (int i3 = 0; i3 < g.nnorm(); ++i3)
        f.comp(0, liecomp)[g.index(i1, i2, i3)] = fn(g.x1(i1), g.x1(i2), g.x3(i3));
  return f;
}

}  // namespace

TEST_CASE("exterior_d exact on per-axis polynomials, constants to zero") {
  DomainGrid g(MetricSpec::flat(), 12, 13);
  FormField c = sampled0(g, [](double, double, double) { return 4.2; });
  CHECK(exterior_d(c).max_abs() < 1e-13);
  FormField lin = sampled0(g, [](double, double, double z) { return z; }, 0);
  FormField d = exterior_d(lin);
  double dev = 0;
  for (size_t i = 0; i < g.nodes(); ++i) {
    dev = std::max(dev, std::abs(d.comp(2, 0)[i] - 1.0));
    dev = std::max(dev, std::abs(d.comp(0, 0)[i]));
    dev = std::max(dev, std::abs(d.comp(1, 0)[i]));
  }
  CHECK(dev < 1e-12);
  // quadratic along x3
  FormField q = sampled0(g, [](double, double, double z) { return 3 * z * z - z; }, 1);
  FormField dq = exterior_d(q);
  double dev2 = 0;
  for (int i1 = 0; i1 < g.nlat(); ++i1)
    for (int i2 = 0; i2 < g.nlat(); ++i2)
      for (int i3 = 0; i3 < g.nnorm(); ++i3) {
        double z = g.x3(i3);
        dev2 = std::max(dev2, std::abs(dq.comp(2, 1)[g.index(i1, i2, i3)] - (6 * z - 1)));
      }
  CHECK(dev2 < 1e-11);
  CHECK_THROWS_AS(exterior_d(random_field(g, 2, 1)), std::invalid_argument);
}

TEST_CASE("d^2 = 0 to round-off") {
  for (auto spec : {MetricSpec::flat(), MetricSpec::warped({0.0, 0.3})}) {
    DomainGrid g(spec, 10, 12);
    FormField f = random_field(g, 0, 2);
    CHECK(exterior_d(exterior_d(f)).max_abs() < 1e-11 * f.max_abs());
  }
}

TEST_CASE("codifferential is the exact adjoint for conductor u") {
  for (auto spec : {MetricSpec::flat(), MetricSpec::warped({0.0, 0.3})}) {
    DomainGrid g(spec, 10, 12);
    // degree 0-1
    FormField u = conductor_project(random_field(g, 0, 3));
    FormField v = random_field(g, 1, 4);
    double lhs = inner(exterior_d(u), v);
    double rhs = inner(u, codifferential(v));
    CHECK(std::abs(lhs - rhs) <= 1e-11 * norm(u) * norm(v) + 1e-14);
    // degree 1-2
    FormField u1 = conductor_project(random_field(g, 1, 5));
    FormField v2 = random_field(g, 2, 6);
    double lhs2 = inner(exterior_d(u1), v2);
    double rhs2 = inner(u1, codifferential(v2));
    CHECK(std::abs(lhs2 - rhs2) <= 1e-11 * norm(u1) * norm(v2) + 1e-14);
    CHECK(codifferential(FormField(g, 1, 3)).max_abs() == 0.0);
    CHECK_THROWS_AS(codifferential(random_field(g, 0, 7)), std::invalid_argument);
    // (d*)^2 = 0
    FormField w = random_field(g, 2, 8);
    double scale = w.max_abs();
    CHECK(codifferential(codifferential(w)).max_abs() < 1e-11 * scale);
  }
}

TEST_CASE("covariant adjointness with eta != 0") {
  DomainGrid g(MetricSpec::warped({0.0, 0.3}), 10, 12);
  FormField eta = conductor_project(random_field(g, 1, 9));
  FormField u = conductor_project(random_field(g, 0, 10));
  FormField v = random_field(g, 1, 11);
  double lhs = inner(covariant_d(eta, u), v);
  double rhs = inner(u, covariant_d_star(eta, v));
  CHECK(std::abs(lhs - rhs) <= 1e-11 * norm(u) * norm(v));
  // eta = 0 reduces exactly
  FormField z(g, 1, 3);
  FormField cd = covariant_d(z, u) - exterior_d(u);
  CHECK(cd.max_abs() == 0.0);
  // constant section: d_A c = [eta, c]
  double cc[3] = {0.3, -1.2, 0.7};
  FormField c = constant_field(g, cc);
  FormField want = bracket_form(eta, c);
  FormField got = covariant_d(eta, c);
  got -= want;
  CHECK(got.max_abs() < 1e-12);
}

TEST_CASE("wedge_dot algebra") {
  DomainGrid g(MetricSpec::flat(), 10, 12);
  FormField a = random_field(g, 1, 12), b = random_field(g, 1, 13);
  FormField s = wedge_dot(a, a);
  CHECK(s.max_abs() < 1e-13);
  FormField ab = wedge_dot(a, b), ba = wedge_dot(b, a);
  ab += ba;
  CHECK(ab.max_abs() < 1e-13);
  // alpha = e1 dx1, beta = e2 dx1 -> e3; beta on dx2 -> 0 (flat metric)
  FormField e1dx1(g, 1, 3), e2dx1(g, 1, 3), e2dx2(g, 1, 3);
  for (size_t i = 0; i < g.nodes(); ++i) {
    e1dx1.comp(0, 0)[i] = 1.0;
    e2dx1.comp(0, 1)[i] = 1.0;
    e2dx2.comp(1, 1)[i] = 1.0;
  }
  FormField w1 = wedge_dot(e1dx1, e2dx1);
  for (size_t i = 0; i < g.nodes(); ++i) CHECK(w1.comp(0, 2)[i] == doctest::Approx(1.0));
  CHECK(wedge_dot(e1dx1, e2dx2).max_abs() == 0.0);
  // pairing identity <gamma, [beta, f]> = <[gamma . beta], f>
  FormField gamma = random_field(g, 1, 14), beta = random_field(g, 1, 15),
            f = random_field(g, 0, 16);
  double lhs = inner(gamma, bracket_form(beta, f));
  double rhs = inner(wedge_dot(gamma, beta), f);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * norm(gamma) * norm(beta) * std::max(1.0, f.max_abs()));
}

TEST_CASE("hodge star tables and involution") {
  DomainGrid flat(MetricSpec::flat(), 8, 9);
  FormField mu1(flat, 2, 3);
  for (size_t i = 0; i < flat.nodes(); ++i) mu1.comp(0, 0)[i] = 1.0;
  FormField s = hodge_star_2to1(mu1);  // * (dx2^dx3) = dx1 on the flat slab
  for (size_t i = 0; i < flat.nodes(); ++i) {
    CHECK(s.comp(0, 0)[i] == doctest::Approx(1.0));
    CHECK(s.comp(1, 0)[i] == 0.0);
    CHECK(s.comp(2, 0)[i] == 0.0);
  }
  FormField a = random_field(flat, 1, 17);
  FormField back = hodge_star_2to1(hodge_star_1to2(a));
  back -= a;
  CHECK(back.max_abs() < 1e-12);
  // warped: minor-identity star vs dense nodewise inversion of the 1->2 table
  DomainGrid w(MetricSpec::warped({0.0, 0.4}), 8, 9);
  FormField v = random_field(w, 2, 18);
  FormField got = hodge_star_2to1(v);
  for (size_t i : {size_t(5), size_t(333), w.nodes() - 7}) {
    Eigen::Matrix3d st;
    st << w.gi11()[i], w.gi12()[i], 0, w.gi12()[i], w.gi22()[i], 0, 0, 0, 1.0;
    st *= w.a()[i];
    Eigen::Matrix3d inv = st.inverse();
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d vv(v.comp(0, k)[i], v.comp(1, k)[i], v.comp(2, k)[i]);
      Eigen::Vector3d want = inv * vv;
      for (int c = 0; c < 3; ++c)
        CHECK(got.comp(c, k)[i] == doctest::Approx(want(c)).epsilon(1e-10));
    }
  }
  back = hodge_star_2to1(hodge_star_1to2(random_field(w, 1, 19)));
  back -= hodge_star_2to1(hodge_star_1to2(random_field(w, 1, 19)));
  CHECK(back.max_abs() < 1e-12);
}

TEST_CASE("conductor projection per degree, idempotent") {
  DomainGrid g(MetricSpec::flat(), 8, 9);
  FormField f1 = random_field(g, 1, 20);
  FormField p = conductor_project(f1);
  CHECK(conductor_defect(p) == 0.0);
  FormField pp = conductor_project(p);
  pp -= p;
  CHECK(pp.max_abs() == 0.0);
  // normal component untouched on faces, tangential zeroed only there
  size_t id0 = g.index(3, 4, 0), idm = g.index(3, 4, 4);
  CHECK(p.comp(2, 1)[id0] == f1.comp(2, 1)[id0]);
  CHECK(p.comp(0, 1)[id0] == 0.0);
  CHECK(p.comp(0, 1)[idm] == f1.comp(0, 1)[idm]);
  FormField f0 = sampled0(g, [](double, double, double) { return 1.0; });
  FormField p0 = conductor_project(f0);
  CHECK(p0.comp(0, 0)[id0] == 0.0);
  CHECK(p0.comp(0, 0)[idm] == 1.0);
  FormField f2 = random_field(g, 2, 21);
  FormField p2 = conductor_project(f2);
  CHECK(p2.comp(2, 0)[id0] == 0.0);
  CHECK(p2.comp(0, 0)[id0] == f2.comp(0, 0)[id0]);
}

TEST_CASE("codifferential matches the analytic formula away from faces") {
  // flat slab, v = sin(pi x3) e1 dx3: d* v = -pi cos(pi x3) e1
  double dev_prev = 0;
  for (int nn : {17, 33}) {
    DomainGrid g(MetricSpec::flat(), 8, nn);
    FormField v(g, 1, 3);
    for (int i1 = 0; i1 < 8; ++i1)
      for (int i2 = 0; i2 < 8; ++i2)
        for (int i3 = 0; i3 < nn; ++i3)
          v.comp(2, 0)[g.index(i1, i2, i3)] = std::sin(M_PI * g.x3(i3));
    FormField s = codifferential(v);
    double dev = 0;
    for (int i3 = 1; i3 < nn - 1; ++i3) {
      double want = -M_PI * std::cos(M_PI * g.x3(i3));
      dev = std::max(dev, std::abs(s.comp(0, 0)[g.index(2, 3, i3)] - want));
    }
    if (nn == 17) dev_prev = dev;
    else CHECK(dev < dev_prev / 3.0);  // at least order 2 under halving
    CHECK(dev < 35.0 * g.h3() * g.h3());
  }
}

TEST_CASE("laplacian: eigenfunction, zero, and the expansion cross-check") {
  DomainGrid g(MetricSpec::flat(), 8, 33);
  FormField eta0(g, 1, 3);
  FormField f = conductor_project(sampled0(g, [](double, double, double z) {
    return std::sin(M_PI * z);
  }));
  FormField lap = laplacian(eta0, f);
  // away from the boundary closure rows the stencils are 4th order
  double dev = 0;
  for (int i3 = 6; i3 < 27; ++i3) {
    double want = M_PI * M_PI * std::sin(M_PI * g.x3(i3));
    dev = std::max(dev, std::abs(lap.comp(0, 0)[g.index(4, 4, i3)] - want));
  }
  CHECK(dev < 5.0 * M_PI * M_PI * g.h3() * g.h3());
  // the closure rows are first-order pointwise; halving the grid halves them
  auto closure_err = [](int nn) {
    DomainGrid gg(MetricSpec::flat(), 8, nn);
    FormField ff = conductor_project(sampled0(gg, [](double, double, double z) {
      return std::sin(M_PI * z);
    }));
    FormField lp = laplacian(FormField(gg, 1, 3), ff);
    double d = 0;
    for (int i3 = 1; i3 < nn - 1; ++i3) {
      double want = M_PI * M_PI * std::sin(M_PI * gg.x3(i3));
      d = std::max(d, std::abs(lp.comp(0, 0)[gg.index(4, 4, i3)] - want));
    }
    return d;
  };
  CHECK(closure_err(65) < 0.6 * closure_err(33));
  CHECK(laplacian(eta0, FormField(g, 0, 3)).max_abs() == 0.0);
  // two evaluation paths agree to round-off for random conductor eta, f
  DomainGrid gw(MetricSpec::warped({0.0, 0.3}), 10, 12);
  FormField eta = conductor_project(random_field(gw, 1, 22));
  FormField fr = conductor_project(random_field(gw, 0, 23));
  FormField a = laplacian(eta, fr);
  FormField b = laplacian_expanded(eta, fr);
  b -= a;
  CHECK(b.max_abs() < 1e-10 * std::max(1.0, a.max_abs()));
}

TEST_CASE("metric compatibility at second order on smooth fields") {
  DomainGrid g(MetricSpec::warped({0.0, 0.3}), 16, 17);
  FormField eta = conductor_project(random_smooth_conductor_1form(g, 5, 1));
  FormField S = random_smooth_conductor(g, 6, 1);
  FormField T = random_smooth_conductor(g, 7, 1);
  // X<S,T> - <d_A S(X), T> - <S, d_A T(X)> for X = each coordinate direction
  FormField ip(g, 0, 1);
  const auto& alg = AlgebraDescriptor::su2();
  for (size_t i = 0; i < g.nodes(); ++i) {
    double s = 0;
    for (int k = 0; k < 3; ++k) s += alg.gram(k) * S.comp(0, k)[i] * T.comp(0, k)[i];
    ip.comp(0, 0)[i] = s;
  }
  FormField dip = exterior_d(ip);
  FormField dS = covariant_d(eta, S), dT = covariant_d(eta, T);
  double dev = 0;
  for (int c = 0; c < 3; ++c)
    for (int i1 = 0; i1 < g.nlat(); ++i1)
      for (int i2 = 0; i2 < g.nlat(); ++i2)
        for (int i3 = 2; i3 < g.nnorm() - 2; ++i3) {
          size_t i = g.index(i1, i2, i3);
          double s = dip.comp(c, 0)[i];
          for (int k = 0; k < 3; ++k)
            s -= alg.gram(k) * (dS.comp(c, k)[i] * T.comp(0, k)[i] +
                                S.comp(0, k)[i] * dT.comp(c, k)[i]);
          dev = std::max(dev, std::abs(s));
        }
  CHECK(dev < 60.0 * g.hmax() * g.hmax());
}

TEST_CASE("Poincare property: ||f|| <= (1/pi + 0.05) ||df|| on the flat slab") {
  DomainGrid g(MetricSpec::flat(), 16, 17);
  double bound = 1.0 / M_PI + 0.05;
  for (int s = 0; s < 200; ++s) {
    FormField f = random_smooth_conductor(g, 1000 + s, 3);
    CHECK(norm(f) <= bound * norm(exterior_d(f)));
  }
}
