#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "coulomblab/field.hpp"
#include "coulomblab/grid.hpp"
#include "coulomblab/su2.hpp"

using namespace clab;

namespace {
LieElement basis(int k) { return LieElement(AlgebraDescriptor::su2().basis(k)); }

LieElement random_lie(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n;
  double c[3] = {scale * n(rng), scale * n(rng), scale * n(rng)};
  return LieElement(AlgebraDescriptor::su2().assemble(c));
}
}  // namespace

TEST_CASE("su2 bracket table and trace inner product") {
  auto e1 = basis(0), e2 = basis(1), e3 = basis(2);
  CHECK((bracket(e1, e2).mat - e3.mat).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(bracket(e1, e1).mat.cwiseAbs().maxCoeff() == 0.0);
  CHECK((bracket(e2, e1).mat + e3.mat).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(trace_inner(e1, e1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(trace_inner(e1, e2)) < 1e-15);
  LieElement zero(Mat::Zero(2, 2));
  CHECK(trace_inner(zero, e2) == 0.0);
  CHECK_THROWS_AS(bracket(e1, LieElement(Mat::Zero(3, 3))), std::invalid_argument);
}

TEST_CASE("jacobi identity and ad skew-adjointness") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 50; ++it) {
    auto x = random_lie(rng), y = random_lie(rng), z = random_lie(rng);
    Mat j = bracket(x, bracket(y, z)).mat + bracket(y, bracket(z, x)).mat +
            bracket(z, bracket(x, y)).mat;
    CHECK(j.cwiseAbs().maxCoeff() < 1e-12);
    double lhs = trace_inner(bracket(x, y), z);
    double rhs = -trace_inner(y, bracket(x, z));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("adjoint action is a trace-inner isometry and matches exp(ad)") {
  std::mt19937_64 rng(8);
  auto e3 = basis(2);
  GroupElement id(Mat::Identity(2, 2));
  auto x = random_lie(rng);
  CHECK((adjoint_action(id, x).mat - x.mat).cwiseAbs().maxCoeff() < 1e-15);
  // exp(theta e3) commutes with e3
  LieElement te3(0.7 * e3.mat);
  auto g = exp_lie(te3);
  CHECK((adjoint_action(g, e3).mat - e3.mat).cwiseAbs().maxCoeff() < 1e-13);
  for (int it = 0; it < 20; ++it) {
    auto gx = exp_lie(random_lie(rng));
    auto a = random_lie(rng), b = random_lie(rng);
    CHECK(trace_inner(adjoint_action(gx, a), adjoint_action(gx, b)) ==
          doctest::Approx(trace_inner(a, b)).epsilon(1e-12));
  }
  // Ad(exp(x)) = exp(ad x) on basis elements
  auto x2 = random_lie(rng, 0.8);
  const auto& alg = AlgebraDescriptor::su2();
  double xc[3];
  alg.project(x2.mat, xc);
  Eigen::Matrix3d adx;
  for (int j = 0; j < 3; ++j) {
    double col[3], bj[3] = {0, 0, 0};
    bj[j] = 1.0;
    Mat br = bracket(x2, LieElement(alg.assemble(bj))).mat;
    alg.project(br, col);
    for (int i = 0; i < 3; ++i) adx(i, j) = col[i];
  }
  Eigen::Matrix3d expad = adx.exp();
  auto gg = exp_lie(x2);
  for (int j = 0; j < 3; ++j) {
    double got[3];
    alg.project(adjoint_action(gg, basis(j)).mat, got);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(expad(i, j)).epsilon(1e-10));
  }
}

TEST_CASE("exp and log invert each other near the identity") {
  CHECK((exp_lie(LieElement(Mat::Zero(2, 2))).mat - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-15);
  auto e1 = basis(0);
  LieElement x(0.3 * e1.mat);
  auto lg = log_group(exp_lie(x));
  CHECK((lg.mat - x.mat).cwiseAbs().maxCoeff() < 1e-10);
  std::mt19937_64 rng(4);
  for (int it = 0; it < 20; ++it) {
    auto y = random_lie(rng, 0.2);
    auto g = exp_lie(y);
    CHECK(unitarity_defect(g.mat) < 1e-12);
    CHECK(std::abs(g.mat.determinant() - 1.0) < 1e-12);
    CHECK((log_group(g).mat - y.mat).cwiseAbs().maxCoeff() < 1e-11);
  }
  // outside the injectivity ball
  LieElement big(3.0 * e1.mat);
  CHECK_THROWS_AS(log_group(exp_lie(big)), std::domain_error);
}

TEST_CASE("commutator_decompose reconstructs against the bracket table") {
  const auto& alg = AlgebraDescriptor::su2();
  double e3c[3] = {0, 0, 1};
  auto d = commutator_decompose(alg, e3c);
  REQUIRE(d.terms.size() == 1);
  CHECK(d.terms[0].coeff == doctest::Approx(1.0));
  CHECK(d.terms[0].left == 0);
  CHECK(d.terms[0].right == 1);
  double zero[3] = {0, 0, 0};
  CHECK(commutator_decompose(alg, zero).terms.empty());
  double mix[3] = {2, 1, 0};
  auto dm = commutator_decompose(alg, mix);
  REQUIRE(dm.terms.size() == 2);
  CHECK(dm.terms[0].coeff == doctest::Approx(2.0));
  CHECK(dm.terms[0].left == 1);
  CHECK(dm.terms[0].right == 2);
  CHECK(dm.terms[1].coeff == doctest::Approx(1.0));
  CHECK(dm.terms[1].left == 2);
  CHECK(dm.terms[1].right == 0);
  // reconstruction
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  double c[3] = {n(rng), n(rng), n(rng)};
  auto dd = commutator_decompose(alg, c);
  Mat acc = Mat::Zero(2, 2);
  for (auto& t : dd.terms)
    acc += t.coeff * bracket(basis(t.left), basis(t.right)).mat;
  CHECK((acc - Mat(alg.assemble(c))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid construction and invariants") {
  CHECK_THROWS_AS(DomainGrid(MetricSpec::flat(), 4, 3), GeometryError);
  DomainGrid flat(MetricSpec::flat(), 16, 17);
  for (size_t i = 0; i < flat.nodes(); ++i) {
    CHECK(flat.a()[i] == 1.0);
    CHECK(flat.gi11()[i] == 1.0);
    CHECK(flat.gi12()[i] == 0.0);
  }
  DomainGrid warped(MetricSpec::warped({0.0, 1.0}), 16, 17);
  for (int i3 = 0; i3 < 17; ++i3) {
    size_t id = warped.index(3, 5, i3);
    CHECK(warped.a()[id] == doctest::Approx(std::exp(2.0 * warped.x3(i3))).epsilon(1e-13));
    // g^{uv} g = I
    double p = warped.gi11()[id] * warped.g11()[id] + warped.gi12()[id] * warped.g12()[id];
    CHECK(p == doctest::Approx(1.0).epsilon(1e-13));
  }
  // quadrature of the analytic volume for the warped family: int e^{2x3} = (e^2-1)/2
  double vol = warped.volume();
  CHECK(vol == doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-5));
}

TEST_CASE("mean curvature tau on both faces") {
  DomainGrid flat(MetricSpec::flat(), 8, 9);
  CHECK(flat.mean_curvature_tau(Face::F0).max_abs() == 0.0);
  CHECK(flat.mean_curvature_tau(Face::F1).max_abs() == 0.0);
  DomainGrid warped(MetricSpec::warped({0.0, 1.0}), 8, 17);
  auto t0 = warped.mean_curvature_tau(Face::F0);
  auto t1 = warped.mean_curvature_tau(Face::F1);
  CHECK(t0.values[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t1.values[0] == doctest::Approx(-2.0).epsilon(1e-12));
  // The reduction behind the two routes (h33 = 1): a^2 equals the lateral
  // determinant pointwise, so da(nu)/a and d(det)/2det describe the same tau.
  for (size_t i = 0; i < warped.nodes(); ++i) {
    double det = warped.g11()[i] * warped.g22()[i] - warped.g12()[i] * warped.g12()[i];
    CHECK(std::abs(warped.a()[i] * warped.a()[i] - det) < 1e-10 * det);
  }
  // the stencil (minor) route converges to the analytic tau at order >= 2
  auto m0 = warped.mean_curvature_tau_minor_route(Face::F0);
  double dev = 0;
  for (size_t i = 0; i < m0.values.size(); ++i)
    dev = std::max(dev, std::abs(m0.values[i] - t0.values[i]));
  DomainGrid w2(MetricSpec::warped({0.0, 1.0}), 8, 33);
  auto m1 = w2.mean_curvature_tau_minor_route(Face::F0);
  double dev2 = 0;
  for (size_t i = 0; i < m1.values.size(); ++i) dev2 = std::max(dev2, std::abs(m1.values[i] - 2.0));
  CHECK(dev < 0.5);
  CHECK(dev2 < dev / 3.5);
}

TEST_CASE("boundary restriction and normal derivative stencils") {
  DomainGrid g(MetricSpec::flat(), 8, 17);
  std::vector<double> f(g.nodes());
  for (int i1 = 0; i1 < 8; ++i1)
    for (int i2 = 0; i2 < 8; ++i2)
      for (int i3 = 0; i3 < 17; ++i3) f[g.index(i1, i2, i3)] = g.x3(i3);
  auto r0 = g.boundary_restrict(f, Face::F0);
  auto d0 = g.normal_derivative(f, Face::F0);
  CHECK(r0.max_abs() == 0.0);
  for (double v : d0.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (auto& v : f) v = 3.0;
  CHECK(g.normal_derivative(f, Face::F1).max_abs() < 1e-12);
  for (int i1 = 0; i1 < 8; ++i1)
    for (int i2 = 0; i2 < 8; ++i2)
      for (int i3 = 0; i3 < 17; ++i3) f[g.index(i1, i2, i3)] = std::sin(M_PI * g.x3(i3));
  // 3-point one-sided stencil: truncation h^2 f'''/3 = (pi^3/3) h^2
  auto d1 = g.normal_derivative(f, Face::F1);
  double tol = 1.2 * M_PI * M_PI * M_PI / 3.0 * g.h3() * g.h3();
  for (double v : d1.values) CHECK(std::abs(v - M_PI) < tol);
}

TEST_CASE("field serialization round-trip and corruption detection") {
  DomainGrid g(MetricSpec::flat(), 8, 9);
  FormField f(g, 1, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (auto& v : f.raw()) v = n(rng);
  std::string path = "roundtrip_field.clb";
  save_field(f, path);
  FormField f2 = load_field(g, path);
  CHECK(f2.degree() == 1);
  double dev = 0;
  for (size_t i = 0; i < f.raw().size(); ++i) dev = std::max(dev, std::abs(f.raw()[i] - f2.raw()[i]));
  CHECK(dev == 0.0);
  // corrupt a byte
  {
    std::fstream fs(path, std::ios::in | std::ios::out | std::ios::binary);
    fs.seekp(64);
    char c = 0x5a;
    fs.write(&c, 1);
  }
  CHECK_THROWS_WITH_AS(load_field(g, path), doctest::Contains("checksum"), std::runtime_error);
  DomainGrid g2(MetricSpec::flat(), 8, 11);
  save_field(f, path);
  CHECK_THROWS_AS(load_field(g2, path), std::runtime_error);
}
