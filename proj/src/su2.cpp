#include "coulomblab/su2.hpp"

#include <cmath>

namespace clab {

AlgebraDescriptor::AlgebraDescriptor(std::vector<Mat> basis, bool semisimple)
    : dim_(static_cast<int>(basis.size())), semisimple_(semisimple), basis_(std::move(basis)) {
  gram_.resize(dim_);
  for (int k = 0; k < dim_; ++k) {
    gram_[k] = std::real((basis_[k].adjoint() * basis_[k]).trace());
  }
  struct_.assign(static_cast<size_t>(dim_) * dim_ * dim_, 0.0);
  std::vector<double> c(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      Mat br = basis_[i] * basis_[j] - basis_[j] * basis_[i];
      project(br, c.data());
      for (int k = 0; k < dim_; ++k) struct_[(i * dim_ + j) * dim_ + k] = c[k];
    }
  }
}

const AlgebraDescriptor& AlgebraDescriptor::su2() {
  static const AlgebraDescriptor alg = [] {
    const cplx I(0.0, 1.0);
    Mat s1(2, 2), s2(2, 2), s3(2, 2);
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    // e_k = -(i/2) sigma_k, so [e1,e2] = e3 cyclically.
    std::vector<Mat> b{-0.5 * I * s1, -0.5 * I * s2, -0.5 * I * s3};
    return AlgebraDescriptor(std::move(b), true);
  }();
  return alg;
}

Mat AlgebraDescriptor::assemble(const double* coeff) const {
  Mat m = Mat::Zero(basis_[0].rows(), basis_[0].cols());
  for (int k = 0; k < dim_; ++k) m += coeff[k] * basis_[k];
  return m;
}

void AlgebraDescriptor::project(const Mat& m, double* coeff) const {
  for (int k = 0; k < dim_; ++k) {
    coeff[k] = std::real((basis_[k].adjoint() * m).trace()) / gram_[k];
  }
}

LieElement bracket(const LieElement& x, const LieElement& y) {
  if (x.mat.rows() != y.mat.rows()) throw std::invalid_argument("bracket: dimension mismatch");
  return LieElement(x.mat * y.mat - y.mat * x.mat);
}

double trace_inner(const LieElement& x, const LieElement& y) {
  if (x.mat.rows() != y.mat.rows()) throw std::invalid_argument("trace_inner: dimension mismatch");
  return std::real((x.mat.adjoint() * y.mat).trace());
}

LieElement adjoint_action(const GroupElement& g, const LieElement& x) {
  if (unitarity_defect(g.mat) > 1e-9) throw std::invalid_argument("adjoint_action: g not unitary");
  return LieElement(g.mat * x.mat * g.mat.adjoint());
}

GroupElement exp_lie(const LieElement& x) {
  // Scaling and squaring over the truncated series; deterministic to ~1e-16
  // for the small matrices we care about.
  double nrm = x.mat.norm();
  int s = 0;
  while (nrm > 0.25) {
    nrm *= 0.5;
    ++s;
  }
  Mat a = x.mat / std::pow(2.0, s);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return GroupElement(sum);
}

LieElement log_group(const GroupElement& g) {
  const Mat id = Mat::Identity(g.mat.rows(), g.mat.cols());
  {
    Eigen::JacobiSVD<Mat> svd(g.mat - id);
    if (svd.singularValues()(0) >= 1.0) {
      throw std::domain_error("log_group: outside the injectivity ball ||g - e|| < 1");
    }
  }
  // Inverse scaling and squaring: take square roots until close to identity,
  // then the Mercator series.
  Mat a = g.mat;
  int s = 0;
  while ((a - id).norm() > 0.25 && s < 40) {
    // principal square root via the Denman-Beavers iteration
    Mat y = a, z = id;
    for (int it = 0; it < 30; ++it) {
      Mat yn = 0.5 * (y + z.inverse());
      Mat zn = 0.5 * (z + y.inverse());
      y = yn;
      z = zn;
    }
    a = y;
    ++s;
  }
  Mat e = a - id;
  Mat term = e;
  Mat sum = Mat::Zero(a.rows(), a.cols());
  for (int k = 1; k <= 40; ++k) {
    sum += term / static_cast<double>(k) * ((k % 2) ? 1.0 : -1.0);
    term = term * e;
  }
  sum *= std::pow(2.0, s);
  // Strip the Hermitian round-off part so invariants hold exactly.
  Mat out = 0.5 * (sum - sum.adjoint());
  cplx tr = out.trace() / static_cast<double>(out.rows());
  out -= tr * Mat::Identity(out.rows(), out.cols());
  return LieElement(out);
}

BasisDecomposition commutator_decompose(const AlgebraDescriptor& alg, const double* coeff) {
  if (!alg.semisimple()) throw std::logic_error("commutator_decompose requires a semisimple algebra");
  BasisDecomposition out;
  const int n = alg.dim();
  // For each basis element find a bracket pair [e_i, e_j] = c e_k with c != 0.
  for (int k = 0; k < n; ++k) {
    if (coeff[k] == 0.0) continue;
    bool found = false;
    // prefer the positively oriented pair from the bracket table
    for (int pass = 0; pass < 2 && !found; ++pass) {
      for (int i = 0; i < n && !found; ++i) {
        for (int j = 0; j < n && !found; ++j) {
          double c = alg.structure(i, j, k);
          if (std::abs(c) < 1e-12 || (pass == 0 && c < 0)) continue;
          bool pure = true;
          for (int m = 0; m < n; ++m) {
            if (m != k && std::abs(alg.structure(i, j, m)) > 1e-12) pure = false;
          }
          if (!pure) continue;
          out.terms.push_back({coeff[k] / c, i, j});
          found = true;
        }
      }
    }
    if (!found) throw std::logic_error("commutator_decompose: no pure bracket pair in table");
  }
  return out;
}

double anti_hermitian_defect(const Mat& m) { return (m + m.adjoint()).cwiseAbs().maxCoeff(); }

double unitarity_defect(const Mat& m) {
  Mat d = m.adjoint() * m - Mat::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

void check_lie(const Mat& m, double tol) {
  if (anti_hermitian_defect(m) > tol) throw std::invalid_argument("LieElement: not anti-Hermitian");
  if (std::abs(m.trace()) > tol) throw std::invalid_argument("LieElement: not traceless");
}

void check_group(const Mat& m, double tol) {
  if (unitarity_defect(m) > tol) throw std::invalid_argument("GroupElement: not unitary");
  if (std::abs(m.determinant() - 1.0) > tol) throw std::invalid_argument("GroupElement: det != 1");
}

}  // namespace clab
