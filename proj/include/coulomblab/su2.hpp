#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace clab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Element of the compact matrix Lie algebra k (anti-Hermitian, traceless for su(2)).
struct LieElement {
  Mat mat;
  explicit LieElement(Mat m) : mat(std::move(m)) {}
  LieElement() = default;
};

/// Element of the compact matrix group K (unitary, det 1 for SU(2)).
struct GroupElement {
  Mat mat;
  explicit GroupElement(Mat m) : mat(std::move(m)) {}
  GroupElement() = default;
};

/// One commutator term of a bracket-sum decomposition.
struct BracketTerm {
  double coeff;
  int left;   // basis index
  int right;  // basis index
};

struct BasisDecomposition {
  std::vector<BracketTerm> terms;
};

/// Describes the algebra the field machinery works against: a basis of the
/// matrix algebra, its structure constants and the Gram matrix of the trace
/// inner product. Only the bracket table and semisimplicity are ever used by
/// the constructions, so other compact groups can be slotted in.
class AlgebraDescriptor {
 public:
  static const AlgebraDescriptor& su2();

  int dim() const { return dim_; }
  int matrix_size() const { return static_cast<int>(basis_[0].rows()); }
  bool semisimple() const { return semisimple_; }
  const Mat& basis(int k) const { return basis_[k]; }
  /// Gram matrix is diagonal for the bundled bases; gram(k) = <e_k, e_k>.
  double gram(int k) const { return gram_[k]; }
  /// structure(i,j,k): [e_i, e_j] = sum_k structure(i,j,k) e_k.
  double structure(int i, int j, int k) const { return struct_[(i * dim_ + j) * dim_ + k]; }

  /// Coefficients -> matrix.
  Mat assemble(const double* coeff) const;
  /// Matrix -> coefficients (orthogonal projection under trace inner product).
  void project(const Mat& m, double* coeff) const;

  AlgebraDescriptor(std::vector<Mat> basis, bool semisimple);

 private:
  int dim_;
  bool semisimple_;
  std::vector<Mat> basis_;
  std::vector<double> gram_;
  std::vector<double> struct_;
};

// ---- operations on matrix elements ----

LieElement bracket(const LieElement& x, const LieElement& y);
double trace_inner(const LieElement& x, const LieElement& y);
LieElement adjoint_action(const GroupElement& g, const LieElement& x);

GroupElement exp_lie(const LieElement& x);
/// Inverse of exp on the ball ||g - e||_op < 1; throws std::domain_error outside.
LieElement log_group(const GroupElement& g);

/// Writes x as a sum of brackets of basis elements (semisimple k only).
BasisDecomposition commutator_decompose(const AlgebraDescriptor& alg, const double* coeff);

/// Validation helpers used by type invariants.
double anti_hermitian_defect(const Mat& m);
double unitarity_defect(const Mat& m);
void check_lie(const Mat& m, double tol = 1e-12);
void check_group(const Mat& m, double tol = 1e-12);

}  // namespace clab
