#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coulomblab/grid.hpp"
#include "coulomblab/su2.hpp"

namespace clab {

/// Grid-sampled k-valued p-form. Components are stored as real coefficient
/// arrays with respect to the algebra basis; lie_dim = 1 gives a plain real
/// field (used by the scalar Green operator).
class FormField {
 public:
  FormField() = default;
  FormField(const DomainGrid& grid, int degree, int lie_dim = 3);

  int degree() const { return degree_; }
  int ncomp() const { return ncomp_; }
  int lie_dim() const { return lie_dim_; }
  const DomainGrid* grid() const { return grid_; }

  /// Contiguous coefficient array for (component, lie index); length grid->nodes().
  double* comp(int c, int k) { return data_.data() + (static_cast<size_t>(c) * lie_dim_ + k) * n_; }
  const double* comp(int c, int k) const {
    return data_.data() + (static_cast<size_t>(c) * lie_dim_ + k) * n_;
  }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }
  size_t nodes() const { return n_; }

  void set_zero();
  FormField& operator+=(const FormField& o);
  FormField& operator-=(const FormField& o);
  FormField& operator*=(double s);
  double max_abs() const;

  /// Copies one lie-coefficient of one component into a scalar nodal array.
  std::vector<double> scalar_slice(int c, int k) const;

 private:
  const DomainGrid* grid_ = nullptr;
  int degree_ = 0, ncomp_ = 1, lie_dim_ = 3;
  size_t n_ = 0;
  std::vector<double> data_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(double s, FormField a);

/// Flat binary snapshot: 16-byte header (magic, degree, lie_dim, dims),
/// row-major doubles, FNV-1a checksum trailer.
void save_field(const FormField& f, const std::string& path);
/// Loads onto an existing grid; throws std::runtime_error on shape or checksum mismatch.
FormField load_field(const DomainGrid& grid, const std::string& path);

/// CSV export: component norms per x3 level.
void export_norm_csv(const FormField& f, const std::string& path);

}  // namespace clab
