#include "coulomblab/field.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace clab {

namespace {
int ncomp_for(int degree) {
  switch (degree) {
    case 0:
      return 1;
    case 1:
    case 2:
      return 3;
    default:
      throw std::invalid_argument("FormField: degree must be 0, 1 or 2");
  }
}

uint64_t fnv1a(const void* data, size_t n, uint64_t seed = 1469598103934665603ull) {
  const uint8_t* p = static_cast<const uint8_t*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}
}  // namespace

FormField::FormField(const DomainGrid& grid, int degree, int lie_dim)
    : grid_(&grid), degree_(degree), ncomp_(ncomp_for(degree)), lie_dim_(lie_dim),
      n_(grid.nodes()) {
  data_.assign(static_cast<size_t>(ncomp_) * lie_dim_ * n_, 0.0);
}

void FormField::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

FormField& FormField::operator+=(const FormField& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

FormField& FormField::operator-=(const FormField& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

FormField& FormField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double FormField::max_abs() const {
  double m = 0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> FormField::scalar_slice(int c, int k) const {
  const double* p = comp(c, k);
  return std::vector<double>(p, p + n_);
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(double s, FormField a) { return a *= s; }

void save_field(const FormField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  char header[16] = {'C', 'L', 'B', 'F', 'O', 'R', 'M', '1', 0, 0, 0, 0, 0, 0, 0, 0};
  header[8] = static_cast<char>(f.degree());
  header[9] = static_cast<char>(f.lie_dim());
  uint16_t nl = static_cast<uint16_t>(f.grid()->nlat());
  uint16_t nn = static_cast<uint16_t>(f.grid()->nnorm());
  std::memcpy(header + 10, &nl, 2);
  std::memcpy(header + 12, &nn, 2);
  os.write(header, 16);
  const auto& d = f.raw();
  os.write(reinterpret_cast<const char*>(d.data()), d.size() * sizeof(double));
  uint64_t check = fnv1a(d.data(), d.size() * sizeof(double), fnv1a(header, 16));
  os.write(reinterpret_cast<const char*>(&check), 8);
}

FormField load_field(const DomainGrid& grid, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  char header[16];
  is.read(header, 16);
  if (!is || std::memcmp(header, "CLBFORM1", 8) != 0)
    throw std::runtime_error("load_field: bad magic");
  int degree = header[8];
  int lie_dim = header[9];
  uint16_t nl, nn;
  std::memcpy(&nl, header + 10, 2);
  std::memcpy(&nn, header + 12, 2);
  if (nl != grid.nlat() || nn != grid.nnorm())
    throw std::runtime_error("load_field: grid shape mismatch");
  FormField f(grid, degree, lie_dim);
  auto& d = f.raw();
  is.read(reinterpret_cast<char*>(d.data()), d.size() * sizeof(double));
  uint64_t stored = 0;
  is.read(reinterpret_cast<char*>(&stored), 8);
  if (!is) throw std::runtime_error("load_field: truncated file");
  uint64_t check = fnv1a(d.data(), d.size() * sizeof(double), fnv1a(header, 16));
  if (check != stored) throw std::runtime_error("load_field: checksum mismatch (corrupted file)");
  return f;
}

void export_norm_csv(const FormField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("export_norm_csv: cannot open " + path);
  const auto& g = *f.grid();
  os << "x3";
  for (int c = 0; c < f.ncomp(); ++c) os << ",comp" << c << "_sup";
  os << "\n";
  for (int i3 = 0; i3 < g.nnorm(); ++i3) {
    os << g.x3(i3);
    for (int c = 0; c < f.ncomp(); ++c) {
      double m = 0;
      for (int k = 0; k < f.lie_dim(); ++k) {
        const double* p = f.comp(c, k);
        for (int i1 = 0; i1 < g.nlat(); ++i1)
          for (int i2 = 0; i2 < g.nlat(); ++i2)
            m = std::max(m, std::abs(p[g.index(i1, i2, i3)]));
      }
      os << "," << m;
    }
    os << "\n";
  }
}

}  // namespace clab
