#include "coulomblab/ops.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace clab {

namespace {

void cross3(const double* a, const double* b, double* out) {
  out[0] = a[1] * b[2] - a[2] * b[1];
  out[1] = a[2] * b[0] - a[0] * b[2];
  out[2] = a[0] * b[1] - a[1] * b[0];
}

void check_same(const FormField& a, const FormField& b) {
  if (a.grid() != b.grid() || a.lie_dim() != b.lie_dim())
    throw std::invalid_argument("fields live on different grids");
}

}  // namespace

void apply_dlat(const DomainGrid& g, const double* in, double* out, int axis) {
  const int nl = g.nlat(), nn = g.nnorm();
  const double c1 = 8.0 / (12.0 * g.hlat()), c2 = 1.0 / (12.0 * g.hlat());
  const size_t stride_i3 = 1;
  (void)stride_i3;
  for (int i1 = 0; i1 < nl; ++i1) {
    for (int i2 = 0; i2 < nl; ++i2) {
      int j1p = (i1 + 1) % nl, j1m = (i1 + nl - 1) % nl, j1p2 = (i1 + 2) % nl,
          j1m2 = (i1 + nl - 2) % nl;
      int j2p = (i2 + 1) % nl, j2m = (i2 + nl - 1) % nl, j2p2 = (i2 + 2) % nl,
          j2m2 = (i2 + nl - 2) % nl;
      const double *pp, *pm, *pp2, *pm2;
      if (axis == 0) {
        pp = in + g.index(j1p, i2, 0);
        pm = in + g.index(j1m, i2, 0);
        pp2 = in + g.index(j1p2, i2, 0);
        pm2 = in + g.index(j1m2, i2, 0);
      } else {
        pp = in + g.index(i1, j2p, 0);
        pm = in + g.index(i1, j2m, 0);
        pp2 = in + g.index(i1, j2p2, 0);
        pm2 = in + g.index(i1, j2m2, 0);
      }
      double* po = out + g.index(i1, i2, 0);
      for (int i3 = 0; i3 < nn; ++i3) {
        po[i3] = c1 * (pp[i3] - pm[i3]) - c2 * (pp2[i3] - pm2[i3]);
      }
    }
  }
}

void apply_d3(const DomainGrid& g, const double* in, double* out) {
  const int nl = g.nlat(), nn = g.nnorm();
  const auto& rows = g.axis3().rows;
  for (int i1 = 0; i1 < nl; ++i1) {
    for (int i2 = 0; i2 < nl; ++i2) {
      const double* pi = in + g.index(i1, i2, 0);
      double* po = out + g.index(i1, i2, 0);
      for (int i3 = 0; i3 < nn; ++i3) {
        double s = 0;
        for (auto [c, v] : rows[i3]) s += v * pi[c];
        po[i3] = s;
      }
    }
  }
}

void apply_d3_transpose(const DomainGrid& g, const double* in, double* out) {
  const int nl = g.nlat(), nn = g.nnorm();
  const auto& rows = g.axis3().rows_t;
  for (int i1 = 0; i1 < nl; ++i1) {
    for (int i2 = 0; i2 < nl; ++i2) {
      const double* pi = in + g.index(i1, i2, 0);
      double* po = out + g.index(i1, i2, 0);
      for (int i3 = 0; i3 < nn; ++i3) {
        double s = 0;
        for (auto [c, v] : rows[i3]) s += v * pi[c];
        po[i3] = s;
      }
    }
  }
}

FormField exterior_d(const FormField& u) {
  const DomainGrid& g = *u.grid();
  if (u.degree() == 0) {
    FormField out(g, 1, u.lie_dim());
    for (int k = 0; k < u.lie_dim(); ++k) {
      apply_dlat(g, u.comp(0, k), out.comp(0, k), 0);
      apply_dlat(g, u.comp(0, k), out.comp(1, k), 1);
      apply_d3(g, u.comp(0, k), out.comp(2, k));
    }
    return out;
  }
  if (u.degree() == 1) {
    FormField out(g, 2, u.lie_dim());
    std::vector<double> t1(g.nodes()), t2(g.nodes());
    for (int k = 0; k < u.lie_dim(); ++k) {
      // mu1 = dx2^dx3: D2 a3 - D3 a2
      apply_dlat(g, u.comp(2, k), t1.data(), 1);
      apply_d3(g, u.comp(1, k), t2.data());
      for (size_t i = 0; i < g.nodes(); ++i) out.comp(0, k)[i] = t1[i] - t2[i];
      // mu2 = dx3^dx1: D3 a1 - D1 a3
      apply_d3(g, u.comp(0, k), t1.data());
      apply_dlat(g, u.comp(2, k), t2.data(), 0);
      for (size_t i = 0; i < g.nodes(); ++i) out.comp(1, k)[i] = t1[i] - t2[i];
      // mu3 = dx1^dx2: D1 a2 - D2 a1
      apply_dlat(g, u.comp(1, k), t1.data(), 0);
      apply_dlat(g, u.comp(0, k), t2.data(), 1);
      for (size_t i = 0; i < g.nodes(); ++i) out.comp(2, k)[i] = t1[i] - t2[i];
    }
    return out;
  }
  throw std::invalid_argument("exterior_d: 3-forms are out of scope (degree 2 input)");
}

FormField conductor_project(const FormField& u) {
  FormField out = u;
  const DomainGrid& g = *u.grid();
  const int nl = g.nlat(), nn = g.nnorm();
  auto zero_face = [&](double* p) {
    for (int i1 = 0; i1 < nl; ++i1)
      for (int i2 = 0; i2 < nl; ++i2) {
        p[g.index(i1, i2, 0)] = 0.0;
        p[g.index(i1, i2, nn - 1)] = 0.0;
      }
  };
  for (int k = 0; k < u.lie_dim(); ++k) {
    switch (u.degree()) {
      case 0:
        zero_face(out.comp(0, k));
        break;
      case 1:
        zero_face(out.comp(0, k));
        zero_face(out.comp(1, k));
        break;
      case 2:
        zero_face(out.comp(2, k));
        break;
    }
  }
  return out;
}

double conductor_defect(const FormField& u) {
  const DomainGrid& g = *u.grid();
  const int nl = g.nlat(), nn = g.nnorm();
  double m = 0;
  auto scan = [&](const double* p) {
    for (int i1 = 0; i1 < nl; ++i1)
      for (int i2 = 0; i2 < nl; ++i2) {
        m = std::max(m, std::abs(p[g.index(i1, i2, 0)]));
        m = std::max(m, std::abs(p[g.index(i1, i2, nn - 1)]));
      }
  };
  for (int k = 0; k < u.lie_dim(); ++k) {
    switch (u.degree()) {
      case 0:
        scan(u.comp(0, k));
        break;
      case 1:
        scan(u.comp(0, k));
        scan(u.comp(1, k));
        break;
      case 2:
        scan(u.comp(2, k));
        break;
    }
  }
  return m;
}

namespace {

// weighted component arrays (M_p f) for each degree
void weigh1(const FormField& v, std::vector<double>& m1, std::vector<double>& m2,
            std::vector<double>& m3, int k) {
  const DomainGrid& g = *v.grid();
  const auto& wa = g.wa();
  const auto& gi11 = g.gi11();
  const auto& gi12 = g.gi12();
  const auto& gi22 = g.gi22();
  const double *a1 = v.comp(0, k), *a2 = v.comp(1, k), *a3 = v.comp(2, k);
  for (size_t i = 0; i < g.nodes(); ++i) {
    m1[i] = wa[i] * (gi11[i] * a1[i] + gi12[i] * a2[i]);
    m2[i] = wa[i] * (gi12[i] * a1[i] + gi22[i] * a2[i]);
    m3[i] = wa[i] * a3[i];
  }
}

// 2-form Gram matrix = cofactor matrix of g^{uv}
void weigh2(const FormField& v, std::vector<double>& m1, std::vector<double>& m2,
            std::vector<double>& m3, int k) {
  const DomainGrid& g = *v.grid();
  const auto& wa = g.wa();
  const auto& gi11 = g.gi11();
  const auto& gi12 = g.gi12();
  const auto& gi22 = g.gi22();
  const double *a1 = v.comp(0, k), *a2 = v.comp(1, k), *a3 = v.comp(2, k);
  for (size_t i = 0; i < g.nodes(); ++i) {
    m1[i] = wa[i] * (gi22[i] * a1[i] - gi12[i] * a2[i]);
    m2[i] = wa[i] * (-gi12[i] * a1[i] + gi11[i] * a2[i]);
    m3[i] = wa[i] * (gi11[i] * gi22[i] - gi12[i] * gi12[i]) * a3[i];
  }
}

}  // namespace

FormField codifferential(const FormField& v) {
  const DomainGrid& g = *v.grid();
  const size_t n = g.nodes();
  std::vector<double> m1(n), m2(n), m3(n), t1(n), t2(n);
  if (v.degree() == 1) {
    FormField out(g, 0, v.lie_dim());
    for (int k = 0; k < v.lie_dim(); ++k) {
      weigh1(v, m1, m2, m3, k);
      double* po = out.comp(0, k);
      apply_dlat(g, m1.data(), t1.data(), 0);  // transpose of central = -D
      apply_dlat(g, m2.data(), t2.data(), 1);
      for (size_t i = 0; i < n; ++i) po[i] = -t1[i] - t2[i];
      apply_d3_transpose(g, m3.data(), t1.data());
      const auto& wa = g.wa();
      for (size_t i = 0; i < n; ++i) po[i] = (po[i] + t1[i]) / wa[i];
    }
    return conductor_project(out);
  }
  if (v.degree() == 2) {
    FormField out(g, 1, v.lie_dim());
    const auto& wa = g.wa();
    const auto& g11 = g.g11();
    const auto& g12 = g.g12();
    const auto& g22 = g.g22();
    for (int k = 0; k < v.lie_dim(); ++k) {
      weigh2(v, m1, m2, m3, k);
      // b = D^T M v per 1-form slot, then M1^{-1}
      // slot1: D3^T m2 - D2^T m3 ; slot2: D1^T m3 - D3^T m1 ; slot3: D2^T m1 - D1^T m2
      std::vector<double> b1(n), b2(n), b3(n);
      apply_d3_transpose(g, m2.data(), t1.data());
      apply_dlat(g, m3.data(), t2.data(), 1);
      for (size_t i = 0; i < n; ++i) b1[i] = t1[i] + t2[i];
      apply_dlat(g, m3.data(), t1.data(), 0);
      apply_d3_transpose(g, m1.data(), t2.data());
      for (size_t i = 0; i < n; ++i) b2[i] = -t1[i] - t2[i];
      apply_dlat(g, m1.data(), t1.data(), 1);
      apply_dlat(g, m2.data(), t2.data(), 0);
      for (size_t i = 0; i < n; ++i) b3[i] = -t1[i] + t2[i];
      // invert the 1-form weight: lateral block (g_{ij}) / wa, normal 1/wa
      for (size_t i = 0; i < n; ++i) {
        out.comp(0, k)[i] = (g11[i] * b1[i] + g12[i] * b2[i]) / wa[i];
        out.comp(1, k)[i] = (g12[i] * b1[i] + g22[i] * b2[i]) / wa[i];
        out.comp(2, k)[i] = b3[i] / wa[i];
      }
    }
    return conductor_project(out);
  }
  throw std::invalid_argument("codifferential: degree must be 1 or 2");
}

FormField wedge_dot(const FormField& alpha, const FormField& beta) {
  check_same(alpha, beta);
  if (alpha.degree() != 1 || beta.degree() != 1)
    throw std::invalid_argument("wedge_dot: 1-forms required");
  if (alpha.lie_dim() != 3) throw std::invalid_argument("wedge_dot: lie fields required");
  const DomainGrid& g = *alpha.grid();
  FormField out(g, 0, 3);
  const auto& gi11 = g.gi11();
  const auto& gi12 = g.gi12();
  const auto& gi22 = g.gi22();
  const size_t n = g.nodes();
  for (size_t i = 0; i < n; ++i) {
    double a[3][3], b[3][3];
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) {
        a[c][k] = alpha.comp(c, k)[i];
        b[c][k] = beta.comp(c, k)[i];
      }
    double acc[3] = {0, 0, 0}, cr[3];
    auto add = [&](const double* x, const double* y, double w) {
      cross3(x, y, cr);
      acc[0] += w * cr[0];
      acc[1] += w * cr[1];
      acc[2] += w * cr[2];
    };
    add(a[0], b[0], gi11[i]);
    add(a[0], b[1], gi12[i]);
    add(a[1], b[0], gi12[i]);
    add(a[1], b[1], gi22[i]);
    add(a[2], b[2], 1.0);
    for (int k = 0; k < 3; ++k) out.comp(0, k)[i] = acc[k];
  }
  return out;
}

FormField bracket_form(const FormField& alpha, const FormField& phi) {
  check_same(alpha, phi);
  const DomainGrid& g = *alpha.grid();
  FormField out(g, 1, 3);
  const size_t n = g.nodes();
  for (size_t i = 0; i < n; ++i) {
    double p[3];
    for (int k = 0; k < 3; ++k) p[k] = phi.comp(0, k)[i];
    for (int c = 0; c < 3; ++c) {
      double x[3], cr[3];
      for (int k = 0; k < 3; ++k) x[k] = alpha.comp(c, k)[i];
      cross3(x, p, cr);
      for (int k = 0; k < 3; ++k) out.comp(c, k)[i] = cr[k];
    }
  }
  return out;
}

FormField bracket0(const FormField& x, const FormField& y) {
  check_same(x, y);
  const DomainGrid& g = *x.grid();
  FormField out(g, 0, 3);
  const size_t n = g.nodes();
  for (size_t i = 0; i < n; ++i) {
    double a[3], b[3], cr[3];
    for (int k = 0; k < 3; ++k) {
      a[k] = x.comp(0, k)[i];
      b[k] = y.comp(0, k)[i];
    }
    cross3(a, b, cr);
    for (int k = 0; k < 3; ++k) out.comp(0, k)[i] = cr[k];
  }
  return out;
}

FormField hodge_star_1to2(const FormField& alpha) {
  const DomainGrid& g = *alpha.grid();
  FormField out(g, 2, alpha.lie_dim());
  const auto& a = g.a();
  const auto& gi11 = g.gi11();
  const auto& gi12 = g.gi12();
  const auto& gi22 = g.gi22();
  for (int k = 0; k < alpha.lie_dim(); ++k) {
    const double *a1 = alpha.comp(0, k), *a2 = alpha.comp(1, k), *a3 = alpha.comp(2, k);
    for (size_t i = 0; i < g.nodes(); ++i) {
      out.comp(0, k)[i] = a[i] * (gi11[i] * a1[i] + gi12[i] * a2[i]);
      out.comp(1, k)[i] = a[i] * (gi12[i] * a1[i] + gi22[i] * a2[i]);
      out.comp(2, k)[i] = a[i] * a3[i];
    }
  }
  return out;
}

FormField hodge_star_2to1(const FormField& v) {
  // Inverse of the 1->2 table through the minor identity: g_{lm} equals
  // a^2 times the (l,m) cofactor of (g^{ij}).
  const DomainGrid& g = *v.grid();
  FormField out(g, 1, v.lie_dim());
  const auto& a = g.a();
  const auto& gi11 = g.gi11();
  const auto& gi12 = g.gi12();
  const auto& gi22 = g.gi22();
  for (int k = 0; k < v.lie_dim(); ++k) {
    const double *v1 = v.comp(0, k), *v2 = v.comp(1, k), *v3 = v.comp(2, k);
    for (size_t i = 0; i < g.nodes(); ++i) {
      double cof11 = gi22[i], cof12 = -gi12[i], cof22 = gi11[i];
      double cof33 = gi11[i] * gi22[i] - gi12[i] * gi12[i];
      out.comp(0, k)[i] = a[i] * (cof11 * v1[i] + cof12 * v2[i]);
      out.comp(1, k)[i] = a[i] * (cof12 * v1[i] + cof22 * v2[i]);
      out.comp(2, k)[i] = a[i] * cof33 * v3[i];
    }
  }
  return out;
}

double inner(const FormField& u, const FormField& v) {
  check_same(u, v);
  if (u.degree() != v.degree()) throw std::invalid_argument("inner: degree mismatch");
  const DomainGrid& g = *u.grid();
  const size_t n = g.nodes();
  const AlgebraDescriptor* alg = u.lie_dim() == 3 ? &AlgebraDescriptor::su2() : nullptr;
  double total = 0;
  std::vector<double> m1(n), m2(n), m3(n);
  for (int k = 0; k < u.lie_dim(); ++k) {
    double gram = alg ? alg->gram(k) : 1.0;
    double s = 0;
    if (u.degree() == 0) {
      const double *a = u.comp(0, k), *b = v.comp(0, k);
      const auto& wa = g.wa();
      for (size_t i = 0; i < n; ++i) s += wa[i] * a[i] * b[i];
    } else {
      if (u.degree() == 1)
        weigh1(v, m1, m2, m3, k);
      else
        weigh2(v, m1, m2, m3, k);
      const double *a1 = u.comp(0, k), *a2 = u.comp(1, k), *a3 = u.comp(2, k);
      for (size_t i = 0; i < n; ++i) s += a1[i] * m1[i] + a2[i] * m2[i] + a3[i] * m3[i];
    }
    total += gram * s;
  }
  return total;
}

double norm(const FormField& u) { return std::sqrt(inner(u, u)); }

double Gram::coeff(const FormField& f, int k) {
  return f.lie_dim() == 3 ? AlgebraDescriptor::su2().gram(k) : 1.0;
}

FormField covariant_d(const FormField& eta, const FormField& u) {
  FormField out = exterior_d(u);
  if (u.degree() != 0) throw std::invalid_argument("covariant_d: 0-form required");
  out += bracket_form(eta, u);
  return out;
}

FormField covariant_d_star(const FormField& eta, const FormField& v) {
  if (v.degree() != 1) throw std::invalid_argument("covariant_d_star: 1-form required");
  FormField out = codifferential(v);
  out -= wedge_dot(eta, v);
  return out;
}

FormField laplacian(const FormField& eta, const FormField& f) {
  return conductor_project(covariant_d_star(eta, covariant_d(eta, f)));
}

FormField laplacian_expanded(const FormField& eta, const FormField& f) {
  FormField df = exterior_d(f);
  FormField br = bracket_form(eta, f);
  FormField out = codifferential(df);       // Delta_0 f
  out += codifferential(br);                // d*([eta, f])
  out -= wedge_dot(eta, df);                // -[eta . d f]
  out -= wedge_dot(eta, br);                // -[eta . [eta, f]]
  return conductor_project(out);
}

FormField constant_field(const DomainGrid& g, const double* coeff, int lie_dim) {
  FormField out(g, 0, lie_dim);
  for (int k = 0; k < lie_dim; ++k) {
    double* p = out.comp(0, k);
    for (size_t i = 0; i < g.nodes(); ++i) p[i] = coeff[k];
  }
  return out;
}

}  // namespace clab
