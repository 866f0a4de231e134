#include "coulomblab/span.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace clab {

namespace {

double expbump_raw(double t, double lo, double hi) {
  double z = (2.0 / (hi - lo)) * (t - 0.5 * (lo + hi));
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(1.0 / (1.0 - z * z) - 1.0);
}

double smoothstep01(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double simpson_integral(const std::vector<double>& f, double h) {
  int n = static_cast<int>(f.size());
  double s = 0;
  int k = 2;
  for (; k < n; k += 2) s += h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  if ((n - 1) % 2 == 1) s += h / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
  return s;
}

void cum_simpson_line(const double* f, double* out, int n, int stride, double h) {
  out[0] = 0.0;
  if (n > 1) out[stride] = h / 12.0 * (5.0 * f[0] + 8.0 * f[stride] - f[2 * stride]);
  for (int k = 2; k < n; ++k) {
    if (k % 2 == 0)
      out[k * stride] = out[(k - 2) * stride] + h / 3.0 * (f[(k - 2) * stride] +
                                                           4.0 * f[(k - 1) * stride] + f[k * stride]);
    else
      out[k * stride] =
          out[(k - 1) * stride] +
          h / 12.0 * (-f[(k - 2) * stride] + 8.0 * f[(k - 1) * stride] + 5.0 * f[k * stride]);
  }
}

}  // namespace

double BumpProfile::eval(double t) const { return normalization * expbump_raw(t, lo, hi); }

std::vector<double> BumpProfile::sampled(int n, double h, double lo, double hi) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = expbump_raw(i * h, lo, hi);
  double integral = simpson_integral(out, h);
  if (!(integral > 0)) throw SupportError("BumpProfile: window not resolved by the grid");
  for (auto& v : out) v /= integral;
  return out;
}

double plateau(double t, double u, double p, double q, double v) {
  return smoothstep01((t - u) / (p - u)) * smoothstep01((v - t) / (v - q));
}

std::vector<double> cumulative_simpson_axis1(const DomainGrid& g, const std::vector<double>& f) {
  std::vector<double> out(f.size());
  const int nl = g.nlat(), nn = g.nnorm();
  for (int i1 = 0; i1 < nl; ++i1)
    for (int i3 = 0; i3 < nn; ++i3) {
      size_t base = g.index(i1, 0, i3);
      cum_simpson_line(f.data() + base, out.data() + base, nl, nn, g.hlat());
    }
  return out;
}

FormField SpanCertificate::reconstruct() const {
  FormField sum(*target.grid(), 0, 3);
  for (const auto& t : terms) {
    if (t.coeff == 0.0) continue;
    FormField wd = wedge_dot(t.alpha, t.beta);
    wd *= t.coeff;
    sum += wd;
  }
  return sum;
}

double SpanCertificate::reverify() const {
  FormField r = reconstruct();
  r -= target;
  return r.max_abs();
}

SpanWindows layout_windows(double cube_lo, double cube_hi, double s0, double s1, double h) {
  SpanWindows w;
  w.a = cube_lo;
  w.b = cube_hi;
  double pad = std::max(2.0 * h, 0.02);
  w.c = s0 - pad;
  w.d = s1 + pad;
  double tail = cube_hi - w.d;
  if (tail < 2.0 * h) throw SupportError("layout_windows: no room above the support window");
  w.l = w.d + 0.5 * tail;
  // allocate the room below c: margin | eta window | gap | ramp
  double room = w.c - cube_lo;
  if (room < 9.0 * h)
    throw SupportError("layout_windows: support too close to the cube edge for the cutoffs");
  double gap = std::max(3.0 * h, std::min(0.05, 0.25 * room));
  double ramp = std::max(2.0 * h, std::min(0.05, 0.20 * room));
  w.iv = w.c - ramp;
  w.ie = w.iv - gap;
  double eta_room = w.ie - cube_lo;
  w.k = cube_lo + std::max(0.25 * eta_room, eta_room - 0.25);
  w.j = cube_lo + 0.5 * (w.k - cube_lo);
  bool ok = w.a < w.j && w.j < w.k && w.k + 3.0 * h < w.ie && w.ie < w.iv && w.iv < w.c &&
            w.c < w.d && w.d < w.l && w.l < w.b;
  if (!ok) throw SupportError("layout_windows: grid too coarse for the construction windows");
  return w;
}

namespace {

// Index map from construction coordinates (y1, y2, y3) to grid nodes. The F1
// variant swaps the lateral axes and mirrors x3, which preserves orientation.
struct ChartView {
  int s1 = 0, s2 = 0;
  bool mirrored = false;
  const DomainGrid* g = nullptr;
  size_t operator()(int j1, int j2, int j3) const {
    int i1 = j1, i2 = j2, i3 = j3;
    if (mirrored) {
      std::swap(i1, i2);
      i3 = g->nnorm() - 1 - j3;
    }
    i1 = (i1 + s1) % g->nlat();
    i2 = (i2 + s2) % g->nlat();
    return g->index(i1, i2, i3);
  }
};

std::array<double, 2> support_box(const ChartView& view, const double* p, int axis) {
  const DomainGrid& g = *view.g;
  double lo = 2.0, hi = -1.0;
  for (int j1 = 0; j1 < g.nlat(); ++j1)
    for (int j2 = 0; j2 < g.nlat(); ++j2)
      for (int j3 = 0; j3 < g.nnorm(); ++j3)
        if (p[view(j1, j2, j3)] != 0.0) {
          double t = axis == 0 ? j1 * g.hlat() : axis == 1 ? j2 * g.hlat() : j3 * g.h3();
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
  return {lo, hi};
}

// Core of the interior (noboundary1) and boundary (lbo) realizations on a
// normal-adapted metric with diagonal lateral block:
//   h = -I(y1, y3) eta(y2) + a^2 psi,  I = full y2-integral of a^2 psi
//   F = cumulative Simpson of h in y2,  G = v1(y1) v2(y2) v3(y3)
//   omega1 = -F (a g^{11}) mu_1 e_a,  omega2 = G (a g^{22}) mu_2 e_b
//   alpha = d* omega1, beta = d* omega2   =>  [alpha . beta] = psi [e_a, e_b]
SpanTerm realize_term(const FormField& psi, int ba, int bb, const SpanWindows& wx,
                      const SpanWindows& wy, const SpanWindows& wz, const ChartView& view,
                      bool boundary_variant) {
  const DomainGrid& g = *psi.grid();
  const int nl = g.nlat(), nn = g.nnorm();
  const double* ps = psi.comp(0, 0);

  std::vector<double> eta(nl);
  {
    std::vector<double> raw(nl);
    for (int j2 = 0; j2 < nl; ++j2) raw[j2] = expbump_raw(j2 * g.hlat(), wy.k, wy.ie);
    double integral = simpson_integral(raw, g.hlat());
    if (!(integral > 0)) throw SupportError("realize_term: eta window unresolved");
    for (int j2 = 0; j2 < nl; ++j2) eta[j2] = raw[j2] / integral;
  }

  std::vector<double> F(static_cast<size_t>(nl) * nl * nn);
  {
    std::vector<double> line(nl), cum(nl);
    for (int j1 = 0; j1 < nl; ++j1)
      for (int j3 = 0; j3 < nn; ++j3) {
        for (int j2 = 0; j2 < nl; ++j2) {
          size_t gi = view(j1, j2, j3);
          double av = g.a()[gi];
          line[j2] = av * av * ps[gi];
        }
        double I = simpson_integral(line, g.hlat());
        for (int j2 = 0; j2 < nl; ++j2) line[j2] -= I * eta[j2];
        cum_simpson_line(line.data(), cum.data(), nl, 1, g.hlat());
        for (int j2 = 0; j2 < nl; ++j2)
          F[(static_cast<size_t>(j1) * nl + j2) * nn + j3] = cum[j2];
      }
  }

  std::vector<double> v1(nl), v2(nl), v3(nn);
  for (int j = 0; j < nl; ++j) {
    double t = j * g.hlat();
    v1[j] = t * plateau(t, wx.iv, wx.c, wx.d, wx.l);
    v2[j] = plateau(t, wy.iv, wy.c, wy.d, wy.l);
  }
  for (int j3 = 0; j3 < nn; ++j3) {
    double t = j3 * g.h3();
    v3[j3] = boundary_variant ? plateau(t, -0.5, -0.25, wz.d, wz.l)
                              : plateau(t, wz.iv, wz.c, wz.d, wz.l);
  }

  FormField om1(g, 2, 3), om2(g, 2, 3);
  for (int j1 = 0; j1 < nl; ++j1)
    for (int j2 = 0; j2 < nl; ++j2)
      for (int j3 = 0; j3 < nn; ++j3) {
        size_t gi = view(j1, j2, j3);
        size_t ci = (static_cast<size_t>(j1) * nl + j2) * nn + j3;
        double av = g.a()[gi];
        // construction-frame g^{11}, g^{22} (swapped lateral axes at F1)
        double c11 = view.mirrored ? g.gi22()[gi] : g.gi11()[gi];
        double c22 = view.mirrored ? g.gi11()[gi] : g.gi22()[gi];
        double o1 = -F[ci] * av * c11;
        double o2 = v1[j1] * v2[j2] * v3[j3] * av * c22;
        // mu-component mapping grid <- construction: identity, or swap at F1
        if (!view.mirrored) {
          om1.comp(0, ba)[gi] = o1;
          om2.comp(1, bb)[gi] = o2;
        } else {
          om1.comp(1, ba)[gi] = o1;
          om2.comp(0, bb)[gi] = o2;
        }
      }
  SpanTerm term;
  term.alpha = codifferential(om1);
  term.beta = codifferential(om2);
  term.coeff = 1.0;
  return term;
}

SpanTerm zero_term(const DomainGrid& g) {
  SpanTerm t;
  t.alpha = FormField(g, 1, 3);
  t.beta = FormField(g, 1, 3);
  t.coeff = 0.0;
  return t;
}

void check_diagonal_metric(const DomainGrid& g) {
  for (double v : g.gi12())
    if (v != 0.0)
      throw SupportError("span constructions require a diagonal lateral metric block");
}

}  // namespace

SpanTerm interior_realize(const DomainGrid& g, const FormField& psi, int basis_a, int basis_b,
                          const std::array<double, 2>& cube_x, const std::array<double, 2>& cube_y,
                          const std::array<double, 2>& cube_z, int shift1, int shift2) {
  check_diagonal_metric(g);
  const double* p = psi.comp(0, 0);
  for (int i1 = 0; i1 < g.nlat(); ++i1)
    for (int i2 = 0; i2 < g.nlat(); ++i2)
      for (int i3 : {0, 1, g.nnorm() - 2, g.nnorm() - 1})
        if (p[g.index(i1, i2, i3)] != 0.0)
          throw SupportError("interior_realize: psi support touches the boundary layer");
  ChartView view{shift1, shift2, false, &g};
  auto sx = support_box(view, p, 0), sy = support_box(view, p, 1), sz = support_box(view, p, 2);
  if (sx[0] > sx[1]) return zero_term(g);
  SpanWindows wx = layout_windows(cube_x[0], cube_x[1], sx[0], sx[1], g.hlat());
  SpanWindows wy = layout_windows(cube_y[0], cube_y[1], sy[0], sy[1], g.hlat());
  SpanWindows wz = layout_windows(cube_z[0], cube_z[1], sz[0], sz[1], g.h3());
  return realize_term(psi, basis_a, basis_b, wx, wy, wz, view, false);
}

SpanTerm boundary_realize(const DomainGrid& g, const FormField& psi, int basis_a, int basis_b,
                          Face face, double compat_tol) {
  check_diagonal_metric(g);
  auto dp = g.face_derivative(psi.scalar_slice(0, 0), face, 1, 5);
  auto pf = g.boundary_restrict(psi.scalar_slice(0, 0), face);
  auto tau = g.mean_curvature_tau(face);
  double scale = std::max(1.0, psi.max_abs());
  for (size_t i = 0; i < dp.values.size(); ++i)
    if (std::abs(dp.values[i] + 2.0 * tau.values[i] * pf.values[i]) > compat_tol * scale)
      throw CompatibilityError("boundary_realize: d psi(nu) != -2 tau psi on the face");
  ChartView view{0, 0, face == Face::F1, &g};
  const double* p = psi.comp(0, 0);
  auto sx = support_box(view, p, 0), sy = support_box(view, p, 1), sz = support_box(view, p, 2);
  if (sx[0] > sx[1]) return zero_term(g);
  SpanWindows wx = layout_windows(0.004, 0.996, sx[0], sx[1], g.hlat());
  SpanWindows wy = layout_windows(0.004, 0.996, sy[0], sy[1], g.hlat());
  SpanWindows wz{};
  wz.a = 0.0;
  wz.b = 1.0 - 2.0 * g.h3();
  wz.d = sz[1] + std::max(2.0 * g.h3(), 0.02);
  double tail = wz.b - wz.d;
  if (tail < 2.0 * g.h3()) throw SupportError("boundary_realize: psi support reaches too deep");
  wz.l = wz.d + 0.5 * tail;
  return realize_term(psi, basis_a, basis_b, wx, wy, wz, view, true);
}

namespace {

// Overlapping periodic chart cover of a lateral axis: per chart a cutoff
// lambda (partition after normalization) and an index shift rolling the chart
// window into construction coordinates [0.36, 0.96].
struct LateralCover {
  std::vector<std::vector<double>> lambda;  // per chart, per lateral index
  std::vector<int> shift;
};

LateralCover lateral_cover(const DomainGrid& g) {
  const int nl = g.nlat();
  int ncharts = nl >= 48 ? 2 : 3;
  double width = ncharts == 2 ? 0.56 : 0.40;
  double plateau_w = width - (ncharts == 2 ? 0.24 : 0.16);
  LateralCover cov;
  cov.lambda.assign(ncharts, std::vector<double>(nl, 0.0));
  cov.shift.resize(ncharts);
  std::vector<double> sum(nl, 0.0);
  for (int c = 0; c < ncharts; ++c) {
    double center = (c + 0.5) / ncharts;
    // chart-frame support should land in [0.36, 0.96]: chart t' = t - shift*h
    double target_lo = 0.66 - 0.5 * width;  // chart-frame center 0.66
    double shift_frac = center - 0.5 * width - target_lo;
    cov.shift[c] = static_cast<int>(std::lround(shift_frac * nl)) % nl;
    if (cov.shift[c] < 0) cov.shift[c] += nl;
    for (int i = 0; i < nl; ++i) {
      double t = i * g.hlat();
      double d = t - center;
      d -= std::round(d);  // periodic distance
      cov.lambda[c][i] = plateau(d, -0.5 * width, -0.5 * plateau_w, 0.5 * plateau_w, 0.5 * width);
      sum[i] += cov.lambda[c][i];
    }
  }
  for (int i = 0; i < nl; ++i) {
    if (!(sum[i] > 1e-8)) throw SupportError("lateral_cover: cover does not overlap");
  }
  for (int c = 0; c < ncharts; ++c)
    for (int i = 0; i < nl; ++i) cov.lambda[c][i] /= sum[i];
  return cov;
}

// shared chart loop for interior_span / boundary_span
SpanCertificate span_over_charts(const FormField& Psi, bool boundary_variant, Face face,
                                 double compat_tol, int lo3, int hi3) {
  const DomainGrid& g = *Psi.grid();
  SpanCertificate cert;
  cert.target = Psi;
  const AlgebraDescriptor& alg = AlgebraDescriptor::su2();
  if (!alg.semisimple()) throw std::logic_error("span constructions need a semisimple algebra");
  auto cov = lateral_cover(g);
  int ncharts = static_cast<int>(cov.shift.size());
  bool mirrored = boundary_variant && face == Face::F1;

  for (int c1 = 0; c1 < ncharts; ++c1) {
    for (int c2 = 0; c2 < ncharts; ++c2) {
      for (int k = 0; k < 3; ++k) {
        FormField psi(g, 0, 1);
        double mx = 0;
        for (int i1 = 0; i1 < g.nlat(); ++i1)
          for (int i2 = 0; i2 < g.nlat(); ++i2) {
            // lambda factors act along construction axes y1, y2
            int e1 = mirrored ? i2 : i1;
            int e2 = mirrored ? i1 : i2;
            double l = cov.lambda[c1][e1] * cov.lambda[c2][e2];
            if (l == 0.0) continue;
            for (int i3 = 0; i3 < g.nnorm(); ++i3) {
              size_t id = g.index(i1, i2, i3);
              psi.comp(0, 0)[id] = l * Psi.comp(0, k)[id];
              mx = std::max(mx, std::abs(psi.comp(0, 0)[id]));
            }
          }
        if (mx == 0.0) continue;
        double unit[3] = {0, 0, 0};
        unit[k] = 1.0;
        auto dec = commutator_decompose(alg, unit);
        for (const auto& tm : dec.terms) {
          ChartView view{cov.shift[c1], cov.shift[c2], mirrored, &g};
          const double* p = psi.comp(0, 0);
          auto sx = support_box(view, p, 0);
          auto sy = support_box(view, p, 1);
          auto sz = support_box(view, p, 2);
          SpanWindows wx = layout_windows(0.004, 0.996, sx[0], sx[1], g.hlat());
          SpanWindows wy = layout_windows(0.004, 0.996, sy[0], sy[1], g.hlat());
          SpanWindows wz{};
          if (boundary_variant) {
            wz.a = 0.0;
            wz.b = 1.0 - 2.0 * g.h3();
            wz.d = sz[1] + std::max(2.0 * g.h3(), 0.02);
            double tail = wz.b - wz.d;
            if (tail < 2.0 * g.h3()) throw SupportError("boundary_span: support too deep");
            wz.l = wz.d + 0.5 * tail;
          } else {
            double z0 = std::max(0.004, g.x3(lo3) - 2.5 * g.h3());
            double z1 = std::min(0.996, g.x3(hi3) + 2.5 * g.h3());
            wz = layout_windows(std::max(0.004, z0 - 0.20), std::min(0.996, z1 + 0.10), sz[0],
                                sz[1], g.h3());
          }
          SpanTerm t = realize_term(psi, tm.left, tm.right, wx, wy, wz, view, boundary_variant);
          t.coeff = tm.coeff;
          cert.terms.push_back(std::move(t));
        }
      }
    }
  }
  FormField rec = cert.reconstruct();
  rec -= Psi;
  cert.reconstruction_error = rec.max_abs();
  for (const auto& t : cert.terms) {
    if (t.coeff == 0.0) continue;
    cert.max_dstar_residual = std::max(cert.max_dstar_residual, codifferential(t.alpha).max_abs());
    cert.max_dstar_residual = std::max(cert.max_dstar_residual, codifferential(t.beta).max_abs());
    cert.max_cbc_defect = std::max(cert.max_cbc_defect, conductor_defect(t.alpha));
    cert.max_cbc_defect = std::max(cert.max_cbc_defect, conductor_defect(t.beta));
  }
  return cert;
}

}  // namespace

SpanCertificate interior_span(const FormField& Psi) {
  const DomainGrid& g = *Psi.grid();
  check_diagonal_metric(g);
  int lo3 = g.nnorm(), hi3 = -1;
  for (int k = 0; k < 3; ++k) {
    const double* p = Psi.comp(0, k);
    for (int i3 = 0; i3 < g.nnorm(); ++i3) {
      bool nz = false;
      for (int i1 = 0; i1 < g.nlat() && !nz; ++i1)
        for (int i2 = 0; i2 < g.nlat() && !nz; ++i2)
          if (p[g.index(i1, i2, i3)] != 0.0) nz = true;
      if (nz) {
        lo3 = std::min(lo3, i3);
        hi3 = std::max(hi3, i3);
      }
    }
  }
  if (hi3 < 0) {
    SpanCertificate cert;
    cert.target = Psi;
    return cert;
  }
  if (lo3 < 2 || hi3 > g.nnorm() - 3)
    throw SupportError("interior_span: support within 2 cells of a face");
  return span_over_charts(Psi, false, Face::F0, 0.0, lo3, hi3);
}

SpanCertificate boundary_span(const FormField& PsiFace, Face face, double compat_tol) {
  const DomainGrid& g = *PsiFace.grid();
  check_diagonal_metric(g);
  // compatibility of the full target on the face
  auto tau = g.mean_curvature_tau(face);
  double scale = std::max(1.0, PsiFace.max_abs());
  for (int k = 0; k < 3; ++k) {
    auto dp = g.face_derivative(PsiFace.scalar_slice(0, k), face, 1, 5);
    auto pf = g.boundary_restrict(PsiFace.scalar_slice(0, k), face);
    for (size_t i = 0; i < dp.values.size(); ++i)
      if (std::abs(dp.values[i] + 2.0 * tau.values[i] * pf.values[i]) > compat_tol * scale)
        throw CompatibilityError("boundary_span: d Psi(nu) != -2 tau Psi on the face");
  }
  return span_over_charts(PsiFace, true, face, compat_tol, 0, 0);
}

BoundaryDataRealization realize_boundary_data(const DomainGrid& grid,
                                              const std::array<LieBoundary, 2>& F) {
  BoundaryDataRealization out;
  out.target = F;
  const AlgebraDescriptor& alg = AlgebraDescriptor::su2();
  ConnectionState flat(grid);

  FormField phi(grid, 0, 1);
  for (int i3 = 0; i3 < grid.nnorm(); ++i3) {
    double t = grid.x3(i3);
    double u = (t - 0.3) / 0.4;
    double v = (u > 0 && u < 1) ? std::pow(0.5 - 0.5 * std::cos(2 * M_PI * u), 2) : 0.0;
    if (v == 0.0) continue;
    for (int i1 = 0; i1 < grid.nlat(); ++i1)
      for (int i2 = 0; i2 < grid.nlat(); ++i2) phi.comp(0, 0)[grid.index(i1, i2, i3)] = v;
  }
  FormField gphi = scalar_green(grid, phi);
  std::array<BoundaryField, 2> dgphi = {hopf_normal_derivative(grid, gphi, Face::F0),
                                        hopf_normal_derivative(grid, gphi, Face::F1)};
  out.hopf_margin = 1e300;
  for (const auto& b : dgphi)
    for (double v : b.values) out.hopf_margin = std::min(out.hopf_margin, v);

  out.f_sum = FormField(grid, 0, 3);
  for (int k = 0; k < 3; ++k) {
    double supk = std::max(F[0].comp.empty() ? 0.0 : F[0].comp[k].max_abs(),
                           F[1].comp.empty() ? 0.0 : F[1].comp[k].max_abs());
    if (supk == 0.0) continue;
    // e_k = c0 [e_i, e_j], e_i = c1 [e_a, e_b]: realize f [[e_a,e_b], e_j]
    double unit[3] = {0, 0, 0};
    unit[k] = 1.0;
    auto dec0 = commutator_decompose(alg, unit);
    const auto& t0 = dec0.terms.at(0);
    double unit1[3] = {0, 0, 0};
    unit1[t0.left] = 1.0;
    (void)commutator_decompose(alg, unit1);  // records the inner bracket layer

    FormField h(grid, 0, 3);
    std::memcpy(h.comp(0, t0.right), gphi.comp(0, 0), grid.nodes() * sizeof(double));
    FormField rhs(grid, 0, 3);
    for (Face face : {Face::F0, Face::F1}) {
      int fi = static_cast<int>(face);
      if (F[fi].comp.empty() || F[fi].comp[k].max_abs() == 0.0) continue;
      const BoundaryField& dg = dgphi[fi];
      BoundaryField tau = grid.mean_curvature_tau(face);
      for (int i1 = 0; i1 < grid.nlat(); ++i1)
        for (int i2 = 0; i2 < grid.nlat(); ++i2) {
          double fk = F[fi].comp[k].at(i1, i2) / (3.0 * dg.at(i1, i2));
          double tv = tau.at(i1, i2);
          for (int i3 = 0; i3 < grid.nnorm(); ++i3) {
            double s = face == Face::F0 ? grid.x3(i3) : 1.0 - grid.x3(i3);
            double rho = plateau(s, -0.5, -0.25, 0.20, 0.45);
            if (rho == 0.0) continue;
            size_t id = grid.index(i1, i2, i3);
            rhs.comp(0, t0.left)[id] += t0.coeff * fk * rho * std::exp(-2.0 * tv * s);
          }
        }
    }
    auto [gterm, rep] = green(flat, rhs);
    out.gh_pairs.push_back({gterm, h});
    out.f_sum += bracket0(gterm, h);
  }
  auto T = boundary_operator_T(flat, out.f_sum, nullptr);
  for (int fi = 0; fi < 2; ++fi)
    for (int k = 0; k < 3; ++k)
      for (size_t i = 0; i < T[fi].comp[k].values.size(); ++i) {
        double target = F[fi].comp.empty() ? 0.0 : F[fi].comp[k].values[i];
        out.t_residual = std::max(out.t_residual, std::abs(T[fi].comp[k].values[i] - target));
      }
  return out;
}

FormField codifferential_direct(const FormField& v) {
  const DomainGrid& g = *v.grid();
  if (v.degree() != 1) throw std::invalid_argument("codifferential_direct: 1-form required");
  const size_t n = g.nodes();
  FormField out(g, 0, v.lie_dim());
  std::vector<double> m(n), t(n), acc(n);
  for (int k = 0; k < v.lie_dim(); ++k) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const double *a1 = v.comp(0, k), *a2 = v.comp(1, k), *a3 = v.comp(2, k);
    for (size_t i = 0; i < n; ++i) m[i] = g.a()[i] * (g.gi11()[i] * a1[i] + g.gi12()[i] * a2[i]);
    apply_dlat(g, m.data(), t.data(), 0);
    for (size_t i = 0; i < n; ++i) acc[i] += t[i];
    for (size_t i = 0; i < n; ++i) m[i] = g.a()[i] * (g.gi12()[i] * a1[i] + g.gi22()[i] * a2[i]);
    apply_dlat(g, m.data(), t.data(), 1);
    for (size_t i = 0; i < n; ++i) acc[i] += t[i];
    for (size_t i = 0; i < n; ++i) m[i] = g.a()[i] * a3[i];
    apply_d3(g, m.data(), t.data());
    for (size_t i = 0; i < n; ++i) acc[i] += t[i];
    double* po = out.comp(0, k);
    for (size_t i = 0; i < n; ++i) po[i] = -acc[i] / g.a()[i];
  }
  return out;
}

DecompositionReport decompose_gauge_element(const DomainGrid& grid, const FormField& g0) {
  if (conductor_defect(g0) > 1e-12)
    throw std::invalid_argument("decompose_gauge_element: input must be conductor");
  ConnectionState flat(grid);
  DecompositionReport rep;
  rep.trace = boundary_operator_T(flat, g0, nullptr);
  rep.boundary_layer = realize_boundary_data(grid, rep.trace);
  FormField r = g0 - rep.boundary_layer.f_sum;
  rep.trace_residual_after = boundary_sup(boundary_operator_T(flat, r, nullptr));

  FormField w = codifferential_direct(exterior_d(r));
  rep.w_scale = w.max_abs();

  std::vector<double> lamF0(grid.nnorm()), lamF1(grid.nnorm()), lamInt(grid.nnorm());
  for (int i3 = 0; i3 < grid.nnorm(); ++i3) {
    double t = grid.x3(i3);
    lamF0[i3] = plateau(t, -0.5, -0.25, 0.16, 0.34);
    lamF1[i3] = plateau(1.0 - t, -0.5, -0.25, 0.16, 0.34);
    lamInt[i3] = 1.0 - lamF0[i3] - lamF1[i3];
  }
  auto split = [&](const std::vector<double>& lam) {
    FormField out(grid, 0, 3);
    for (int k = 0; k < 3; ++k)
      for (int i1 = 0; i1 < grid.nlat(); ++i1)
        for (int i2 = 0; i2 < grid.nlat(); ++i2)
          for (int i3 = 0; i3 < grid.nnorm(); ++i3) {
            if (lam[i3] == 0.0) continue;
            size_t id = grid.index(i1, i2, i3);
            out.comp(0, k)[id] = lam[i3] * w.comp(0, k)[id];
          }
    return out;
  };
  FormField wInt = split(lamInt), wF0 = split(lamF0), wF1 = split(lamF1);
  rep.interior_cert = interior_span(wInt);
  double compat_tol =
      std::max(1e-6, 4.0 * rep.trace_residual_after / std::max(1e-30, rep.w_scale));
  rep.face_cert[0] = boundary_span(wF0, Face::F0, compat_tol);
  rep.face_cert[1] = boundary_span(wF1, Face::F1, compat_tol);

  FormField rec = rep.interior_cert.reconstruct();
  rec += rep.face_cert[0].reconstruct();
  rec += rep.face_cert[1].reconstruct();
  rec -= w;
  rep.total_reconstruction_error = rec.max_abs();
  return rep;
}

void save_certificate(const SpanCertificate& cert, const std::string& dir,
                      const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json j;
  j["name"] = name;
  j["reconstruction_error"] = cert.reconstruction_error;
  j["max_dstar_residual"] = cert.max_dstar_residual;
  j["max_cbc_defect"] = cert.max_cbc_defect;
  j["terms"] = nlohmann::json::array();
  save_field(cert.target, dir + "/" + name + "_target.clb");
  for (size_t i = 0; i < cert.terms.size(); ++i) {
    std::string an = name + "_a" + std::to_string(i) + ".clb";
    std::string bn = name + "_b" + std::to_string(i) + ".clb";
    save_field(cert.terms[i].alpha, dir + "/" + an);
    save_field(cert.terms[i].beta, dir + "/" + bn);
    j["terms"].push_back({{"alpha", an}, {"beta", bn}, {"coeff", cert.terms[i].coeff}});
  }
  std::ofstream os(dir + "/" + name + ".json");
  os << j.dump(2) << "\n";
}

SpanCertificate load_certificate(const DomainGrid& grid, const std::string& dir,
                                 const std::string& name) {
  std::ifstream is(dir + "/" + name + ".json");
  if (!is) throw std::runtime_error("load_certificate: manifest missing");
  nlohmann::json j;
  is >> j;
  SpanCertificate cert;
  cert.target = load_field(grid, dir + "/" + name + "_target.clb");
  cert.reconstruction_error = j["reconstruction_error"];
  cert.max_dstar_residual = j["max_dstar_residual"];
  cert.max_cbc_defect = j["max_cbc_defect"];
  for (const auto& t : j["terms"]) {
    SpanTerm term;
    term.alpha = load_field(grid, dir + "/" + t["alpha"].get<std::string>());
    term.beta = load_field(grid, dir + "/" + t["beta"].get<std::string>());
    term.coeff = t["coeff"];
    cert.terms.push_back(std::move(term));
  }
  return cert;
}

}  // namespace clab
