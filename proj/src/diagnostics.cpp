#include "kslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kslab {

namespace {
void check_same_grid(const Field& a, const Field& b) {
  if (a.grid != b.grid)
    throw std::invalid_argument("fields live on different grids");
}
}  // namespace

double key_identity_residual(const Motility& m, const HelmholtzSolver& H,
                             const Field& w_prev, const Field& w,
                             const Field& v, const Field& u, double dt) {
  check_same_grid(w_prev, w);
  check_same_grid(w, v);
  check_same_grid(v, u);
  if (!(dt > 0)) throw std::invalid_argument("residual needs dt > 0");

  Field gu(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) gu.v[i] = m(v.v[i]) * u.v[i];
  Field smoothed = H.solve(gu);

  Field defect(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    defect.v[i] = (w.v[i] - w_prev.v[i]) / dt + gu.v[i] - smoothed.v[i];
  return lp_norm(defect, 2.0);
}

double kid0_residual(const Motility& m, const HelmholtzSolver& H,
                     const Field& v_prev, const Field& v, const Field& u,
                     double dt, double eps) {
  if (eps != 0.0)
    throw std::invalid_argument(
        "reduced identity requires the elliptic signal equation (eps = 0)");
  check_same_grid(v_prev, v);
  check_same_grid(v, u);
  if (!(dt > 0)) throw std::invalid_argument("residual needs dt > 0");

  Field gu(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) gu.v[i] = m(v.v[i]) * u.v[i];
  Field smoothed = H.solve(gu);
  Field lap_v = laplacian_neumann(v);

  Field defect(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double g = m(v.v[i]);
    defect.v[i] = (v.v[i] - v_prev.v[i]) / dt - g * lap_v.v[i] +
                  v.v[i] * g - smoothed.v[i];
  }
  return lp_norm(defect, 2.0);
}

double envelope_margin(const Field& w, const Field& w0, double t,
                       double gamma_at_vstar) {
  check_same_grid(w, w0);
  if (t < 0) throw std::invalid_argument("envelope needs t >= 0");
  const double growth = std::exp(gamma_at_vstar * t);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i)
    margin = std::min(margin, w0.v[i] * growth - w.v[i]);
  return margin;
}

double comparison_margin(const Field& v, const Field& w, double ctilde,
                         double K) {
  check_same_grid(v, w);
  if (!(ctilde > 1.0) || !(K > 0.0))
    throw std::invalid_argument("comparison needs ctilde > 1 and K > 0");
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    margin = std::min(margin, ctilde * (w.v[i] + K) - v.v[i]);
  return margin;
}

double weighted_energy(const Field& u, const Field& v, double p, double q,
                       const Motility& m) {
  check_same_grid(u, v);
  if (!(p >= 0)) throw std::invalid_argument("weighted energy needs p >= 0");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    // rounding can leave cells a hair below zero; they carry no energy
    const double up = std::pow(std::max(u.v[i], 0.0), 1.0 + p);
    const double gq = q == 0.0 ? 1.0 : std::pow(m(v.v[i]), q);
    s += up * gq;
  }
  return s * u.grid->cell_vol;
}

std::vector<double> lambda_weights(int p) {
  if (p < 0) throw std::invalid_argument("lambda weights need p >= 0");
  std::vector<double> w(static_cast<std::size_t>(p) + 1);
  w[0] = 1.0;
  for (int j = 1; j <= p; ++j) w[j] = (p + 1 - j) * w[j - 1] / j;
  return w;
}

double a3b_condition_margin(const Motility& m, double p, double s_min,
                            double s_max, int samples) {
  if (!(p >= 0)) throw std::invalid_argument("condition margin needs p >= 0");
  if (!(s_min > 0 && s_max > s_min))
    throw std::invalid_argument("condition margin needs 0 < s_min < s_max");
  if (samples < 2) throw std::invalid_argument("condition margin needs samples >= 2");

  double margin = std::numeric_limits<double>::infinity();
  if (m.family() == MotilityFamily::tabulated) {
    const auto& s = m.samples_s();
    const auto& g = m.samples_g();
    const auto& dg = m.samples_dg();
    const auto& ddg = m.samples_ddg();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < s_min || s[i] > s_max) continue;
      margin = std::min(margin, g[i] * ddg[i] - (p + 1.0) * dg[i] * dg[i]);
    }
    return margin;
  }
  const double lr = std::log(s_max / s_min);
  for (int i = 0; i < samples; ++i) {
    const double s = s_min * std::exp(lr * i / (samples - 1));
    const GammaValue gv = m.eval(s);
    margin = std::min(margin, gv.g * gv.ddg - (p + 1.0) * gv.dg * gv.dg);
  }
  return margin;
}

MoserLadder moser_ladder(int n, double k, int rmax) {
  if (n < 3) throw std::invalid_argument("exponent ladder needs n >= 3");
  if (!(k > 0)) throw std::invalid_argument("exponent ladder needs k > 0");
  if (!(k < 2.0 / (n - 2)))
    throw std::invalid_argument(
        "exponent ladder needs k < 2/(n-2) = " + std::to_string(2.0 / (n - 2)) +
        ", got " + std::to_string(k));
  if (rmax < 0) throw std::invalid_argument("exponent ladder needs rmax >= 0");

  MoserLadder L;
  L.n = n;
  L.k = k;
  L.qstar = 2.0 * n / (n - 2);
  L.normalizer = 2.0 / (L.qstar - n * k);
  L.p.resize(static_cast<std::size_t>(rmax) + 1);
  L.p[0] = L.qstar / 2.0;
  for (int r = 1; r <= rmax; ++r) L.p[r] = 2.0 * L.p[r - 1] - n * k / 2.0;
  return L;
}

MoserAlpha moser_alpha(double p, double q, double k, int n) {
  if (n < 3) throw std::invalid_argument("interpolation exponent needs n >= 3");
  if (!(k > 0) || !(k < 2.0 / (n - 2)))
    throw std::invalid_argument("interpolation exponent needs 0 < k < 2/(n-2)");
  const double qstar = 2.0 * n / (n - 2);
  if (!(q >= qstar / 2 - 1e-12))
    throw std::invalid_argument("interpolation exponent needs q >= qstar/2");
  const double p_expected = 2.0 * q - n * k / 2.0;
  if (std::fabs(p - p_expected) > 1e-9 * std::max(1.0, std::fabs(p)))
    throw std::invalid_argument("ladder pair violated: p must equal 2q - nk/2");
  if (!(p > q))
    throw std::invalid_argument("interpolation exponent needs p > q");

  MoserAlpha a;
  a.alpha = (p - k) * (p - q) / (p * (p - k - 2.0 * q / qstar));
  a.ratios[0] = (qstar * (p - k) - 2.0 * p) / (qstar * (q - k) - 2.0 * q);
  a.ratios[1] = ((qstar - 2.0) * q - k * qstar) / (qstar * (p - k) - 2.0 * q);
  a.ratios[2] = ((p - q) * qstar) / (q * (qstar - 2.0) - k * qstar);
  a.ratios[3] = (qstar * (p - k) - 2.0 * q) / ((qstar - 2.0) * q - k * qstar);
  return a;
}

namespace {
// trapezoid integral of samples (t, y) over [a, b] with linear interpolation
// at both ends; assumes t strictly increasing and a >= t.front(), b <= t.back()
double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                 double a, double b) {
  auto value_at = [&](double x, std::size_t hint) {
    std::size_t j = hint;
    while (t[j + 1] < x) ++j;
    const double s = (x - t[j]) / (t[j + 1] - t[j]);
    return y[j] + s * (y[j + 1] - y[j]);
  };
  std::size_t i = 0;
  while (t[i + 1] <= a) ++i;
  double acc = 0.0;
  double t_prev = a, y_prev = value_at(a, i);
  for (std::size_t j = i + 1; j < t.size() && t[j] < b; ++j) {
    acc += 0.5 * (y_prev + y[j]) * (t[j] - t_prev);
    t_prev = t[j];
    y_prev = y[j];
  }
  std::size_t j = 0;
  while (t[j + 1] < b) ++j;
  const double y_b = value_at(b, j);
  acc += 0.5 * (y_prev + y_b) * (b - t_prev);
  return acc;
}
}  // namespace

GronwallAudit gronwall_envelope_audit(const std::vector<double>& t,
                                      const std::vector<double>& y,
                                      const std::vector<double>& g,
                                      const std::vector<double>& h, double r) {
  if (t.size() < 2 || t.size() != y.size() || t.size() != g.size() ||
      t.size() != h.size())
    throw std::invalid_argument("audit needs equal-length series, >= 2 samples");
  if (!(r > 0)) throw std::invalid_argument("audit needs window r > 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw std::invalid_argument("audit needs strictly increasing times");

  GronwallAudit out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = t[i], b = t[i] + r;
    if (b > t.back() + 1e-12 * std::max(1.0, std::fabs(t.back()))) break;
    const double bb = std::min(b, t.back());
    const double a1 = trapezoid(t, g, a, bb);
    const double a2 = trapezoid(t, h, a, bb);
    const double a3 = trapezoid(t, y, a, bb);
    // y at the window end, linear interpolation
    std::size_t j = 0;
    while (j + 2 < t.size() && t[j + 1] < bb) ++j;
    const double s = (bb - t[j]) / (t[j + 1] - t[j]);
    const double y_end = y[j] + s * (y[j + 1] - y[j]);
    const double bound = (a3 / r + a2) * std::exp(a1);
    const double slack = 1e-12 * std::max({1.0, std::fabs(bound), std::fabs(y_end)});
    const double margin = bound - y_end;
    any = true;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.t_worst = a;
    }
    if (y_end > bound + slack) out.ok = false;
  }
  if (!any) {
    out.worst_margin = 0.0;
  }
  return out;
}

double sliding_window_sup(const std::vector<double>& t,
                          const std::vector<double>& y, double width) {
  if (t.size() != y.size())
    throw std::invalid_argument("window sup needs equal-length series");
  if (!(width > 0)) throw std::invalid_argument("window sup needs width > 0");
  if (t.size() < 2) return 0.0;
  double sup = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double b = t[i] + width;
    if (b > t.back() + 1e-12 * std::max(1.0, std::fabs(t.back()))) break;
    sup = std::max(sup, trapezoid(t, y, t[i], std::min(b, t.back())));
    any = true;
  }
  return any ? sup : 0.0;
}

std::vector<std::pair<int, int>> energy_monitor_set(int n) {
  if (n < 1) throw std::invalid_argument("monitor set needs n >= 1");
  std::vector<std::pair<int, int>> set{{1, 0}, {1, 1}};
  const int p = n / 2;
  for (int j = 0; j <= p; ++j) {
    auto e = std::make_pair(p, j);
    if (std::find(set.begin(), set.end(), e) == set.end()) set.push_back(e);
  }
  std::sort(set.begin(), set.end());
  return set;
}

}  // namespace kslab
