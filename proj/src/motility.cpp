#include "kslab/motility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

Motility Motility::power(double k) {
  require(k > 0 && std::isfinite(k), "power motility needs k > 0");
  Motility m;
  m.family_ = MotilityFamily::power;
  m.k_ = k;
  return m;
}

Motility Motility::exponential(double chi) {
  require(chi > 0 && std::isfinite(chi), "exponential motility needs chi > 0");
  Motility m;
  m.family_ = MotilityFamily::exponential;
  m.chi_ = chi;
  return m;
}

Motility Motility::stretched_exponential(double chi, double beta) {
  require(chi > 0 && std::isfinite(chi), "stretched motility needs chi > 0");
  require(beta > 0 && std::isfinite(beta), "stretched motility needs beta > 0");
  Motility m;
  m.family_ = MotilityFamily::stretched_exponential;
  m.chi_ = chi;
  m.beta_ = beta;
  return m;
}

Motility Motility::power_log(double k) {
  require(k > 0 && std::isfinite(k), "power-log motility needs k > 0");
  Motility m;
  m.family_ = MotilityFamily::power_log;
  m.k_ = k;
  return m;
}

Motility Motility::tabulated(std::vector<double> s, std::vector<double> g,
                             std::vector<double> dg, std::vector<double> ddg) {
  require(s.size() >= 2, "tabulated motility needs at least 2 samples");
  require(s.size() == g.size() && s.size() == dg.size() && s.size() == ddg.size(),
          "tabulated motility columns must have equal length");
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(std::isfinite(s[i]) && std::isfinite(g[i]) && std::isfinite(dg[i]) &&
                std::isfinite(ddg[i]),
            "tabulated motility values must be finite");
    if (i > 0) require(s[i] > s[i - 1], "tabulated abscissae must increase");
  }
  require(s.front() > 0, "tabulated abscissae must be positive");
  Motility m;
  m.family_ = MotilityFamily::tabulated;
  m.ts_ = std::move(s);
  m.tg_ = std::move(g);
  m.tdg_ = std::move(dg);
  m.tddg_ = std::move(ddg);
  return m;
}

Motility Motility::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open motility table: " + path);
  std::vector<double> s, g, dg, ddg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream row(line);
    double a, b, c, d;
    if (!(row >> a >> b >> c >> d)) {
      if (lineno == 1) continue;  // header
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 4 numeric columns");
    }
    s.push_back(a);
    g.push_back(b);
    dg.push_back(c);
    ddg.push_back(d);
  }
  return tabulated(std::move(s), std::move(g), std::move(dg), std::move(ddg));
}

GammaValue Motility::eval(double s) const {
  switch (family_) {
    case MotilityFamily::power: {
      if (!(s > 0)) throw std::domain_error("power motility needs s > 0");
      const double g = std::pow(s, -k_);
      return {g, -k_ * g / s, k_ * (k_ + 1.0) * g / (s * s)};
    }
    case MotilityFamily::exponential: {
      const double g = std::exp(-chi_ * s);
      return {g, -chi_ * g, chi_ * chi_ * g};
    }
    case MotilityFamily::stretched_exponential: {
      if (!(s > 0)) throw std::domain_error("stretched motility needs s > 0");
      const double sb = std::pow(s, beta_);
      const double g = std::exp(-chi_ * sb);
      const double dg = -chi_ * beta_ * sb / s * g;
      const double ddg =
          chi_ * beta_ * sb / (s * s) * g * (chi_ * beta_ * sb - (beta_ - 1.0));
      return {g, dg, ddg};
    }
    case MotilityFamily::power_log: {
      if (!(s > 0)) throw std::domain_error("power-log motility needs s > 0");
      const double L = std::log1p(s);
      const double sk = std::pow(s, k_);
      const double D = sk * L;
      const double Dp = k_ * sk / s * L + sk / (1.0 + s);
      const double Dpp = k_ * (k_ - 1.0) * sk / (s * s) * L +
                         2.0 * k_ * sk / s / (1.0 + s) -
                         sk / ((1.0 + s) * (1.0 + s));
      const double g = 1.0 / D;
      return {g, -Dp / (D * D), (2.0 * Dp * Dp - D * Dpp) / (D * D * D)};
    }
    case MotilityFamily::tabulated: {
      if (s < ts_.front() || s > ts_.back())
        throw std::domain_error("tabulated motility sampled on [" +
                                std::to_string(ts_.front()) + ", " +
                                std::to_string(ts_.back()) + "], asked at " +
                                std::to_string(s));
      auto it = std::lower_bound(ts_.begin(), ts_.end(), s);
      std::size_t j = static_cast<std::size_t>(it - ts_.begin());
      if (j == 0) return {tg_[0], tdg_[0], tddg_[0]};
      const double t = (s - ts_[j - 1]) / (ts_[j] - ts_[j - 1]);
      auto lerp = [t](double a, double b) { return a + t * (b - a); };
      return {lerp(tg_[j - 1], tg_[j]), lerp(tdg_[j - 1], tdg_[j]),
              lerp(tddg_[j - 1], tddg_[j])};
    }
  }
  throw std::logic_error("unreachable motility family");
}

double Motility::convexity_ratio(double s) const {
  const GammaValue v = eval(s);
  if (v.dg == 0.0) {
    if (v.ddg > 0.0) return kInf;
    if (v.ddg < 0.0) return -kInf;
    return kInf;  // flat point constrains nothing
  }
  return v.g * v.ddg / (v.dg * v.dg);
}

double Motility::supremal_l(double s_min, double s_max, int samples) const {
  require(s_min > 0 && s_max > s_min, "supremal_l needs 0 < s_min < s_max");
  require(samples >= 2, "supremal_l needs at least 2 samples");
  switch (family_) {
    case MotilityFamily::power:
      return 1.0 + 1.0 / k_;  // ratio is constant in s
    case MotilityFamily::exponential:
      return 1.0;  // chi^2 / chi^2
    case MotilityFamily::stretched_exponential:
      // ratio = 1 + (1-beta)/(chi beta s^beta), monotone in s
      return std::min(convexity_ratio(s_min), convexity_ratio(s_max));
    case MotilityFamily::power_log: {
      // monotone increasing from (k+2)/(k+1) toward (k+1)/k; the infimum over
      // a range sits at its left end
      return convexity_ratio(s_min);
    }
    case MotilityFamily::tabulated: {
      double inf = kInf;
      for (std::size_t i = 0; i < ts_.size(); ++i) {
        if (ts_[i] < s_min || ts_[i] > s_max) continue;
        double r;
        if (tdg_[i] == 0.0)
          r = tddg_[i] >= 0.0 ? kInf : -kInf;  // +inf contribution at flat points
        else
          r = tg_[i] * tddg_[i] / (tdg_[i] * tdg_[i]);
        inf = std::min(inf, r);
      }
      if (inf == kInf && ts_.empty())
        throw std::invalid_argument("no tabulated samples in range");
      return inf;
    }
  }
  throw std::logic_error("unreachable motility family");
}

Motility::RatioInf Motility::ratio_inf() const {
  switch (family_) {
    case MotilityFamily::power:
      return {1.0 + 1.0 / k_, true};
    case MotilityFamily::exponential:
      return {1.0, true};
    case MotilityFamily::stretched_exponential:
      if (beta_ == 1.0) return {1.0, true};
      if (beta_ < 1.0) return {1.0, false};  // approaches 1 from above at s -> inf
      return {-kInf, false};                 // gamma'' < 0 near 0 when beta > 1
    case MotilityFamily::power_log:
      // ratio increases from (k+2)/(k+1) at s -> 0+, never attained
      return {1.0 + 1.0 / (k_ + 1.0), false};
    case MotilityFamily::tabulated:
      return {supremal_l(ts_.front(), ts_.back()), true};
  }
  throw std::logic_error("unreachable motility family");
}

std::string Motility::describe() const {
  std::ostringstream os;
  switch (family_) {
    case MotilityFamily::power:
      os << "power(k=" << k_ << ")";
      break;
    case MotilityFamily::exponential:
      os << "exponential(chi=" << chi_ << ")";
      break;
    case MotilityFamily::stretched_exponential:
      os << "stretched_exponential(chi=" << chi_ << ", beta=" << beta_ << ")";
      break;
    case MotilityFamily::power_log:
      os << "power_log(k=" << k_ << ")";
      break;
    case MotilityFamily::tabulated:
      os << "tabulated(" << ts_.size() << " samples on [" << ts_.front() << ", "
         << ts_.back() << "])";
      break;
  }
  return os.str();
}

double implied_k(double l) {
  if (!(l > 1.0))
    throw std::invalid_argument("implied_k needs l > 1, got " + std::to_string(l));
  return 1.0 / (l - 1.0);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::undecidable: return "undecidable-numerically";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::uniformly_bounded: return "uniformly-bounded";
    case Regime::global_existence_boundedness_open:
      return "global-existence-boundedness-open";
    case Regime::blowup_possible: return "blowup-possible";
    case Regime::outside_theory: return "outside-theory";
  }
  return "?";
}

}  // namespace kslab
