#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kslab/motility.hpp"

namespace kslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

Clause clause(Verdict v, double param = kNaN, std::string witness = {}) {
  Clause c;
  c.verdict = v;
  c.param = param;
  c.witness = std::move(witness);
  return c;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Trend of a series: -1 strictly-falling overall and never rising,
// +1 never falling (flat counts here), 0 mixed.
int tail_trend(const std::vector<double>& v) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) down = false;
    if (v[i] < v[i - 1]) up = false;
  }
  if (down && v.back() < v.front()) return -1;
  if (up || down) return +1;
  return 0;
}

struct TabulatedTail {
  std::vector<double> s, g;
  std::vector<double> k_loc;    // -dlog(g)/dlog(s), local algebraic decay rate
  std::vector<double> chi_loc;  // -dlog(g)/ds, local exponential decay rate
};

TabulatedTail tabulated_tail(const Motility& m) {
  const auto& s = m.samples_s();
  const auto& g = m.samples_g();
  TabulatedTail t;
  const std::size_t from = s.size() > 8 ? s.size() - s.size() / 4 : 0;
  for (std::size_t i = from; i < s.size(); ++i) {
    t.s.push_back(s[i]);
    t.g.push_back(g[i]);
  }
  for (std::size_t i = 1; i < t.s.size(); ++i) {
    if (t.g[i] <= 0 || t.g[i - 1] <= 0) continue;
    const double dlg = std::log(t.g[i]) - std::log(t.g[i - 1]);
    t.k_loc.push_back(-dlg / (std::log(t.s[i]) - std::log(t.s[i - 1])));
    t.chi_loc.push_back(-dlg / (t.s[i] - t.s[i - 1]));
  }
  return t;
}

bool nearly_flat(const std::vector<double>& v) {
  return std::fabs(v.back() - v.front()) <=
         1e-6 * std::max(1.0, std::fabs(v.back()));
}

// Asymptotic clauses for sampled input are decided from the tail trend alone
// and degrade to undecidable when the tail is not monotone.
void decide_tabulated_asymptotics(const Motility& m, AssumptionReport& r) {
  const TabulatedTail tail = tabulated_tail(m);

  switch (tail_trend(tail.g)) {
    case -1:
      r.decay_to_zero = clause(Verdict::holds, kNaN,
                               "tail of gamma decreases (sampled trend)");
      break;
    case +1:
      r.decay_to_zero =
          clause(Verdict::fails, kNaN, "tail of gamma does not decrease");
      break;
    default:
      r.decay_to_zero =
          clause(Verdict::undecidable, kNaN, "tail of gamma is not monotone");
  }

  if (r.eps <= 0.0) {
    r.limit_below_inv_eps =
        clause(Verdict::holds, kNaN, "no constraint when eps = 0");
  } else if (r.decay_to_zero.verdict == Verdict::holds) {
    r.limit_below_inv_eps = r.decay_to_zero;
  } else if (r.decay_to_zero.verdict == Verdict::fails) {
    const double last = tail.g.back();
    r.limit_below_inv_eps =
        last < 1.0 / r.eps
            ? clause(Verdict::holds, kNaN, "tail value " + fmt(last) + " < 1/eps")
            : clause(Verdict::fails, kNaN, "tail value " + fmt(last) + " >= 1/eps");
  } else {
    r.limit_below_inv_eps = clause(Verdict::undecidable, kNaN,
                                   "tail of gamma is not monotone");
  }

  if (tail.k_loc.size() < 2) {
    r.poly_lower_bound =
        clause(Verdict::undecidable, kNaN, "too few positive tail samples");
  } else {
    switch (tail_trend(tail.k_loc)) {
      case -1:
        r.poly_lower_bound = clause(
            Verdict::holds,
            *std::max_element(tail.k_loc.begin(), tail.k_loc.end()),
            "local algebraic rate bounded along the tail");
        break;
      case +1:
        if (nearly_flat(tail.k_loc))
          r.poly_lower_bound = clause(Verdict::holds, tail.k_loc.back(),
                                      "local algebraic rate constant");
        else
          r.poly_lower_bound =
              clause(Verdict::fails, kNaN,
                     "local algebraic rate grows: faster than any power");
        break;
      default:
        r.poly_lower_bound = clause(Verdict::undecidable, kNaN,
                                    "algebraic-rate tail is not monotone");
    }
  }

  if (tail.chi_loc.size() < 2) {
    r.subexponential =
        clause(Verdict::undecidable, kNaN, "too few positive tail samples");
    r.exp_lower_bound = r.subexponential;
    return;
  }
  switch (tail_trend(tail.chi_loc)) {
    case -1:
      r.subexponential = clause(Verdict::holds, kNaN,
                                "local exponential rate decays along the tail");
      r.exp_lower_bound =
          clause(Verdict::holds, std::max(0.0, tail.chi_loc.back()),
                 "rate bounded by its last tail value");
      break;
    case +1:
      r.subexponential =
          clause(Verdict::fails, kNaN,
                 "local exponential rate does not decay along the tail");
      if (nearly_flat(tail.chi_loc))
        r.exp_lower_bound = clause(Verdict::holds, tail.chi_loc.back(),
                                   "local exponential rate constant");
      else
        r.exp_lower_bound = clause(Verdict::fails, kNaN,
                                   "local exponential rate grows");
      break;
    default:
      r.subexponential = clause(Verdict::undecidable, kNaN,
                                "exponential-rate tail is not monotone");
      r.exp_lower_bound = r.subexponential;
  }
}

}  // namespace

AssumptionReport check_assumptions(const Motility& m, int n, double eps,
                                   double s_max, int samples) {
  if (n < 1) throw std::invalid_argument("check_assumptions needs n >= 1");
  if (eps < 0) throw std::invalid_argument("check_assumptions needs eps >= 0");
  if (!(s_max > 0)) throw std::invalid_argument("s_max must be positive");
  if (samples < 64)
    throw std::invalid_argument("assumption checks need at least 64 samples");

  AssumptionReport r;
  r.n = n;
  r.eps = eps;

  const MotilityFamily fam = m.family();
  const bool closed_form = fam != MotilityFamily::tabulated;

  // --- positivity and monotonicity ---------------------------------------
  if (closed_form) {
    r.positivity_monotonicity =
        clause(Verdict::holds, kNaN, "analytic: gamma > 0, gamma' <= 0");
  } else {
    r.positivity_monotonicity = clause(Verdict::holds);
    const auto& s = m.samples_s();
    const auto& g = m.samples_g();
    const auto& dg = m.samples_dg();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(g[i] > 0) || dg[i] > 0) {
        r.positivity_monotonicity =
            clause(Verdict::fails, s[i],
                   "violated at s = " + fmt(s[i]) + " (gamma = " + fmt(g[i]) +
                       ", gamma' = " + fmt(dg[i]) + ")");
        break;
      }
    }
  }

  // --- asymptotic decay clauses -------------------------------------------
  if (closed_form) {
    r.decay_to_zero = clause(Verdict::holds, kNaN, "analytic limit 0");
    r.limit_below_inv_eps = clause(
        Verdict::holds, kNaN,
        eps > 0 ? "analytic limit 0 < 1/eps" : "no constraint when eps = 0");
    switch (fam) {
      case MotilityFamily::power:
      case MotilityFamily::power_log:
        r.poly_lower_bound = clause(Verdict::holds, m.param_k(),
                                    "s^k gamma -> inf for every larger k");
        r.subexponential = clause(Verdict::holds);
        r.exp_lower_bound = clause(Verdict::holds, 0.0);
        break;
      case MotilityFamily::exponential:
        r.poly_lower_bound =
            clause(Verdict::fails, kNaN, "decays exponentially");
        r.subexponential = clause(Verdict::fails, kNaN,
                                  "exp(alpha s) gamma -> 0 for alpha < chi");
        r.exp_lower_bound = clause(Verdict::holds, m.param_chi());
        break;
      case MotilityFamily::stretched_exponential:
        if (m.param_beta() < 1.0) {
          r.poly_lower_bound =
              clause(Verdict::fails, kNaN, "decays faster than any power");
          r.subexponential = clause(
              Verdict::holds, kNaN, "every exp(alpha s) eventually dominates");
          r.exp_lower_bound = clause(Verdict::holds, 0.0);
        } else if (m.param_beta() == 1.0) {
          r.poly_lower_bound = clause(Verdict::fails);
          r.subexponential = clause(Verdict::fails);
          r.exp_lower_bound = clause(Verdict::holds, m.param_chi());
        } else {
          r.poly_lower_bound = clause(Verdict::fails);
          r.subexponential = clause(Verdict::fails);
          r.exp_lower_bound = clause(Verdict::fails, kNaN,
                                     "decays faster than every exponential");
        }
        break;
      default:
        break;
    }
  } else {
    decide_tabulated_asymptotics(m, r);
  }

  // --- convexity clauses ----------------------------------------------------
  Motility::RatioInf ri{};
  if (closed_form) {
    ri = m.ratio_inf();
  } else {
    const auto& s = m.samples_s();
    ri.value = m.supremal_l(s.front(), std::min(s.back(), s_max), samples);
    ri.attained = true;
  }

  // strict threshold t < ratio everywhere: at an unattained infimum the
  // non-strict comparison against the infimum is the right test
  auto strict_holds = [&](double t) {
    return ri.attained ? t < ri.value : t <= ri.value;
  };

  const double t_strict = std::sqrt(n / 2.0);
  const double t_half = n / 2.0;
  const double t_int = 1.0 + std::floor(n / 2.0);

  if (fam == MotilityFamily::power && n >= 3) {
    // boundary semantics expressed on k itself so threshold comparisons are
    // bitwise reproducible
    const double k = m.param_k();
    const double k_strict = (std::sqrt(2.0 * n) + 2.0) / (n - 2.0);
    const double k_half = 2.0 / (n - 2.0);
    const double k_int = 1.0 / std::floor(n / 2.0);
    r.convexity_strict =
        clause(k < k_strict ? Verdict::holds : Verdict::fails, k_strict,
               "k threshold (sqrt(2n)+2)/(n-2)");
    r.convexity_above_half_n =
        clause(k < k_half ? Verdict::holds : Verdict::fails, 1.0 + 1.0 / k,
               "k threshold 2/(n-2) = " + fmt(k_half));
    r.convexity_integer =
        clause(k <= k_int ? Verdict::holds : Verdict::fails, kNaN,
               "k threshold 1/floor(n/2) = " + fmt(k_int));
  } else {
    r.convexity_strict =
        clause(strict_holds(t_strict) ? Verdict::holds : Verdict::fails,
               t_strict, "needs ratio > sqrt(n/2) everywhere");
    r.convexity_above_half_n =
        clause(ri.value > t_half ? Verdict::holds : Verdict::fails, ri.value,
               "needs some l0 in (n/2, inf ratio]");
    r.convexity_integer =
        clause(t_int <= ri.value ? Verdict::holds : Verdict::fails, kNaN,
               "needs ratio >= 1 + floor(n/2) everywhere");
  }
  r.convexity_supremal =
      clause(ri.value > -kInf ? Verdict::holds : Verdict::fails, ri.value,
             ri.attained ? "infimum attained" : "infimum approached asymptotically");

  return r;
}

RegimeVerdict classify_regime(int n, double eps, const Motility& m,
                              double mass) {
  if (!(mass > 0)) throw std::invalid_argument("classify_regime needs mass > 0");
  if (eps < 0) throw std::invalid_argument("classify_regime needs eps >= 0");
  if (n < 1) throw std::invalid_argument("classify_regime needs n >= 1");

  const AssumptionReport rep = check_assumptions(m, n, eps);
  RegimeVerdict v;

  const bool base = rep.positivity_monotonicity.ok() &&
                    (eps == 0.0 || rep.decay_to_zero.ok());

  if (n == 2) {
    if (base && rep.subexponential.ok()) {
      v.regime = Regime::uniformly_bounded;
      v.rule = "2d.decay-slower-than-any-exponential";
      return v;
    }
    if (base && rep.exp_lower_bound.ok() && rep.exp_lower_bound.param > 0) {
      const double chi = rep.exp_lower_bound.param;
      const double threshold = 4.0 * kPi / chi;
      v.thresholds.emplace_back("critical_mass", threshold);
      if (mass < threshold) {
        v.regime = Regime::uniformly_bounded;
        v.rule = "2d.subcritical-mass";
        return v;
      }
      if (m.family() == MotilityFamily::exponential && mass > threshold) {
        v.regime = Regime::blowup_possible;
        v.rule = "2d.exponential-motility-supercritical-mass";
        v.notes = "aggregation toward a point mass at time infinity";
        return v;
      }
      v.regime = Regime::outside_theory;
      v.rule = "2d.at-or-above-critical-mass-without-blowup-rule";
      v.notes = mass == threshold
                    ? "mass sits exactly on the critical threshold"
                    : "supercritical mass, no blow-up statement for this family";
      return v;
    }
    v.regime = Regime::outside_theory;
    v.rule = "2d.no-decay-clause-applies";
    return v;
  }

  if (n >= 3) {
    if (eps == 0.0) {
      if (rep.decay_to_zero.ok() && rep.convexity_above_half_n.ok()) {
        v.regime = Regime::uniformly_bounded;
        v.rule = "nd.elliptic.decay-and-convexity-above-half-n";
        if (m.family() == MotilityFamily::power)
          v.thresholds.emplace_back("k_bounded", 2.0 / (n - 2.0));
        return v;
      }
      if (rep.convexity_strict.ok()) {
        v.regime = Regime::global_existence_boundedness_open;
        v.rule = "nd.elliptic.strict-convexity-existence";
        if (m.family() == MotilityFamily::power)
          v.thresholds.emplace_back("k_exists",
                                    (std::sqrt(2.0 * n) + 2.0) / (n - 2.0));
        v.notes = "global existence; uniform boundedness not settled";
        return v;
      }
      v.regime = Regime::outside_theory;
      v.rule = "nd.elliptic.no-convexity-clause";
      return v;
    }
    if (rep.decay_to_zero.ok() && rep.limit_below_inv_eps.ok() &&
        rep.convexity_integer.ok()) {
      v.regime = Regime::uniformly_bounded;
      v.rule = "nd.parabolic.decay-and-integer-convexity";
      if (m.family() == MotilityFamily::power)
        v.thresholds.emplace_back("k_bounded", 1.0 / std::floor(n / 2.0));
      return v;
    }
    v.regime = Regime::outside_theory;
    v.rule = "nd.parabolic.no-convexity-clause";
    return v;
  }

  v.regime = Regime::outside_theory;
  v.rule = "1d.not-covered";
  return v;
}

}  // namespace kslab
