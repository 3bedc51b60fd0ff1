#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace kslab {

/* Motility laws gamma(s): positive, non-increasing, three times differentiable
 * on s > 0.  Construction validates the family parameters; evaluation outside
 * the domain throws std::domain_error.  Instances are immutable. */

enum class MotilityFamily {
  power,                  // s^-k, k > 0
  exponential,            // exp(-chi s), chi > 0
  stretched_exponential,  // exp(-chi s^beta), chi > 0, beta > 0
  power_log,              // 1 / (s^k log(1+s)), k > 0
  tabulated,              // sampled (s, gamma, gamma', gamma'')
};

struct GammaValue {
  double g;    // gamma(s)
  double dg;   // gamma'(s)
  double ddg;  // gamma''(s)
};

class Motility {
 public:
  static Motility power(double k);
  static Motility exponential(double chi);
  static Motility stretched_exponential(double chi, double beta);
  static Motility power_log(double k);
  static Motility tabulated(std::vector<double> s, std::vector<double> g,
                            std::vector<double> dg, std::vector<double> ddg);
  // 4-column CSV (s, gamma, gamma', gamma''), header line optional.
  static Motility tabulated_from_csv(const std::string& path);

  MotilityFamily family() const { return family_; }
  double param_k() const { return k_; }
  double param_chi() const { return chi_; }
  double param_beta() const { return beta_; }

  GammaValue eval(double s) const;
  double operator()(double s) const { return eval(s).g; }

  // Convexity ratio gamma * gamma'' / gamma'^2 at one point; +infinity where
  // gamma' vanishes while gamma'' > 0, -infinity where gamma'' < 0 there.
  double convexity_ratio(double s) const;

  // Infimum of the convexity ratio over [s_min, s_max], log-spaced samples for
  // the numeric families; exact closed form where one exists (power,
  // exponential, stretched exponential on an unbounded tail, power-log).
  double supremal_l(double s_min, double s_max, int samples = 256) const;

  // Infimum of the convexity ratio over the whole half line s > 0, plus
  // whether some s attains it.  Attainment decides strict-inequality clauses.
  struct RatioInf {
    double value;
    bool attained;
  };
  RatioInf ratio_inf() const;

  // Tabulated accessors; empty for closed-form families.
  const std::vector<double>& samples_s() const { return ts_; }
  const std::vector<double>& samples_g() const { return tg_; }
  const std::vector<double>& samples_dg() const { return tdg_; }
  const std::vector<double>& samples_ddg() const { return tddg_; }

  std::string describe() const;

 private:
  Motility() = default;
  MotilityFamily family_ = MotilityFamily::power;
  double k_ = std::numeric_limits<double>::quiet_NaN();
  double chi_ = std::numeric_limits<double>::quiet_NaN();
  double beta_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ts_, tg_, tdg_, tddg_;
};

// Largest l admissible in "l gamma'^2 <= gamma gamma''" maps to the decay
// exponent 1/(l-1); domain l > 1.
double implied_k(double l);

enum class Verdict { holds, fails, undecidable };

const char* to_string(Verdict v);

struct Clause {
  Verdict verdict = Verdict::undecidable;
  double param = std::numeric_limits<double>::quiet_NaN();
  std::string witness;

  bool ok() const { return verdict == Verdict::holds; }
};

/* One verdict per structural condition on gamma.
 *   decay_to_zero           : gamma(s) -> 0
 *   limit_below_inv_eps     : lim gamma < 1/eps (vacuous at eps = 0)
 *   poly_lower_bound        : some k > 0 with s^k gamma -> infinity
 *                             (param: infimal admissible k)
 *   subexponential          : exp(alpha s) gamma -> infinity for every alpha > 0
 *   exp_lower_bound         : some chi > 0 with exp(chi s) gamma -> infinity
 *                             (param: infimal admissible chi)
 *   convexity_strict        : sqrt(n/2) gamma'^2 <  gamma gamma''  everywhere
 *   convexity_above_half_n  : some l0 > n/2 with l0 gamma'^2 <= gamma gamma''
 *                             (param: supremal l0)
 *   convexity_integer       : (1 + floor(n/2)) gamma'^2 <= gamma gamma''
 *   convexity_supremal      : param carries inf gamma gamma''/gamma'^2
 * Closed-form families are decided analytically; tabulated input decides
 * pointwise clauses on its samples and asymptotic clauses from the tail
 * trend, reporting undecidable when the tail is not monotone. */
struct AssumptionReport {
  int n = 0;
  double eps = 0;
  Clause positivity_monotonicity;  // gamma > 0, gamma' <= 0
  Clause decay_to_zero;
  Clause limit_below_inv_eps;
  Clause poly_lower_bound;
  Clause subexponential;
  Clause exp_lower_bound;
  Clause convexity_strict;
  Clause convexity_above_half_n;
  Clause convexity_integer;
  Clause convexity_supremal;
};

AssumptionReport check_assumptions(const Motility& m, int n, double eps,
                                   double s_max = 1e6, int samples = 256);

enum class Regime {
  uniformly_bounded,
  global_existence_boundedness_open,
  blowup_possible,
  outside_theory,
};

const char* to_string(Regime r);

struct RegimeVerdict {
  Regime regime = Regime::outside_theory;
  std::string rule;  // which decision-table row fired
  std::vector<std::pair<std::string, double>> thresholds;
  std::string notes;
};

// Pure function of (n, eps, motility, mass).  Decision table, first hit wins:
//   2d slower-than-every-exponential decay        -> uniformly bounded
//   2d mass below 4*pi/chi for exp-rate-chi decay -> uniformly bounded
//   2d exponential motility, mass above 4*pi/chi  -> blow-up possible
//   nd (n>=3) eps=0: decay + convexity above n/2  -> uniformly bounded
//   nd (n>=3) eps=0: strict sqrt(n/2) convexity   -> existence, bound open
//   nd (n>=3) eps>0: decay + integer convexity    -> uniformly bounded
//   otherwise                                     -> outside known theory
RegimeVerdict classify_regime(int n, double eps, const Motility& m, double mass);

}  // namespace kslab
