#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "tve/tensor.hpp"

namespace tve {

/// Temperature modulation kappa(theta) = base + amplitude / (1 + ((theta - center)/width)^2).
struct KappaParams {
  double base = 1.0;
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;

  double operator()(double theta) const {
    const double s = (theta - center) / width;
    return base + amplitude / (1.0 + s * s);
  }
  /// Infimum over all temperatures.
  double lower() const { return amplitude >= 0.0 ? base : base + amplitude; }
  /// Supremum over all temperatures.
  double upper() const { return amplitude >= 0.0 ? base + amplitude : base; }

  bool operator==(const KappaParams&) const = default;
};

/**
 * Flow rule eps^p_t = G(theta, T^d).
 *
 * The built-in Norton-Hoff family is G = kappa(theta) |T^d|^{p-2} T^d. Custom
 * rules are accepted through a callable; their admissibility is only ever
 * established by check_assumption.
 */
class ConstitutiveLaw {
public:
  enum class Kind { NortonHoff, Zero, Custom };
  using Rule = std::function<Vec6(double theta, const Vec6& td)>;

  static ConstitutiveLaw norton_hoff(double p, KappaParams kappa = {});
  static ConstitutiveLaw zero(double p = 2.0);
  static ConstitutiveLaw custom(double p, Rule rule, std::string name = "custom");

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const KappaParams& kappa() const { return kappa_; }
  const std::string& name() const { return name_; }

  /// Fast path on Mandel coordinates; td is assumed traceless.
  Vec6 evaluate(double theta, const Vec6& td) const;

private:
  ConstitutiveLaw() = default;

  Kind kind_ = Kind::NortonHoff;
  double p_ = 2.0;
  KappaParams kappa_{};
  Rule rule_;
  std::string name_;
};

/// G(theta, T^d). Rejects inputs whose trace exceeds 1e-10 (1 + |T^d|).
SymTensor eval_G(const ConstitutiveLaw& law, double theta, const SymTensor& td);

struct AssumptionWitness {
  double theta = 0.0;
  SymTensor t1;
  SymTensor t2;
  double value = 0.0;
};

/// Sampled evidence for monotonicity, growth and coercivity of a flow rule.
struct AssumptionReport {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double growth_constant = 0.0;      // estimated C
  double coercivity_constant = 0.0;  // estimated beta
  double p = 0.0;
  bool admissible = false;
  AssumptionWitness worst_monotonicity;  // most negative (G1-G2):(T1-T2)
  AssumptionWitness worst_coercivity;    // sample attaining the beta estimate
  AssumptionWitness worst_growth;        // sample attaining the C estimate

  /// Flat "key = value" lines.
  std::string to_text() const;
};

/**
 * Draws (theta, T1^d, T2^d) with |theta| <= radius and |T^d| <= radius and
 * estimates the constants of the monotonicity/growth/coercivity conditions.
 * Deterministic for a fixed seed.
 */
AssumptionReport check_assumption(const ConstitutiveLaw& law, std::uint64_t samples, double radius,
                                  std::uint64_t seed);

/// Scalar clamp to [-k, k].
class Truncation {
public:
  explicit Truncation(double level);
  double level() const { return level_; }
  double operator()(double x) const { return x > level_ ? level_ : (x < -level_ ? -level_ : x); }

private:
  double level_;
};

inline double truncate(const Truncation& tr, double x) { return tr(x); }

}  // namespace tve
