#include "tve/constitutive.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace tve {

ConstitutiveLaw ConstitutiveLaw::norton_hoff(double p, KappaParams kappa) {
  if (!(p >= 2.0)) throw ValidationError("Norton-Hoff exponent must satisfy p >= 2");
  if (!(kappa.width > 0.0)) throw ValidationError("kappa width must be positive");
  if (!(kappa.lower() > 0.0)) throw ValidationError("kappa(theta) must be bounded away from zero");
  ConstitutiveLaw law;
  law.kind_ = Kind::NortonHoff;
  law.p_ = p;
  law.kappa_ = kappa;
  law.name_ = "norton-hoff";
  return law;
}

ConstitutiveLaw ConstitutiveLaw::zero(double p) {
  ConstitutiveLaw law;
  law.kind_ = Kind::Zero;
  law.p_ = p;
  law.kappa_ = {0.0, 0.0, 0.0, 1.0};
  law.name_ = "zero";
  return law;
}

ConstitutiveLaw ConstitutiveLaw::custom(double p, Rule rule, std::string name) {
  if (!rule) throw ValidationError("custom constitutive law needs a rule");
  ConstitutiveLaw law;
  law.kind_ = Kind::Custom;
  law.p_ = p;
  law.rule_ = std::move(rule);
  law.name_ = std::move(name);
  return law;
}

Vec6 ConstitutiveLaw::evaluate(double theta, const Vec6& td) const {
  switch (kind_) {
    case Kind::Zero:
      return Vec6::Zero();
    case Kind::Custom:
      return rule_(theta, td);
    case Kind::NortonHoff:
      break;
  }
  const double k = kappa_(theta);
  if (p_ == 2.0) return k * td;
  const double n = td.norm();
  if (n == 0.0) return Vec6::Zero();
  return (k * std::pow(n, p_ - 2.0)) * td;
}

SymTensor eval_G(const ConstitutiveLaw& law, double theta, const SymTensor& td) {
  if (std::abs(td.trace()) > 1e-10 * (1.0 + td.norm()))
    throw ValidationError("flow rule argument must be traceless");
  return SymTensor::from_mandel(law.evaluate(theta, td.mandel()));
}

namespace {

class TracelessSampler {
public:
  TracelessSampler(std::uint64_t seed, double radius) : rng_(seed), radius_(radius) {}

  double temperature() { return radius_ * (2.0 * unit_(rng_) - 1.0); }

  Vec6 tensor() {
    Vec6 m;
    for (int c = 0; c < 6; ++c) m[c] = normal_(rng_);
    m = deviatoric_mandel(m);
    const double n = m.norm();
    if (n == 0.0) return Vec6::Zero();
    return (radius_ * unit_(rng_) / n) * m;
  }

private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  double radius_;
};

AssumptionWitness witness(double theta, const Vec6& t1, const Vec6& t2, double value) {
  return {theta, SymTensor::from_mandel(t1), SymTensor::from_mandel(t2), value};
}

}  // namespace

AssumptionReport check_assumption(const ConstitutiveLaw& law, std::uint64_t samples, double radius,
                                  std::uint64_t seed) {
  if (samples == 0) throw ValidationError("check_assumption needs at least one sample");
  if (!(radius > 0.0)) throw ValidationError("sampling radius must be positive");

  const double p = law.p();
  AssumptionReport rep;
  rep.samples = samples;
  rep.p = p;
  double worst_mono = std::numeric_limits<double>::infinity();
  double beta = std::numeric_limits<double>::infinity();
  double growth = 0.0;

  TracelessSampler sampler(seed, radius);
  auto record_single = [&](double theta, const Vec6& t, const Vec6& g) {
    const double n = t.norm();
    const double c = g.norm() / std::pow(1.0 + n, p - 1.0);
    if (c > growth) {
      growth = c;
      rep.worst_growth = witness(theta, t, t, c);
    }
    if (n > 1e-12) {
      const double b = g.dot(t) / std::pow(n, p);
      if (b < beta) {
        beta = b;
        rep.worst_coercivity = witness(theta, t, t, b);
      }
    }
  };

  for (std::uint64_t s = 0; s < samples; ++s) {
    const double theta = sampler.temperature();
    const Vec6 t1 = sampler.tensor();
    const Vec6 t2 = sampler.tensor();
    const Vec6 g1 = law.evaluate(theta, t1);
    const Vec6 g2 = law.evaluate(theta, t2);

    const double mono = (g1 - g2).dot(t1 - t2);
    const double slack = 1e-12 * std::pow(1.0 + t1.norm() + t2.norm(), 2.0 * p);
    if (mono < -slack) ++rep.violations;
    if (mono < worst_mono) {
      worst_mono = mono;
      rep.worst_monotonicity = witness(theta, t1, t2, mono);
    }
    record_single(theta, t1, g1);
    record_single(theta, t2, g2);
  }

  rep.growth_constant = growth;
  rep.coercivity_constant = std::isfinite(beta) ? beta : 0.0;
  rep.admissible = rep.violations == 0 && rep.coercivity_constant > 1e-12 && p >= 2.0;
  return rep;
}

std::string AssumptionReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "samples = " << samples << '\n';
  os << "p = " << p << '\n';
  os << "monotonicity_violations = " << violations << '\n';
  os << "growth_constant_C = " << growth_constant << '\n';
  os << "coercivity_constant_beta = " << coercivity_constant << '\n';
  os << "admissible = " << (admissible ? "true" : "false") << '\n';
  os << "worst_monotonicity_value = " << worst_monotonicity.value << '\n';
  os << "worst_monotonicity_theta = " << worst_monotonicity.theta << '\n';
  os << "worst_coercivity_value = " << worst_coercivity.value << '\n';
  os << "worst_coercivity_theta = " << worst_coercivity.theta << '\n';
  os << "worst_growth_value = " << worst_growth.value << '\n';
  os << "worst_growth_theta = " << worst_growth.theta << '\n';
  return os.str();
}

Truncation::Truncation(double level) : level_(level) {
  if (!(level > 0.0)) throw ValidationError("truncation level must be positive");
}

}  // namespace tve
