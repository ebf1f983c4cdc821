#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "percoflow/errors.hpp"
#include "percoflow/lattice.hpp"

namespace percoflow {

// Edge capacities are fixed-point integers with 2^20 steps per unit, so that
// the max-flow = min-cut identity can be asserted exactly in tests.
using Cap = int64_t;
inline constexpr Cap kCapOne = Cap{1} << 20;

inline double cap_to_double(Cap c) { return static_cast<double>(c) / kCapOne; }

// Round-half-even quantization onto the fixed-point grid.
inline Cap cap_from_double(double x) {
  if (x < 0.0) throw ConfigError("capacities must be nonnegative");
  return static_cast<Cap>(std::nearbyint(x * static_cast<double>(kCapOne)));
}

namespace rng {

// SplitMix64 finalizer; the avalanche used by the counter-based generator.
inline uint64_t avalanche(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stateless per-counter word: the value depends only on (seed, counter), so
// sampling is reproducible under any query order or parallel schedule.
inline uint64_t counter_word(uint64_t seed, uint64_t counter) {
  uint64_t z = avalanche(seed ^ (kGolden * (counter + 1)));
  return avalanche(z + kGolden);
}

inline double uniform01(uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace rng

// Stable 64-bit mix of (master seed, mesh, trial index) used to key every
// trial of an experiment. Integer-only, identical on every platform;
// derive_seed(0, 0, 0) == 0x33FE8BD4F9C57863.
inline uint64_t derive_seed(uint64_t master, uint64_t n, uint64_t trial) {
  uint64_t s = rng::avalanche(master ^ rng::kGolden);
  s = rng::avalanche(s ^ (n * 0xBF58476D1CE4E5B9ULL));
  s = rng::avalanche(s ^ (trial * 0x94D049BB133111EBULL));
  return s;
}

// The common law of the i.i.d. edge capacities.
class CapacityLaw {
 public:
  enum class Kind { Constant, Bernoulli, Uniform, Exponential, DiscreteTable };

  static CapacityLaw constant(double c) {
    CapacityLaw law(Kind::Constant);
    law.a_ = c;
    law.validate();
    return law;
  }
  // P(t = hi) = p, P(t = 0) = 1 - p
  static CapacityLaw bernoulli(double p, double hi) {
    CapacityLaw law(Kind::Bernoulli);
    law.a_ = p;
    law.b_ = hi;
    law.validate();
    return law;
  }
  static CapacityLaw uniform(double a, double b) {
    CapacityLaw law(Kind::Uniform);
    law.a_ = a;
    law.b_ = b;
    law.validate();
    return law;
  }
  static CapacityLaw exponential(double rate) {
    CapacityLaw law(Kind::Exponential);
    law.a_ = rate;
    law.validate();
    return law;
  }
  static CapacityLaw discrete_table(std::vector<double> values,
                                    std::vector<double> probs) {
    CapacityLaw law(Kind::DiscreteTable);
    law.values_ = std::move(values);
    law.probs_ = std::move(probs);
    law.validate();
    return law;
  }

  Kind kind() const { return kind_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }

  // P(t = 0). Values below half a fixed-point step count as the atom, since
  // they are indistinguishable from 0 after quantization.
  double atom_at_zero() const {
    auto is_zero = [](double v) { return std::abs(v) * kCapOne < 0.5; };
    switch (kind_) {
      case Kind::Constant:
        return is_zero(a_) ? 1.0 : 0.0;
      case Kind::Bernoulli:
        return is_zero(b_) ? 1.0 : 1.0 - a_;
      case Kind::Uniform:
        return (a_ == b_ && is_zero(a_)) ? 1.0 : 0.0;
      case Kind::Exponential:
        return 0.0;
      case Kind::DiscreteTable: {
        double p = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
          if (is_zero(values_[i])) p += probs_[i];
        return p;
      }
    }
    return 0.0;
  }

  // Whether int e^{theta x} dLambda(x) is finite for some theta > 0. True
  // for every variant here (bounded support or exponential tail); recorded
  // in experiment metadata because the law of large numbers assumes it.
  bool has_exponential_moment() const {
    switch (kind_) {
      case Kind::Constant:
      case Kind::Bernoulli:
      case Kind::Uniform:
      case Kind::DiscreteTable:
        return true;  // bounded support
      case Kind::Exponential:
        return true;  // any theta < rate
    }
    return false;
  }

  // Inverse-CDF style map from one uniform variate to a capacity value.
  double sample_value(double u) const {
    switch (kind_) {
      case Kind::Constant:
        return a_;
      case Kind::Bernoulli:
        return u < a_ ? b_ : 0.0;
      case Kind::Uniform:
        return a_ + u * (b_ - a_);
      case Kind::Exponential:
        return -std::log1p(-u) / a_;
      case Kind::DiscreteTable: {
        double acc = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
          acc += probs_[i];
          if (u < acc) return values_[i];
        }
        return values_.back();
      }
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Constant:
        return "constant(" + std::to_string(a_) + ")";
      case Kind::Bernoulli:
        return "bernoulli(p=" + std::to_string(a_) + ",hi=" + std::to_string(b_) + ")";
      case Kind::Uniform:
        return "uniform(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
      case Kind::Exponential:
        return "exponential(" + std::to_string(a_) + ")";
      case Kind::DiscreteTable:
        return "discrete(" + std::to_string(values_.size()) + " atoms)";
    }
    return "?";
  }

 private:
  explicit CapacityLaw(Kind k) : kind_(k) {}

  void validate() const {
    switch (kind_) {
      case Kind::Constant:
        if (a_ < 0) throw ConfigError("constant capacity must be >= 0");
        break;
      case Kind::Bernoulli:
        if (a_ < 0 || a_ > 1) throw ConfigError("bernoulli p must be in [0,1]");
        if (b_ < 0) throw ConfigError("bernoulli hi must be >= 0");
        break;
      case Kind::Uniform:
        if (a_ < 0 || b_ < a_) throw ConfigError("uniform needs 0 <= a <= b");
        break;
      case Kind::Exponential:
        if (a_ <= 0) throw ConfigError("exponential rate must be > 0");
        break;
      case Kind::DiscreteTable: {
        if (values_.empty() || values_.size() != probs_.size())
          throw ConfigError("discrete table needs matching values/probs");
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
          if (values_[i] < 0) throw ConfigError("discrete values must be >= 0");
          if (probs_[i] < 0) throw ConfigError("probabilities must be >= 0");
          s += probs_[i];
        }
        if (std::abs(s - 1.0) > 1e-12)
          throw ConfigError("discrete probabilities must sum to 1");
        break;
      }
    }
  }

  Kind kind_;
  double a_ = 0.0, b_ = 0.0;
  std::vector<double> values_, probs_;
};

// One i.i.d. capacity draw per lattice edge, reproducible from (law, seed)
// and the canonical edge order.
class CapacityAssignment {
 public:
  CapacityAssignment(CapacityLaw law, uint64_t seed, std::vector<Cap> values)
      : law_(std::move(law)), seed_(seed), values_(std::move(values)) {}

  const CapacityLaw& law() const { return law_; }
  uint64_t seed() const { return seed_; }
  const std::vector<Cap>& values() const { return values_; }
  Cap value(std::size_t edge) const { return values_[edge]; }
  std::size_t size() const { return values_.size(); }

  Cap total() const {
    Cap s = 0;
    for (Cap c : values_) s += c;
    return s;
  }

 private:
  CapacityLaw law_;
  uint64_t seed_;
  std::vector<Cap> values_;
};

inline CapacityAssignment sample(const CapacityLaw& law, const Lattice& lat,
                                 uint64_t seed) {
  if (lat.edge_count() == 0) throw GeometryError("cannot sample an empty lattice");
  std::vector<Cap> values(lat.edge_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double u = rng::uniform01(rng::counter_word(seed, i));
    values[i] = cap_from_double(law.sample_value(u));
  }
  return CapacityAssignment(law, seed, std::move(values));
}

}  // namespace percoflow
