#pragma once

#include "risq/errors.hpp"
#include "risq/random.hpp"
#include "risq/types.hpp"

#include <initializer_list>
#include <utility>

namespace risq {

/// Finite-support distribution over real values: parallel vectors of atom
/// values and probabilities. Probabilities must be positive and sum to 1
/// within 1e-9; values must be finite.
class DiscreteDist {
 public:
  DiscreteDist() = default;
  DiscreteDist(vector_t values, vector_t probs) : values_(std::move(values)), probs_(std::move(probs)) {
    validate();
  }
  DiscreteDist(std::initializer_list<std::pair<scalar_t, scalar_t>> atoms) {
    values_.resize(static_cast<index_t>(atoms.size()));
    probs_.resize(static_cast<index_t>(atoms.size()));
    index_t i = 0;
    for (const auto& [v, p] : atoms) {
      values_[i] = v;
      probs_[i] = p;
      ++i;
    }
    validate();
  }

  static DiscreteDist point_mass(scalar_t value) {
    return DiscreteDist{vector_t::Constant(1, value), vector_t::Constant(1, 1.0)};
  }

  index_t size() const { return values_.size(); }
  const vector_t& values() const { return values_; }
  const vector_t& probs() const { return probs_; }
  scalar_t value(index_t i) const { return values_[i]; }
  scalar_t prob(index_t i) const { return probs_[i]; }

  scalar_t mean() const { return values_.dot(probs_); }
  scalar_t variance() const {
    const scalar_t mu = mean();
    return (values_.array() - mu).square().matrix().dot(probs_);
  }
  scalar_t min_value() const { return values_.minCoeff(); }
  scalar_t max_value() const { return values_.maxCoeff(); }

  scalar_t sample(RandomStream& rng) const { return values_[rng.categorical(probs_)]; }

  void validate() const {
    if (values_.size() == 0) throw ConfigError("DiscreteDist: empty support");
    if (values_.size() != probs_.size()) throw ConfigError("DiscreteDist: values/probs size mismatch");
    if (!values_.allFinite()) throw ConfigError("DiscreteDist: non-finite atom value");
    if ((probs_.array() <= 0).any()) throw ConfigError("DiscreteDist: non-positive probability");
    if (std::abs(probs_.sum() - 1.0) > 1e-9) throw ConfigError("DiscreteDist: probabilities do not sum to 1");
  }

 private:
  vector_t values_;
  vector_t probs_;
};

}  // namespace risq
