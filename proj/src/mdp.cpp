#include "risq/mdp.hpp"

#include "risq/policy.hpp"

#include <cmath>
#include <string>

namespace risq {

namespace {

constexpr scalar_t kProbTol = 1e-12;

void check_prob_row(const Eigen::Ref<const vector_t>& row, const std::string& what) {
  if ((row.array() < 0).any()) throw ConfigError(what + ": negative probability");
  if (std::abs(row.sum() - 1.0) > kProbTol) throw ConfigError(what + ": probabilities do not sum to 1");
}

}  // namespace

void MdpSpec::validate() const {
  if (num_states < 1) throw ConfigError("mdp: num_states must be positive");
  if (num_actions < 1) throw ConfigError("mdp: num_actions must be positive");
  if (horizon < 1) throw ConfigError("mdp: horizon must be at least 1");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("mdp: gamma must be in [0, 1]");
  if (transition.rows() != num_states * num_actions || transition.cols() != num_states) {
    throw ConfigError("mdp: transition must be (S*A) x S");
  }
  if (initial_dist.size() != num_states) throw ConfigError("mdp: initial distribution has wrong length");
  if (static_cast<index_t>(cost.size()) != num_states * num_actions * num_states) {
    throw ConfigError("mdp: cost table must have S*A*S entries");
  }
  check_prob_row(initial_dist, "mdp initial distribution");
  for (index_t r = 0; r < transition.rows(); ++r) {
    check_prob_row(transition.row(r).transpose(), "mdp transition row " + std::to_string(r));
  }
  for (const DiscreteDist& d : cost) {
    d.validate();
    if (std::abs(d.probs().sum() - 1.0) > kProbTol) {
      throw ConfigError("mdp: cost distribution probabilities do not sum to 1");
    }
  }
}

MdpSpec make_mdp(index_t num_states, index_t num_actions, index_t horizon, scalar_t gamma) {
  MdpSpec spec;
  spec.num_states = num_states;
  spec.num_actions = num_actions;
  spec.horizon = horizon;
  spec.gamma = gamma;
  spec.transition =
      matrix_t::Constant(num_states * num_actions, num_states, 1.0 / static_cast<scalar_t>(num_states));
  spec.cost.assign(static_cast<std::size_t>(num_states * num_actions * num_states),
                   DiscreteDist::point_mass(0.0));
  spec.initial_dist = vector_t::Constant(num_states, 1.0 / static_cast<scalar_t>(num_states));
  return spec;
}

scalar_t discounted_cost(const Trajectory& traj, scalar_t gamma) {
  scalar_t total = 0;
  scalar_t discount = 1;
  for (const TrajectoryStep& step : traj.steps) {
    total += discount * step.cost;
    discount *= gamma;
  }
  return total;
}

namespace {

void sample_trajectory_into(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                            RandomStream& rng, Trajectory& traj) {
  thread_local vector_t probs;
  traj.steps.clear();
  index_t s = rng.categorical(spec.initial_dist);
  for (index_t t = 0; t < spec.horizon; ++t) {
    action_probs_into(policy, theta, s, probs);
    const index_t a = rng.categorical(probs);
    const index_t s2 = rng.categorical(spec.transition.row(spec.sa_row(s, a)));
    const scalar_t c = spec.cost_dist(s, a, s2).sample(rng);
    traj.steps.push_back({s, a, c});
    s = s2;
  }
  traj.terminal_state = s;
}

}  // namespace

Trajectory sample_trajectory(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                             RandomStream& rng) {
  Trajectory traj;
  traj.steps.reserve(spec.horizon);
  sample_trajectory_into(spec, policy, theta, rng, traj);
  return traj;
}

void sample_batch_into(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta, index_t m,
                       const RandomStream& rng, std::vector<Trajectory>& out) {
  if (m < 1) throw ArgumentError("sample_batch: m must be at least 1");
  out.resize(m);
  for (index_t i = 0; i < m; ++i) {
    RandomStream sub = rng.substream(static_cast<std::uint64_t>(i));
    sample_trajectory_into(spec, policy, theta, sub, out[static_cast<std::size_t>(i)]);
  }
}

std::vector<Trajectory> sample_batch(const MdpSpec& spec, const PolicySpec& policy, const vector_t& theta,
                                     index_t m, const RandomStream& rng) {
  std::vector<Trajectory> batch;
  sample_batch_into(spec, policy, theta, m, rng, batch);
  return batch;
}

namespace {

struct Enumerator {
  const MdpSpec& spec;
  const PolicySpec& policy;
  const vector_t& theta;
  index_t cap;
  std::vector<WeightedTrajectory> out;
  std::vector<TrajectoryStep> steps;
  std::vector<vector_t> probs_by_state;

  void emit(index_t terminal, scalar_t prob) {
    if (static_cast<index_t>(out.size()) >= cap) {
      throw CapacityError("trajectory enumeration exceeded cap of " + std::to_string(cap) +
                          " weighted trajectories");
    }
    out.push_back({Trajectory{steps, terminal}, prob});
  }

  void recurse(index_t t, index_t s, scalar_t prob) {
    if (t == spec.horizon) {
      emit(s, prob);
      return;
    }
    const vector_t& pi = probs_by_state[s];
    for (index_t a = 0; a < spec.num_actions; ++a) {
      if (pi[a] <= 0) continue;
      const auto row = spec.transition.row(spec.sa_row(s, a));
      for (index_t s2 = 0; s2 < spec.num_states; ++s2) {
        if (row[s2] <= 0) continue;
        const DiscreteDist& cd = spec.cost_dist(s, a, s2);
        for (index_t k = 0; k < cd.size(); ++k) {
          steps.push_back({s, a, cd.value(k)});
          recurse(t + 1, s2, prob * pi[a] * row[s2] * cd.prob(k));
          steps.pop_back();
        }
      }
    }
  }
};

}  // namespace

std::vector<WeightedTrajectory> enumerate_trajectories(const MdpSpec& spec, const PolicySpec& policy,
                                                       const vector_t& theta, index_t cap) {
  Enumerator e{spec, policy, theta, cap, {}, {}, {}};
  e.steps.reserve(spec.horizon);
  e.probs_by_state.reserve(spec.num_states);
  for (index_t s = 0; s < spec.num_states; ++s) {
    e.probs_by_state.push_back(action_probs(policy, theta, s));
  }
  for (index_t s0 = 0; s0 < spec.num_states; ++s0) {
    if (spec.initial_dist[s0] <= 0) continue;
    e.recurse(0, s0, spec.initial_dist[s0]);
  }
  return std::move(e.out);
}

}  // namespace risq
