#pragma once

#include "risq/discrete_dist.hpp"
#include "risq/mdp.hpp"
#include "risq/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace risq {

/// An MDP file: the process itself plus an optional per-(s, a) feature map
/// for feature-softmax policies.
struct MdpFile {
  MdpSpec mdp;
  std::optional<matrix_t> features;
};

/// Parse the line-oriented MDP format:
///   states N / actions N / horizon T / gamma G
///   initial p0 p1 ...
///   transition s a : p0 p1 ...
///   cost s a s2 : value prob value prob ...
///   feature s a : x0 x1 ...
/// '#' starts a comment. Missing cost rows default to a point mass at 0;
/// feature rows are all-or-none.
MdpFile parse_mdp_file(std::istream& in);
MdpFile load_mdp_file(const std::string& path);

void write_mdp_file(std::ostream& out, const MdpSpec& spec, const matrix_t* features = nullptr);
void save_mdp_file(const std::string& path, const MdpSpec& spec, const matrix_t* features = nullptr);

/// Negated-cost copy (reward-style inputs are optimized by negating).
MdpSpec negate_costs(const MdpSpec& spec);

/// One real per line; '#' comments and blank lines ignored.
vector_t parse_samples(std::istream& in);
vector_t load_sample_file(const std::string& path);

/// One "value probability" pair per line; '#' comments ignored.
DiscreteDist parse_dist(std::istream& in);
DiscreteDist load_dist_file(const std::string& path);

/// CSV rows (t, s, a, cost), with a header.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace risq
