#include "risq/envs.hpp"
#include "risq/errors.hpp"
#include "risq/grad.hpp"
#include "risq/io.hpp"
#include "risq/oracle.hpp"
#include "risq/rapg.hpp"
#include "risq/risk.hpp"
#include "risq/risk_spec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace risq;

namespace {

json to_json(const vector_t& v) {
  json arr = json::array();
  for (index_t i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// Output directories are append-never: a run either writes a fresh
// directory or fails.
fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(out);
  if (fs::exists(dir)) throw IoError("output directory '" + out + "' already exists");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out + "': " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void emit(const json& record, const std::optional<fs::path>& dir, const std::string& filename) {
  const std::string text = record.dump(2) + "\n";
  std::cout << text;
  if (dir) write_text(*dir / filename, text);
}

struct MdpInputs {
  MdpSpec mdp;
  PolicySpec policy;
};

MdpInputs load_mdp_inputs(const std::string& path, bool reward_mode) {
  MdpFile file = load_mdp_file(path);
  if (reward_mode) file.mdp = negate_costs(file.mdp);
  MdpInputs in{std::move(file.mdp), {}};
  in.policy = file.features ? feature_policy(in.mdp.num_states, in.mdp.num_actions, *file.features)
                            : tabular_policy(in.mdp.num_states, in.mdp.num_actions);
  return in;
}

vector_t draw_theta(index_t dims, std::uint64_t seed, scalar_t scale) {
  RandomStream rng = RandomStream(seed).substream(0xA11CE);
  vector_t theta(dims);
  for (index_t i = 0; i < dims; ++i) theta[i] = scale * (2 * rng.uniform() - 1);
  return theta;
}

int run_estimate(const std::string& samples_path, const std::string& dist_path,
                 const std::string& risk_text, scalar_t tol, std::uint64_t seed,
                 const std::optional<fs::path>& dir) {
  const RiskSpec risk = parse_risk_spec(risk_text);
  json record{{"subcommand", "estimate"}, {"risk", risk.text}, {"seed", seed}, {"tolerance", tol}};

  if (!samples_path.empty()) {
    const vector_t samples = load_sample_file(samples_path);
    record["input"] = samples_path;
    record["n_samples"] = samples.size();
    scalar_t estimate = 0;
    scalar_t residual = 0;
    const std::span<const scalar_t> view(samples.data(), static_cast<std::size_t>(samples.size()));
    switch (risk.kind) {
      case RiskKind::expectile: {
        estimate = empirical_expectile(view, risk.nu, tol);
        for (scalar_t x : view) {
          const scalar_t d = x - estimate;
          residual += (d > 0 ? risk.nu * d : (1 - risk.nu) * d) / static_cast<scalar_t>(samples.size());
        }
        break;
      }
      case RiskKind::ubsr: {
        estimate = empirical_ubsr(view, risk.loss, risk.lambda, tol);
        for (scalar_t x : view) {
          residual += risk.loss.eval(x - estimate) / static_cast<scalar_t>(samples.size());
        }
        residual -= risk.lambda;
        break;
      }
      case RiskKind::oce: {
        const OceResult r = empirical_oce(view, risk.loss, tol);
        estimate = r.oce;
        record["kstar"] = r.kstar;
        for (scalar_t x : view) {
          residual += risk.loss.deriv(x - r.kstar) / static_cast<scalar_t>(samples.size());
        }
        residual -= 1.0;
        break;
      }
    }
    record["estimate"] = estimate;
    record["residual"] = residual;
  } else {
    const DiscreteDist dist = load_dist_file(dist_path);
    record["input"] = dist_path;
    record["n_atoms"] = dist.size();
    scalar_t estimate = 0;
    scalar_t residual = 0;
    const auto weighted_mean = [&](auto&& fn) {
      scalar_t acc = 0;
      for (index_t i = 0; i < dist.size(); ++i) acc += dist.prob(i) * fn(dist.value(i));
      return acc;
    };
    switch (risk.kind) {
      case RiskKind::expectile: {
        estimate = exact_expectile(dist, risk.nu, tol);
        residual = weighted_mean([&](scalar_t x) {
          const scalar_t d = x - estimate;
          return d > 0 ? risk.nu * d : (1 - risk.nu) * d;
        });
        break;
      }
      case RiskKind::ubsr: {
        estimate = exact_ubsr(dist, risk.loss, risk.lambda, tol);
        residual = weighted_mean([&](scalar_t x) { return risk.loss.eval(x - estimate); }) - risk.lambda;
        break;
      }
      case RiskKind::oce: {
        const OceResult r = exact_oce(dist, risk.loss, tol);
        estimate = r.oce;
        record["kstar"] = r.kstar;
        residual = weighted_mean([&](scalar_t x) { return risk.loss.deriv(x - r.kstar); }) - 1.0;
        break;
      }
    }
    record["estimate"] = estimate;
    record["residual"] = residual;
  }
  emit(record, dir, "estimate.json");
  return 0;
}

int run_grad_check(const std::string& mdp_path, const std::string& risk_text, std::uint64_t seed,
                   index_t m, index_t reps, scalar_t theta_scale, scalar_t tol, bool reward_mode,
                   const std::optional<fs::path>& dir) {
  const RiskSpec risk = parse_risk_spec(risk_text);
  const MdpInputs in = load_mdp_inputs(mdp_path, reward_mode);
  const vector_t theta = draw_theta(in.policy.dims(), seed, theta_scale);

  const vector_t exact = exact_risk_gradient(in.mdp, in.policy, theta, risk, tol);
  const vector_t fd = finite_difference_gradient(
      [&](const vector_t& t) { return exact_risk_value(in.mdp, in.policy, t, risk, 1e-12); }, theta);

  const RandomStream root(seed);
  vector_t sum = vector_t::Zero(theta.size());
  vector_t sum_sq = vector_t::Zero(theta.size());
  std::vector<Trajectory> batch, hat;
  for (index_t r = 0; r < reps; ++r) {
    sample_batch_into(in.mdp, in.policy, theta, m, root.substream(2 * r), batch);
    if (risk.double_sampled()) {
      sample_batch_into(in.mdp, in.policy, theta, m, root.substream(2 * r + 1), hat);
    }
    const vector_t g = risk_policy_gradient(in.mdp, in.policy, theta, risk, batch, hat, tol).gradient;
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  const vector_t mean = sum / static_cast<scalar_t>(reps);
  const vector_t variance =
      (sum_sq / static_cast<scalar_t>(reps) - mean.cwiseProduct(mean)).cwiseMax(0.0);
  const vector_t stderr_mean = (variance / static_cast<scalar_t>(reps)).cwiseSqrt();

  json record{{"subcommand", "grad-check"},
              {"risk", risk.text},
              {"seed", seed},
              {"m", m},
              {"replications", reps},
              {"theta", to_json(theta)},
              {"exact_gradient", to_json(exact)},
              {"fd_gradient", to_json(fd)},
              {"estimator_mean", to_json(mean)},
              {"estimator_stderr", to_json(stderr_mean)},
              {"max_abs_dev_exact_vs_fd", (exact - fd).lpNorm<Eigen::Infinity>()},
              {"max_abs_dev_mean_vs_exact", (mean - exact).lpNorm<Eigen::Infinity>()}};
  scalar_t worst_sigmas = 0;
  for (index_t i = 0; i < exact.size(); ++i) {
    if (stderr_mean[i] > 0) {
      worst_sigmas = std::max(worst_sigmas, std::abs(mean[i] - exact[i]) / stderr_mean[i]);
    }
  }
  record["max_dev_mean_vs_exact_sigmas"] = worst_sigmas;
  emit(record, dir, "grad_check.json");
  return 0;
}

int run_mse_bench(const std::string& mdp_path, const std::string& dist_path,
                  const std::string& risk_text, const std::vector<index_t>& m_list, index_t reps,
                  std::uint64_t seed, scalar_t tol, bool reward_mode, const fs::path& dir) {
  const RiskSpec risk = parse_risk_spec(risk_text);
  const RandomStream root(seed);
  MseCurve curve;

  if (!mdp_path.empty()) {
    const MdpInputs in = load_mdp_inputs(mdp_path, reward_mode);
    const vector_t theta = vector_t::Zero(in.policy.dims());
    const vector_t truth = exact_risk_gradient(in.mdp, in.policy, theta, risk, tol);
    const VectorEstimator estimator = [&](index_t m, RandomStream& rng) {
      thread_local std::vector<Trajectory> batch, hat;
      sample_batch_into(in.mdp, in.policy, theta, m, rng.substream(0), batch);
      if (risk.double_sampled()) sample_batch_into(in.mdp, in.policy, theta, m, rng.substream(1), hat);
      return risk_policy_gradient(in.mdp, in.policy, theta, risk, batch, hat, tol).gradient;
    };
    curve = mse_curve(estimator, truth, m_list, reps, root, "gradient:" + risk.text);
  } else {
    const DiscreteDist dist = load_dist_file(dist_path);
    scalar_t truth = 0;
    switch (risk.kind) {
      case RiskKind::expectile:
        truth = exact_expectile(dist, risk.nu, tol);
        break;
      case RiskKind::ubsr:
        truth = exact_ubsr(dist, risk.loss, risk.lambda, tol);
        break;
      case RiskKind::oce:
        truth = exact_oce(dist, risk.loss, tol).oce;
        break;
    }
    const ScalarEstimator estimator = [&](index_t m, RandomStream& rng) {
      vector_t samples(m);
      for (index_t i = 0; i < m; ++i) samples[i] = dist.sample(rng);
      const std::span<const scalar_t> view(samples.data(), static_cast<std::size_t>(m));
      switch (risk.kind) {
        case RiskKind::expectile:
          return empirical_expectile(view, risk.nu, tol);
        case RiskKind::ubsr:
          return empirical_ubsr(view, risk.loss, risk.lambda, tol);
        case RiskKind::oce:
          return empirical_oce(view, risk.loss, tol).oce;
      }
      throw ArgumentError("unknown risk kind");
    };
    curve = mse_curve(estimator, truth, m_list, reps, root, "value:" + risk.text);
  }

  std::string csv = "m,mse,replications\n";
  for (const MsePoint& p : curve.points) {
    csv += std::to_string(p.m) + "," + std::to_string(p.mse) + "," + std::to_string(p.replications) + "\n";
  }
  write_text(dir / "mse.csv", csv);
  json record{{"subcommand", "mse-bench"}, {"risk", risk.text},   {"target", curve.target},
              {"seed", seed},              {"slope", curve.slope}, {"flat_zero", curve.flat_zero},
              {"replications", reps}};
  record["points"] = json::array();
  for (const MsePoint& p : curve.points) {
    record["points"].push_back({{"m", p.m}, {"mse", p.mse}});
  }
  emit(record, dir, "summary.json");
  return 0;
}

json run_record_to_json(const RunRecord& record) {
  json out{{"seed", record.seed},
           {"selected_index", record.selected_index},
           {"total_trajectories", record.total_trajectories},
           {"aborted", record.aborted},
           {"num_iterations", record.config.num_iterations},
           {"risk", record.config.risk.text},
           {"step_size", record.config.step_at(0)},
           {"batch_size", record.config.batch_at(0)},
           {"wall_seconds", record.wall_seconds}};
  if (record.aborted) {
    out["abort_reason"] = record.abort_reason;
    out["abort_iteration"] = record.abort_iteration;
  }
  out["theta_initial"] = to_json(record.iterates.front());
  out["theta_final"] = to_json(record.iterates.back());
  out["theta_selected"] = record.selected_index >= 1 ? to_json(selected_iterate(record)) : json();
  out["iterates"] = json::array();
  for (const vector_t& theta : record.iterates) out["iterates"].push_back(to_json(theta));
  return out;
}

int run_train(const std::string& mdp_path, const std::string& risk_text, index_t n, std::uint64_t seed,
              std::optional<scalar_t> eta, std::optional<index_t> m,
              std::optional<std::pair<scalar_t, scalar_t>> box, scalar_t tol, bool reward_mode,
              const fs::path& dir) {
  RapgConfig config;
  config.num_iterations = n;
  config.seed = seed;
  config.risk = parse_risk_spec(risk_text);
  config.root_tol = tol;
  if (eta) config.step_size = *eta;
  if (m) config.batch_size = *m;
  if (box) config.projection_box = {{box->first, box->second}};

  const MdpInputs in = load_mdp_inputs(mdp_path, reward_mode);
  const vector_t theta0 = vector_t::Zero(in.policy.dims());
  const RunRecord record = run_rapg(in.mdp, in.policy, theta0, config);

  std::string csv = "iteration,risk_estimate,grad_norm_sq\n";
  for (std::size_t i = 0; i < record.grad_norm_sq.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(record.risk_estimates[i]) + "," +
           std::to_string(record.grad_norm_sq[i]) + "\n";
  }
  write_text(dir / "history.csv", csv);

  json out = run_record_to_json(record);
  out["subcommand"] = "train";
  emit(out, dir, "run_record.json");
  return record.aborted ? 11 : 0;
}

int run_report(const std::string& mdp_path, const std::string& risk_text, index_t num_seeds,
               const std::vector<index_t>& n_grid, std::uint64_t seed, scalar_t tol, bool reward_mode,
               const fs::path& dir) {
  RapgConfig base;
  base.seed = seed;
  base.risk = parse_risk_spec(risk_text);
  base.root_tol = tol;
  const MdpInputs in = load_mdp_inputs(mdp_path, reward_mode);
  const vector_t theta0 = vector_t::Zero(in.policy.dims());
  const StationarityReport report = stationarity_report(in.mdp, in.policy, theta0, base, num_seeds, n_grid);

  std::string csv = "num_iterations,mean_grad_norm_sq,standard_error\n";
  json points = json::array();
  for (const StationarityPoint& p : report.points) {
    csv += std::to_string(p.num_iterations) + "," + std::to_string(p.mean_grad_norm_sq) + "," +
           std::to_string(p.standard_error) + "\n";
    json entry{{"num_iterations", p.num_iterations},
               {"mean_grad_norm_sq", p.mean_grad_norm_sq},
               {"standard_error", p.standard_error}};
    entry["per_seed"] = p.per_seed;
    points.push_back(std::move(entry));
  }
  write_text(dir / "report.csv", csv);
  json record{{"subcommand", "report"},
              {"risk", base.risk.text},
              {"seed", seed},
              {"num_seeds", report.num_seeds},
              {"fitted_decay_slope", report.fitted_decay_slope},
              {"points", std::move(points)}};
  emit(record, dir, "report.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risq: risk-sensitive policy gradient toolkit"};
  app.require_subcommand(1);

  std::string samples_path, dist_path, mdp_path, risk_text, out_path;
  std::uint64_t seed = 0;
  scalar_t tol = kDefaultRootTol;
  bool reward_mode = false;
  index_t m = 1000, reps = 1000, n_iterations = 1000, num_seeds = 20;
  scalar_t theta_scale = 1.0;
  std::vector<index_t> m_list{100, 1000, 10000};
  std::vector<index_t> n_grid{100, 400, 1600};
  std::optional<scalar_t> eta;
  std::optional<index_t> batch_override;
  std::vector<scalar_t> box_values;

  auto* estimate = app.add_subcommand("estimate", "risk estimate from a sample or distribution file");
  auto* est_samples = estimate->add_option("--samples", samples_path, "sample file, one value per line");
  auto* est_dist = estimate->add_option("--dist", dist_path, "distribution file, 'value prob' per line");
  estimate->add_option("--risk", risk_text, "risk spec, e.g. expectile:nu=0.65")->required();
  estimate->add_option("--seed", seed, "run seed (required everywhere; estimate is deterministic)")
      ->required();
  estimate->add_option("--tol", tol, "root tolerance");
  estimate->add_option("--out", out_path, "fresh output directory");
  est_samples->excludes(est_dist);

  auto* grad = app.add_subcommand("grad-check", "exact vs finite-difference vs sampled gradients");
  grad->add_option("--mdp", mdp_path, "MDP file")->required();
  grad->add_option("--risk", risk_text, "risk spec")->required();
  grad->add_option("--seed", seed, "seed for the theta draw and sampling")->required();
  grad->add_option("--m", m, "batch size per estimate");
  grad->add_option("--reps", reps, "number of replications");
  grad->add_option("--theta-scale", theta_scale, "theta drawn uniformly from [-s, s]^d");
  grad->add_option("--tol", tol, "root tolerance");
  grad->add_option("--out", out_path, "fresh output directory");
  grad->add_flag("--reward-mode", reward_mode, "negate costs on ingestion");

  auto* bench = app.add_subcommand("mse-bench", "MSE-vs-m curve against the exact oracle");
  auto* bench_mdp = bench->add_option("--mdp", mdp_path, "MDP file (gradient estimator benchmark)");
  auto* bench_dist = bench->add_option("--dist", dist_path, "distribution file (value estimator benchmark)");
  bench->add_option("--risk", risk_text, "risk spec")->required();
  bench->add_option("--m-list", m_list, "batch sizes");
  bench->add_option("--reps", reps, "replications per batch size");
  bench->add_option("--seed", seed, "seed")->required();
  bench->add_option("--tol", tol, "root tolerance");
  bench->add_option("--out", out_path, "fresh output directory")->required();
  bench->add_flag("--reward-mode", reward_mode, "negate costs on ingestion");
  bench_mdp->excludes(bench_dist);

  auto* train = app.add_subcommand("train", "run the risk-aware policy gradient algorithm");
  train->add_option("--mdp", mdp_path, "MDP file")->required();
  train->add_option("--risk", risk_text, "risk spec")->required();
  train->add_option("-N,--iterations", n_iterations, "number of iterations")->required();
  train->add_option("--seed", seed, "run seed")->required();
  train->add_option("--eta", eta, "constant step size (default 1/sqrt(N))");
  train->add_option("--m", batch_override, "constant batch size (default ceil(sqrt(N)))");
  train->add_option("--box", box_values, "projection box lo hi")->expected(2);
  train->add_option("--tol", tol, "root tolerance");
  train->add_option("--out", out_path, "fresh output directory")->required();
  train->add_flag("--reward-mode", reward_mode, "negate costs on ingestion");

  auto* report = app.add_subcommand("report", "multi-seed stationarity study over an N grid");
  report->add_option("--mdp", mdp_path, "MDP file")->required();
  report->add_option("--risk", risk_text, "risk spec")->required();
  report->add_option("--seeds", num_seeds, "seeds per N");
  report->add_option("--n-grid", n_grid, "iteration budgets");
  report->add_option("--seed", seed, "base seed")->required();
  report->add_option("--tol", tol, "root tolerance");
  report->add_option("--out", out_path, "fresh output directory")->required();
  report->add_flag("--reward-mode", reward_mode, "negate costs on ingestion");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<fs::path> maybe_dir;
    if (!out_path.empty()) maybe_dir = prepare_out_dir(out_path);

    if (estimate->parsed()) {
      if (samples_path.empty() && dist_path.empty()) {
        throw ArgumentError("estimate: provide --samples or --dist");
      }
      return run_estimate(samples_path, dist_path, risk_text, tol, seed, maybe_dir);
    }
    if (grad->parsed()) {
      return run_grad_check(mdp_path, risk_text, seed, m, reps, theta_scale, tol, reward_mode, maybe_dir);
    }
    if (bench->parsed()) {
      if (mdp_path.empty() && dist_path.empty()) {
        throw ArgumentError("mse-bench: provide --mdp or --dist");
      }
      return run_mse_bench(mdp_path, dist_path, risk_text, m_list, reps, seed, tol, reward_mode,
                           *maybe_dir);
    }
    if (train->parsed()) {
      std::optional<std::pair<scalar_t, scalar_t>> box;
      if (!box_values.empty()) box = {box_values[0], box_values[1]};
      return run_train(mdp_path, risk_text, n_iterations, seed, eta, batch_override, box, tol,
                       reward_mode, *maybe_dir);
    }
    if (report->parsed()) {
      return run_report(mdp_path, risk_text, num_seeds, n_grid, seed, tol, reward_mode, *maybe_dir);
    }
  } catch (const Error& e) {
    const json err{{"error", true}, {"message", e.what()}, {"exit_code", e.code()}};
    std::cerr << err.dump() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    const json err{{"error", true}, {"message", e.what()}, {"exit_code", 70}};
    std::cerr << err.dump() << "\n";
    return 70;
  }
  return 0;
}
