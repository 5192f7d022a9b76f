#include "risq/io.hpp"

#include "risq/errors.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <vector>

namespace risq {

namespace {

std::string strip_comment(const std::string& line) {
  const std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

[[noreturn]] void fail(index_t line_no, const std::string& what) {
  throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

scalar_t to_number(const std::string& tok, index_t line_no) {
  try {
    std::size_t used = 0;
    const scalar_t v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(line_no, "expected a number, got '" + tok + "'");
  }
}

index_t to_index(const std::string& tok, index_t line_no) {
  const scalar_t v = to_number(tok, line_no);
  const auto i = static_cast<index_t>(v);
  if (static_cast<scalar_t>(i) != v) fail(line_no, "expected an integer, got '" + tok + "'");
  return i;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string tok;
  while (is >> tok) toks.push_back(tok);
  return toks;
}

struct PendingRow {
  index_t line_no;
  std::vector<index_t> indices;  // before ':'
  std::vector<scalar_t> values;  // after ':'
};

}  // namespace

MdpFile parse_mdp_file(std::istream& in) {
  std::optional<index_t> states, actions, horizon;
  std::optional<scalar_t> gamma;
  std::optional<std::pair<index_t, std::vector<scalar_t>>> initial;
  std::vector<PendingRow> transitions, costs, features;

  std::string raw;
  index_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::vector<std::string> toks = tokenize(strip_comment(raw));
    if (toks.empty()) continue;
    const std::string& key = toks.front();

    if (key == "states" || key == "actions" || key == "horizon") {
      if (toks.size() != 2) fail(line_no, key + " takes one value");
      const index_t v = to_index(toks[1], line_no);
      auto& slot = key == "states" ? states : key == "actions" ? actions : horizon;
      if (slot) fail(line_no, "duplicate " + key);
      slot = v;
    } else if (key == "gamma") {
      if (toks.size() != 2) fail(line_no, "gamma takes one value");
      if (gamma) fail(line_no, "duplicate gamma");
      gamma = to_number(toks[1], line_no);
    } else if (key == "initial") {
      if (initial) fail(line_no, "duplicate initial");
      std::vector<scalar_t> probs;
      for (std::size_t i = 1; i < toks.size(); ++i) probs.push_back(to_number(toks[i], line_no));
      initial = {line_no, std::move(probs)};
    } else if (key == "transition" || key == "cost" || key == "feature") {
      const std::size_t index_count = key == "cost" ? 3 : 2;
      PendingRow row;
      row.line_no = line_no;
      std::size_t i = 1;
      for (; i < toks.size() && toks[i] != ":"; ++i) row.indices.push_back(to_index(toks[i], line_no));
      if (row.indices.size() != index_count) {
        fail(line_no, key + " needs " + std::to_string(index_count) + " indices before ':'");
      }
      if (i == toks.size()) fail(line_no, key + " row is missing ':'");
      for (++i; i < toks.size(); ++i) row.values.push_back(to_number(toks[i], line_no));
      if (row.values.empty()) fail(line_no, key + " row has no values");
      (key == "transition" ? transitions : key == "cost" ? costs : features).push_back(std::move(row));
    } else {
      fail(line_no, "unknown directive '" + key + "'");
    }
  }

  if (!states) throw ParseError("mdp file: missing 'states'");
  if (!actions) throw ParseError("mdp file: missing 'actions'");
  if (!horizon) throw ParseError("mdp file: missing 'horizon'");
  if (!gamma) throw ParseError("mdp file: missing 'gamma'");
  if (!initial) throw ParseError("mdp file: missing 'initial'");

  MdpFile file;
  MdpSpec& mdp = file.mdp;
  mdp = make_mdp(*states, *actions, *horizon, *gamma);

  if (static_cast<index_t>(initial->second.size()) != *states) {
    fail(initial->first, "initial distribution needs one probability per state");
  }
  for (index_t s = 0; s < *states; ++s) mdp.initial_dist[s] = initial->second[static_cast<std::size_t>(s)];

  std::vector<bool> transition_seen(static_cast<std::size_t>(*states * *actions), false);
  for (const PendingRow& row : transitions) {
    const index_t s = row.indices[0], a = row.indices[1];
    if (s < 0 || s >= *states || a < 0 || a >= *actions) fail(row.line_no, "transition indices out of range");
    if (static_cast<index_t>(row.values.size()) != *states) {
      fail(row.line_no, "transition row needs one probability per state");
    }
    if (transition_seen[static_cast<std::size_t>(mdp.sa_row(s, a))]) {
      fail(row.line_no, "duplicate transition row");
    }
    transition_seen[static_cast<std::size_t>(mdp.sa_row(s, a))] = true;
    for (index_t s2 = 0; s2 < *states; ++s2) {
      mdp.transition(mdp.sa_row(s, a), s2) = row.values[static_cast<std::size_t>(s2)];
    }
  }
  for (std::size_t r = 0; r < transition_seen.size(); ++r) {
    if (!transition_seen[r]) {
      throw ParseError("mdp file: missing transition row for (s=" + std::to_string(r / *actions) +
                       ", a=" + std::to_string(r % *actions) + ")");
    }
  }

  for (const PendingRow& row : costs) {
    const index_t s = row.indices[0], a = row.indices[1], s2 = row.indices[2];
    if (s < 0 || s >= *states || a < 0 || a >= *actions || s2 < 0 || s2 >= *states) {
      fail(row.line_no, "cost indices out of range");
    }
    if (row.values.size() % 2 != 0) fail(row.line_no, "cost row needs value/probability pairs");
    const index_t atoms = static_cast<index_t>(row.values.size() / 2);
    vector_t values(atoms), probs(atoms);
    for (index_t k = 0; k < atoms; ++k) {
      values[k] = row.values[static_cast<std::size_t>(2 * k)];
      probs[k] = row.values[static_cast<std::size_t>(2 * k + 1)];
    }
    try {
      mdp.cost[mdp.cost_index(s, a, s2)] = DiscreteDist{std::move(values), std::move(probs)};
    } catch (const ConfigError& e) {
      fail(row.line_no, e.what());
    }
  }

  if (!features.empty()) {
    if (static_cast<index_t>(features.size()) != *states * *actions) {
      throw ParseError("mdp file: feature rows are all-or-none; need one per (s, a)");
    }
    const index_t dim = static_cast<index_t>(features.front().values.size());
    matrix_t phi(*states * *actions, dim);
    std::vector<bool> seen(static_cast<std::size_t>(*states * *actions), false);
    for (const PendingRow& row : features) {
      const index_t s = row.indices[0], a = row.indices[1];
      if (s < 0 || s >= *states || a < 0 || a >= *actions) fail(row.line_no, "feature indices out of range");
      if (static_cast<index_t>(row.values.size()) != dim) {
        fail(row.line_no, "feature rows must share one dimension");
      }
      if (seen[static_cast<std::size_t>(mdp.sa_row(s, a))]) fail(row.line_no, "duplicate feature row");
      seen[static_cast<std::size_t>(mdp.sa_row(s, a))] = true;
      for (index_t d = 0; d < dim; ++d) phi(mdp.sa_row(s, a), d) = row.values[static_cast<std::size_t>(d)];
    }
    file.features = std::move(phi);
  }

  try {
    mdp.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("mdp file: ") + e.what());
  }
  return file;
}

MdpFile load_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open MDP file '" + path + "'");
  return parse_mdp_file(in);
}

void write_mdp_file(std::ostream& out, const MdpSpec& spec, const matrix_t* features) {
  out << std::setprecision(17);
  out << "states " << spec.num_states << "\n";
  out << "actions " << spec.num_actions << "\n";
  out << "horizon " << spec.horizon << "\n";
  out << "gamma " << spec.gamma << "\n";
  out << "initial";
  for (index_t s = 0; s < spec.num_states; ++s) out << ' ' << spec.initial_dist[s];
  out << "\n";
  for (index_t s = 0; s < spec.num_states; ++s) {
    for (index_t a = 0; a < spec.num_actions; ++a) {
      out << "transition " << s << ' ' << a << " :";
      for (index_t s2 = 0; s2 < spec.num_states; ++s2) out << ' ' << spec.transition(spec.sa_row(s, a), s2);
      out << "\n";
    }
  }
  for (index_t s = 0; s < spec.num_states; ++s) {
    for (index_t a = 0; a < spec.num_actions; ++a) {
      for (index_t s2 = 0; s2 < spec.num_states; ++s2) {
        const DiscreteDist& d = spec.cost_dist(s, a, s2);
        if (d.size() == 1 && d.value(0) == 0) continue;  // implied default
        out << "cost " << s << ' ' << a << ' ' << s2 << " :";
        for (index_t k = 0; k < d.size(); ++k) out << ' ' << d.value(k) << ' ' << d.prob(k);
        out << "\n";
      }
    }
  }
  if (features != nullptr) {
    for (index_t s = 0; s < spec.num_states; ++s) {
      for (index_t a = 0; a < spec.num_actions; ++a) {
        out << "feature " << s << ' ' << a << " :";
        for (index_t d = 0; d < features->cols(); ++d) out << ' ' << (*features)(spec.sa_row(s, a), d);
        out << "\n";
      }
    }
  }
  if (!out) throw IoError("failed writing MDP data");
}

void save_mdp_file(const std::string& path, const MdpSpec& spec, const matrix_t* features) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_mdp_file(out, spec, features);
}

MdpSpec negate_costs(const MdpSpec& spec) {
  MdpSpec negated = spec;
  for (DiscreteDist& d : negated.cost) {
    d = DiscreteDist{-d.values(), d.probs()};
  }
  return negated;
}

vector_t parse_samples(std::istream& in) {
  std::vector<scalar_t> values;
  std::string raw;
  index_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::vector<std::string> toks = tokenize(strip_comment(raw));
    if (toks.empty()) continue;
    if (toks.size() != 1) fail(line_no, "sample files carry one value per line");
    values.push_back(to_number(toks[0], line_no));
  }
  if (values.empty()) throw ParseError("sample file: no samples");
  vector_t out(static_cast<index_t>(values.size()));
  for (index_t i = 0; i < out.size(); ++i) out[i] = values[static_cast<std::size_t>(i)];
  return out;
}

vector_t load_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample file '" + path + "'");
  return parse_samples(in);
}

DiscreteDist parse_dist(std::istream& in) {
  std::vector<scalar_t> values, probs;
  std::string raw;
  index_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::vector<std::string> toks = tokenize(strip_comment(raw));
    if (toks.empty()) continue;
    if (toks.size() != 2) fail(line_no, "distribution files carry 'value probability' per line");
    values.push_back(to_number(toks[0], line_no));
    probs.push_back(to_number(toks[1], line_no));
  }
  if (values.empty()) throw ParseError("distribution file: no atoms");
  vector_t v(static_cast<index_t>(values.size())), p(static_cast<index_t>(probs.size()));
  for (index_t i = 0; i < v.size(); ++i) {
    v[i] = values[static_cast<std::size_t>(i)];
    p[i] = probs[static_cast<std::size_t>(i)];
  }
  try {
    return DiscreteDist{std::move(v), std::move(p)};
  } catch (const ConfigError& e) {
    throw ParseError(std::string("distribution file: ") + e.what());
  }
}

DiscreteDist load_dist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open distribution file '" + path + "'");
  return parse_dist(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,s,a,cost\n" << std::setprecision(17);
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const TrajectoryStep& step = traj.steps[t];
    out << t << ',' << step.state << ',' << step.action << ',' << step.cost << "\n";
  }
}

}  // namespace risq
