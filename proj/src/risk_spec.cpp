#include "risq/risk_spec.hpp"

#include "risq/errors.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace risq {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

scalar_t parse_number(const std::string& key, const std::string& text) {
  try {
    std::size_t consumed = 0;
    const scalar_t v = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("risk spec: value for '" + key + "' is not a number: '" + text + "'");
  }
}

// key=value pairs with required/optional lookup and an unknown-key check.
class ParamMap {
 public:
  ParamMap(const std::string& context, const std::vector<std::string>& tokens) : context_(context) {
    for (const std::string& tok : tokens) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ParseError(context_ + ": expected key=value, got '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      if (params_.count(key)) throw ParseError(context_ + ": duplicate parameter '" + key + "'");
      params_[key] = tok.substr(eq + 1);
    }
  }

  scalar_t require(const std::string& key) {
    const auto it = params_.find(key);
    if (it == params_.end()) throw ParseError(context_ + ": missing parameter '" + key + "'");
    used_.insert(key);
    return parse_number(key, it->second);
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) throw ParseError(context_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  std::string context_;
  std::map<std::string, std::string> params_;
  std::set<std::string> used_;
};

}  // namespace

void RiskSpec::validate() const {
  switch (kind) {
    case RiskKind::expectile:
      if (!(nu > 0 && nu < 1)) throw ArgumentError("risk spec: expectile nu must be in (0, 1)");
      break;
    case RiskKind::ubsr:
      if (!loss.ubsr_eligible()) {
        throw ConfigError("risk spec: loss '" + loss.name + "' is not strictly increasing; not usable with ubsr");
      }
      break;
    case RiskKind::oce:
      if (!loss.oce_eligible()) {
        throw ConfigError("risk spec: loss '" + loss.name + "' is not OCE-eligible");
      }
      break;
  }
}

RiskSpec expectile_risk(scalar_t nu) {
  RiskSpec r;
  r.kind = RiskKind::expectile;
  r.nu = nu;
  {
    std::ostringstream os;
    os.precision(12);
    os << "expectile:nu=" << nu;
    r.text = os.str();
  }
  r.validate();
  return r;
}

RiskSpec ubsr_risk(LossFn loss, scalar_t lambda) {
  RiskSpec r;
  r.kind = RiskKind::ubsr;
  r.loss = std::move(loss);
  r.lambda = lambda;
  {
    std::ostringstream os;
    os.precision(12);
    os << "ubsr:loss=" << r.loss.name << ",lambda=" << lambda;
    r.text = os.str();
  }
  r.validate();
  return r;
}

RiskSpec oce_risk(LossFn loss) {
  RiskSpec r;
  r.kind = RiskKind::oce;
  r.loss = std::move(loss);
  r.text = "oce:loss=" + r.loss.name;
  r.validate();
  return r;
}

LossFn parse_loss(const std::string& token) {
  std::vector<std::string> parts = split(token, ':');
  const std::string name = parts.front();
  parts.erase(parts.begin());
  ParamMap params("loss '" + name + "'", parts);

  LossFn loss;
  if (name == "entropic") {
    loss = make_entropic(params.require("beta"));
  } else if (name == "identity") {
    loss = make_identity();
  } else if (name == "quadratic") {
    loss = make_quadratic(params.require("b"));
  } else if (name == "polynomial") {
    loss = make_polynomial(params.require("a"));
  } else if (name == "cvar") {
    loss = make_cvar(params.require("alpha"));
  } else if (name == "onpv") {
    loss = make_onpv(params.require("a"), params.require("b"));
  } else if (name == "meanvar") {
    loss = make_mean_variance(params.require("a"));
  } else if (name == "quartic") {
    loss = make_quartic();
  } else {
    throw ParseError("risk spec: unknown loss name '" + name + "'");
  }
  params.finish();
  return loss;
}

RiskSpec parse_risk_spec(const std::string& text) {
  const std::size_t head_end = text.find(':');
  const std::string head = text.substr(0, head_end);
  const std::string rest = head_end == std::string::npos ? "" : text.substr(head_end + 1);
  const std::vector<std::string> fields = split(rest, ',');

  if (head == "expectile") {
    ParamMap params("risk 'expectile'", fields);
    const scalar_t nu = params.require("nu");
    params.finish();
    return expectile_risk(nu);
  }

  if (head == "ubsr" || head == "oce") {
    std::optional<LossFn> loss;
    std::optional<scalar_t> lambda;
    for (const std::string& field : fields) {
      if (field.rfind("loss=", 0) == 0) {
        if (loss) throw ParseError("risk spec: duplicate loss field");
        loss = parse_loss(field.substr(5));
      } else if (field.rfind("lambda=", 0) == 0) {
        if (lambda) throw ParseError("risk spec: duplicate lambda field");
        lambda = parse_number("lambda", field.substr(7));
      } else {
        throw ParseError("risk spec: unexpected field '" + field + "'");
      }
    }
    if (!loss) throw ParseError("risk spec: '" + head + "' requires a loss= field");
    if (head == "ubsr") {
      if (!lambda) throw ParseError("risk spec: ubsr requires a lambda= field");
      return ubsr_risk(std::move(*loss), *lambda);
    }
    if (lambda) throw ParseError("risk spec: oce does not take lambda");
    return oce_risk(std::move(*loss));
  }

  throw ParseError("risk spec: unknown risk kind '" + head + "' (expected expectile, ubsr or oce)");
}

}  // namespace risq
