#include "periodbench/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace periodbench {
namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(join(path, key), "unknown key");
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const std::string& path, const char* key) {
  const json* v = find(j, key);
  if (!v) throw ConfigError(join(path, key), "missing required key");
  return *v;
}

double read_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

double read_positive(const json& v, const std::string& path) {
  const double d = read_number(v, path);
  if (!(d > 0.0)) throw ConfigError(path, "must be positive");
  return d;
}

double read_nonneg(const json& v, const std::string& path) {
  const double d = read_number(v, path);
  if (!(d >= 0.0)) throw ConfigError(path, "must be non-negative");
  return d;
}

int read_int(const json& v, const std::string& path, int min_value) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto i = v.get<long long>();
  if (i < min_value || i > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(i);
}

std::string read_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

template <class Fn>
void optional_field(const json& j, const std::string& path, const char* key, Fn&& fn) {
  if (const json* v = find(j, key)) fn(*v, join(path, key));
}

Model parse_model(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = read_string(require(j, path, "kind"), join(path, "kind"));
  if (kind == "ungm") {
    reject_unknown(j, path, {"kind", "q", "meas_noise_var", "forcing_amplitude", "forcing_rate"});
    UngmModel m;
    optional_field(j, path, "q", [&](const json& v, const std::string& p) { m.q = read_positive(v, p); });
    optional_field(j, path, "meas_noise_var",
                   [&](const json& v, const std::string& p) { m.meas_noise_var = read_positive(v, p); });
    optional_field(j, path, "forcing_amplitude",
                   [&](const json& v, const std::string& p) { m.forcing_amplitude = read_number(v, p); });
    optional_field(j, path, "forcing_rate",
                   [&](const json& v, const std::string& p) { m.forcing_rate = read_number(v, p); });
    return m;
  }
  if (kind == "cv") {
    reject_unknown(j, path, {"kind", "sigma1", "sigma2", "meas_noise_var"});
    CvModel m;
    optional_field(j, path, "sigma1", [&](const json& v, const std::string& p) { m.sigma1 = read_positive(v, p); });
    optional_field(j, path, "sigma2", [&](const json& v, const std::string& p) { m.sigma2 = read_positive(v, p); });
    optional_field(j, path, "meas_noise_var",
                   [&](const json& v, const std::string& p) { m.meas_noise_var = read_positive(v, p); });
    return m;
  }
  throw ConfigError(join(path, "kind"), "expected \"ungm\" or \"cv\"");
}

CostModel parse_cost(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = read_string(require(j, path, "kind"), join(path, "kind"));
  if (kind == "measured") {
    reject_unknown(j, path, {"kind", "warmup", "samples"});
    MeasuredCost c;
    optional_field(j, path, "warmup", [&](const json& v, const std::string& p) { c.warmup = read_int(v, p, 0); });
    optional_field(j, path, "samples", [&](const json& v, const std::string& p) { c.samples = read_int(v, p, 1); });
    return c;
  }
  if (kind == "synthetic") {
    reject_unknown(j, path, {"kind", "c0", "c1"});
    SyntheticCost c;
    optional_field(j, path, "c0", [&](const json& v, const std::string& p) { c.c0 = read_nonneg(v, p); });
    optional_field(j, path, "c1", [&](const json& v, const std::string& p) { c.c1 = read_nonneg(v, p); });
    if (!(c.c0 + c.c1 > 0.0)) throw ConfigError(join(path, "c1"), "c0 + c1 must be positive");
    return c;
  }
  if (kind == "fixed") {
    reject_unknown(j, path, {"kind", "period"});
    return FixedPeriodCost{SamplingPeriod(read_positive(require(j, path, "period"), join(path, "period")))};
  }
  throw ConfigError(join(path, "kind"), "expected \"measured\", \"synthetic\" or \"fixed\"");
}

ResamplePolicy parse_resample(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "every_step") return ResamplePolicy::every_step();
    throw ConfigError(path, "expected \"every_step\" or an object with policy \"ess_threshold\"");
  }
  require_object(j, path);
  reject_unknown(j, path, {"policy", "fraction"});
  const std::string policy = read_string(require(j, path, "policy"), join(path, "policy"));
  if (policy == "every_step") {
    if (find(j, "fraction")) throw ConfigError(join(path, "fraction"), "only valid for ess_threshold");
    return ResamplePolicy::every_step();
  }
  if (policy != "ess_threshold") throw ConfigError(join(path, "policy"), "expected every_step or ess_threshold");
  double fraction = 0.5;
  optional_field(j, path, "fraction", [&](const json& v, const std::string& p) {
    fraction = read_positive(v, p);
    if (fraction > 1.0) throw ConfigError(p, "must lie in (0, 1]");
  });
  return ResamplePolicy::ess_threshold(fraction);
}

FilterEntry parse_filter(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"label", "kind", "particle_count", "resample", "cost"});
  FilterEntry f;
  f.label = read_string(require(j, path, "label"), join(path, "label"));
  if (f.label.empty() || f.label.find_first_of(",\"\n\r") != std::string::npos) {
    throw ConfigError(join(path, "label"), "must be non-empty and free of commas, quotes and newlines");
  }
  const std::string kind = read_string(require(j, path, "kind"), join(path, "kind"));
  if (kind == "kf") {
    f.spec.kind = FilterKind::KF;
  } else if (kind == "ekf") {
    f.spec.kind = FilterKind::EKF;
  } else if (kind == "pf") {
    f.spec.kind = FilterKind::PF;
  } else {
    throw ConfigError(join(path, "kind"), "expected \"kf\", \"ekf\" or \"pf\"");
  }
  if (f.spec.kind == FilterKind::PF) {
    f.spec.particle_count = read_int(require(j, path, "particle_count"), join(path, "particle_count"), 1);
    optional_field(j, path, "resample",
                   [&](const json& v, const std::string& p) { f.spec.resample = parse_resample(v, p); });
  } else {
    for (const char* key : {"particle_count", "resample"}) {
      if (find(j, key)) throw ConfigError(join(path, key), "only valid for kind \"pf\"");
    }
  }
  f.cost = parse_cost(require(j, path, "cost"), join(path, "cost"));
  return f;
}

}  // namespace

LoadedConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"model", "filters", "protocol", "horizon", "mc_runs", "seed", "kappa", "rmse_components",
                           "output"});
  LoadedConfig out;
  RunConfig& cfg = out.run;
  cfg.model = parse_model(require(doc, "", "model"), "model");
  const bool is_ungm = std::holds_alternative<UngmModel>(cfg.model);

  const json& filters = require(doc, "", "filters");
  if (!filters.is_array() || filters.empty()) throw ConfigError("filters", "expected a non-empty list");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const std::string path = index("filters", i);
    FilterEntry f = parse_filter(filters[i], path);
    if (!labels.insert(f.label).second) throw ConfigError(join(path, "label"), "duplicate label '" + f.label + "'");
    if (is_ungm && f.spec.kind == FilterKind::KF) {
      throw ConfigError(join(path, "kind"), "kf requires the linear cv model");
    }
    cfg.filters.push_back(std::move(f));
  }

  if (const json* p = find(doc, "protocol")) {
    require_object(*p, "protocol");
    reject_unknown(*p, "protocol", {"mode", "reference_period"});
    optional_field(*p, "protocol", "mode", [&](const json& v, const std::string& path) {
      const std::string mode = read_string(v, path);
      if (mode == "both") {
        cfg.protocols = {Protocol::Kind::ConstantNoise, Protocol::Kind::PeriodMatched};
      } else if (mode == "constant_noise") {
        cfg.protocols = {Protocol::Kind::ConstantNoise};
      } else if (mode == "period_matched") {
        cfg.protocols = {Protocol::Kind::PeriodMatched};
      } else {
        throw ConfigError(path, "expected \"both\", \"constant_noise\" or \"period_matched\"");
      }
    });
    optional_field(*p, "protocol", "reference_period", [&](const json& v, const std::string& path) {
      cfg.reference_period = SamplingPeriod(read_positive(v, path));
    });
  }

  cfg.horizon = read_positive(require(doc, "", "horizon"), "horizon");
  cfg.mc_runs = read_int(require(doc, "", "mc_runs"), "mc_runs", 1);
  const json& seed = require(doc, "", "seed");
  if (!seed.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative 64-bit integer");
  cfg.seed = seed.get<std::uint64_t>();

  optional_field(doc, "", "kappa", [&](const json& v, const std::string& path) {
    cfg.mapping = PeriodMapping(read_positive(v, path));
  });
  if (!cfg.mapping) {
    for (const auto& f : cfg.filters) {
      if (needs_mapping(f.cost)) {
        throw ConfigError("kappa", std::string("required because filter '") + f.label + "' uses " +
                                       cost_name(f.cost) + " cost");
      }
    }
  }

  const int dim = is_ungm ? 1 : 4;
  cfg.rmse_components = is_ungm ? std::vector<int>{0} : std::vector<int>{0, 2};
  optional_field(doc, "", "rmse_components", [&](const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty list of state indices");
    cfg.rmse_components.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int c = read_int(v[i], index(path, i), 0);
      if (c >= dim) throw ConfigError(index(path, i), "state index out of range for this model");
      cfg.rmse_components.push_back(c);
    }
  });

  optional_field(doc, "", "output", [&](const json& v, const std::string& path) {
    const std::string s = read_string(v, path);
    if (s.empty()) throw ConfigError(path, "must not be empty");
    out.output = s;
  });

  // Cross-field checks (e.g. fixed period beyond the horizon) surface at run time.
  return out;
}

LoadedConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("<document>", "cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace periodbench
