#include "aoapilot/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <sstream>

#include "aoapilot/csv.hpp"
#include "aoapilot/errors.hpp"

namespace aoapilot {

const char* method_name(Method m) {
  switch (m) {
    case Method::kDrl: return "drl";
    case Method::kExhaustive: return "exhaustive";
    case Method::kRandom: return "random";
    case Method::kSprLike: return "spr_like";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "drl") return Method::kDrl;
  if (name == "exhaustive") return Method::kExhaustive;
  if (name == "random") return Method::kRandom;
  if (name == "spr" || name == "spr_like") return Method::kSprLike;
  throw ConfigError("unknown method '" + name + "' (drl | exhaustive | random | spr_like)");
}

void ExperimentConfig::validate() const {
  system.validate();
  schedule.validate();
  if (system.L > 7) throw ConfigError("hexagonal preset supports at most 7 cells");
  if (channel.paths < 1) throw ConfigError("channel paths must be >= 1");
  if (channel.quad_points < 2) throw ConfigError("quad_points must be >= 2");
  if (env.drop_period < 1) throw ConfigError("drop_period must be >= 1");
  if (!(env.q_low >= 0.0 && env.q_low < env.q_high && env.q_high <= 1.0)) {
    throw ConfigError("need 0 <= q_low < q_high <= 1");
  }
  if (env.calibration_samples < 100) throw ConfigError("calibration_samples must be >= 100");
  if (rate.realizations < 1 || rate_realizations < 1) throw ConfigError("realizations must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (!(edge_ratio >= 0.0 && edge_ratio < 1.0)) throw ConfigError("edge_ratio must lie in [0, 1)");
  if (methods.empty()) throw ConfigError("at least one method is required");
}

ExperimentConfig paper_preset() {
  ExperimentConfig c;
  c.name = "paper";
  c.system.L = 7;
  c.system.K = 4;
  c.system.M = 100;
  c.system.eta = 2.5;
  c.env.evolution = WorldEvolution::kPositions;
  c.env.drop_period = 1000;
  c.steps = 10000;
  return c;
}

ExperimentConfig desk_preset() {
  ExperimentConfig c;
  c.name = "desk";
  c.system.L = 3;
  c.system.K = 3;
  c.system.M = 32;
  c.env.evolution = WorldEvolution::kSmallScale;
  c.env.calibration = CalibrationSource::kCurrentWorld;
  c.env.q_low = 0.1;
  c.env.q_high = 0.5;
  c.steps = 5000;
  return c;
}

ExperimentConfig preset(const std::string& name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw ConfigError("unknown preset '" + name + "' (paper | desk)");
}

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("key '" + key + "': not a number: " + v);
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("key '" + key + "': not an integer: " + v);
  return n;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: " + v);
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

#define REAL(sec, name, expr)                                                         \
  Field {                                                                             \
    sec, #name, [](const ExperimentConfig& c) { return csv_number(c.expr); },         \
        [](ExperimentConfig& c, const std::string& v) { c.expr = to_double(#name, v); } \
  }
#define INT(sec, name, expr)                                                              \
  Field {                                                                                 \
    sec, #name, [](const ExperimentConfig& c) { return std::to_string(c.expr); },         \
        [](ExperimentConfig& c, const std::string& v) {                                   \
          c.expr = static_cast<decltype(c.expr)>(to_int(#name, v));                        \
        }                                                                                 \
  }
#define BOOL(sec, name, expr)                                                       \
  Field {                                                                           \
    sec, #name, [](const ExperimentConfig& c) { return from_bool(c.expr); },        \
        [](ExperimentConfig& c, const std::string& v) { c.expr = to_bool(#name, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      INT("scenario", L, system.L),
      INT("scenario", K, system.K),
      INT("scenario", M, system.M),
      REAL("scenario", eta, system.eta),
      REAL("scenario", R, system.R),
      REAL("scenario", gamma_snr_db, system.gamma_snr_db),
      REAL("scenario", sigma2, system.sigma2),
      REAL("scenario", spacing, system.spacing),
      REAL("scenario", scatter_radius, system.scatter_radius),
      REAL("scenario", exclusion_radius, system.exclusion_radius),
      INT("scenario", seed, system.seed),
      BOOL("scenario", clamp_aoa, system.clamp_aoa),
      INT("channel", paths, channel.paths),
      INT("channel", quad_points, channel.quad_points),
      Field{"channel", "phase_model",
            [](const ExperimentConfig& c) {
              return std::string(c.channel.phase_model == PathPhaseModel::kUnitPhase ? "unit_phase"
                                                                                     : "complex_normal");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "unit_phase") c.channel.phase_model = PathPhaseModel::kUnitPhase;
              else if (v == "complex_normal") c.channel.phase_model = PathPhaseModel::kComplexNormal;
              else throw ConfigError("phase_model must be unit_phase or complex_normal");
            }},
      Field{"env", "redraw",
            [](const ExperimentConfig& c) {
              switch (c.env.evolution) {
                case WorldEvolution::kNone: return std::string("none");
                case WorldEvolution::kSmallScale: return std::string("smallscale");
                case WorldEvolution::kPositions: return std::string("positions");
              }
              return std::string("?");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "none") c.env.evolution = WorldEvolution::kNone;
              else if (v == "smallscale") c.env.evolution = WorldEvolution::kSmallScale;
              else if (v == "positions") c.env.evolution = WorldEvolution::kPositions;
              else throw ConfigError("redraw must be none, smallscale or positions");
            }},
      INT("env", drop_period, env.drop_period),
      REAL("env", q_low, env.q_low),
      REAL("env", q_high, env.q_high),
      INT("env", calibration_samples, env.calibration_samples),
      Field{"env", "calibration",
            [](const ExperimentConfig& c) {
              return std::string(c.env.calibration == CalibrationSource::kFreshDrops ? "fresh_drops"
                                                                                     : "current_world");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "fresh_drops") c.env.calibration = CalibrationSource::kFreshDrops;
              else if (v == "current_world") c.env.calibration = CalibrationSource::kCurrentWorld;
              else throw ConfigError("calibration must be fresh_drops or current_world");
            }},
      REAL("qnn", discount, schedule.discount),
      REAL("qnn", epsilon_start, schedule.epsilon_start),
      REAL("qnn", epsilon_decay, schedule.epsilon_decay),
      REAL("qnn", epsilon_floor, schedule.epsilon_floor),
      INT("qnn", batch_size, schedule.batch_size),
      INT("qnn", replay_capacity, schedule.replay_capacity),
      INT("qnn", target_sync, schedule.target_sync),
      REAL("qnn", learning_rate, schedule.rmsprop.learning_rate),
      REAL("qnn", rms_decay, schedule.rmsprop.decay),
      REAL("qnn", rms_epsilon, schedule.rmsprop.epsilon),
      INT("qnn", hidden_width, schedule.hidden_width),
      INT("qnn", fc_layers, schedule.fc_layers),
      INT("qnn", residual_blocks, schedule.residual_blocks),
      INT("rate", realizations, rate.realizations),
      REAL("rate", pilot_snr_db, rate.pilot_snr_db),
      BOOL("rate", rate_of_mean, rate.rate_of_mean),
      INT("experiment", steps, steps),
      Field{"experiment", "methods",
            [](const ExperimentConfig& c) {
              std::string s;
              for (Method m : c.methods) s += (s.empty() ? "" : ",") + std::string(method_name(m));
              return s;
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.methods.clear();
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                if (!item.empty()) c.methods.push_back(parse_method(item));
              }
            }},
      REAL("experiment", exhaustive_budget, exhaustive_budget),
      BOOL("experiment", long_run, long_run),
      REAL("experiment", edge_ratio, edge_ratio),
      INT("experiment", window, window),
      INT("experiment", rate_realizations, rate_realizations),
  };
  return table;
}

#undef REAL
#undef INT
#undef BOOL

}  // namespace

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  bool pilot_snr_given = false;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      const Field* match = nullptr;
      for (const Field& f : fields()) {
        if (f.section == section && f.key == key) match = &f;
      }
      if (!match) throw ConfigError("unknown config key [" + section + "] " + key);
      match->set(base, value.get_value<std::string>());
      if (section == "rate" && key == "pilot_snr_db") pilot_snr_given = true;
    }
  }
  // The pilot SNR follows the cell-edge SNR unless set explicitly.
  if (!pilot_snr_given) base.rate.pilot_snr_db = base.system.gamma_snr_db;
  base.validate();
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(c) << '\n';
  }
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace aoapilot
