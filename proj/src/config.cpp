// Copyright 2026 The dirlap authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dirlap/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dirlap {

using nlohmann::json;

std::string to_string(Model model) {
  return model == Model::kNormalMeans ? "normal-means" : "linreg";
}

std::string to_string(AlgorithmChoice alg) {
  switch (alg) {
    case AlgorithmChoice::kOriginal:
      return "original";
    case AlgorithmChoice::kCorrect:
      return "correct";
    default:
      return "both";
  }
}

namespace {

Model model_from_string(const std::string& s) {
  if (s == "normal-means") return Model::kNormalMeans;
  if (s == "linreg") return Model::kLinReg;
  throw ConfigError("unknown model: '" + s + "' (expected normal-means or linreg)");
}

AlgorithmChoice algorithm_from_string(const std::string& s) {
  if (s == "original") return AlgorithmChoice::kOriginal;
  if (s == "correct") return AlgorithmChoice::kCorrect;
  if (s == "both") return AlgorithmChoice::kBoth;
  throw ConfigError("unknown algorithm: '" + s + "' (expected original, correct, or both)");
}

}  // namespace

HyperSpec HyperSpec::parse(const std::string& text) {
  HyperSpec h;
  if (text == "1/n") {
    h.kind = Kind::kOverN;
    return h;
  }
  if (text == "1/p") {
    h.kind = Kind::kOverP;
    return h;
  }
  try {
    std::size_t consumed = 0;
    h.literal = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse hyperparameter a: '" + text +
                      "' (expected 1/n, 1/p, or a positive number)");
  }
  if (!(h.literal > 0.0)) throw ConfigError("hyperparameter a must be > 0");
  h.kind = Kind::kLiteral;
  return h;
}

double HyperSpec::resolve(std::size_t n, std::size_t p) const {
  switch (kind) {
    case Kind::kOverN:
      return 1.0 / static_cast<double>(n);
    case Kind::kOverP:
      return 1.0 / static_cast<double>(p);
    default:
      return literal;
  }
}

std::string HyperSpec::str() const {
  switch (kind) {
    case Kind::kOverN:
      return "1/n";
    case Kind::kOverP:
      return "1/p";
    default: {
      std::ostringstream os;
      os << literal;
      return os.str();
    }
  }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config file " + path + ": line " + std::to_string(lineno) +
                        " is not 'key = value'");
    }
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return kv;
}

namespace {

json config_to_json_obj(const ExperimentConfig& cfg) {
  return json{{"model", to_string(cfg.model)},
              {"algorithm", to_string(cfg.algorithm)},
              {"n", cfg.n},
              {"p", cfg.p},
              {"qn", cfg.qn},
              {"A", cfg.A},
              {"sigma2", cfg.sigma2},
              {"a", cfg.a.str()},
              {"iters", cfg.iters},
              {"burnin", cfg.burnin},
              {"reps", cfg.reps},
              {"seed", cfg.seed},
              {"prior_s", cfg.prior.s},
              {"prior_r", cfg.prior.r},
              {"out_dir", cfg.out_dir}};
}

ExperimentConfig config_from_json_obj(const json& j) {
  ExperimentConfig cfg;
  cfg.model = model_from_string(j.at("model").get<std::string>());
  cfg.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  cfg.n = j.at("n").get<std::size_t>();
  cfg.p = j.at("p").get<std::size_t>();
  cfg.qn = j.at("qn").get<std::size_t>();
  cfg.A = j.at("A").get<double>();
  cfg.sigma2 = j.at("sigma2").get<double>();
  cfg.a = HyperSpec::parse(j.at("a").get<std::string>());
  cfg.iters = j.at("iters").get<std::size_t>();
  cfg.burnin = j.at("burnin").get<std::size_t>();
  cfg.reps = j.at("reps").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.prior.s = j.at("prior_s").get<double>();
  cfg.prior.r = j.at("prior_r").get<double>();
  cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_to_json_obj(cfg).dump(2); }

ExperimentConfig config_from_json(const std::string& json_text) {
  return config_from_json_obj(json::parse(json_text));
}

namespace {

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto to_size = [&](const std::string& v) {
    try {
      return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + v +
                        "'");
    }
  };
  const auto to_double = [&](const std::string& v) {
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
  };
  if (key == "model") {
    cfg.model = model_from_string(value);
  } else if (key == "algorithm") {
    cfg.algorithm = algorithm_from_string(value);
  } else if (key == "n") {
    cfg.n = to_size(value);
  } else if (key == "p") {
    cfg.p = to_size(value);
  } else if (key == "qn") {
    cfg.qn = to_size(value);
  } else if (key == "A") {
    cfg.A = to_double(value);
  } else if (key == "sigma2") {
    cfg.sigma2 = to_double(value);
  } else if (key == "a") {
    cfg.a = HyperSpec::parse(value);
  } else if (key == "iters") {
    cfg.iters = to_size(value);
  } else if (key == "burnin") {
    cfg.burnin = to_size(value);
  } else if (key == "reps") {
    cfg.reps = to_size(value);
  } else if (key == "seed") {
    cfg.seed = to_size(value);
  } else if (key == "prior_s") {
    cfg.prior.s = to_double(value);
  } else if (key == "prior_r") {
    cfg.prior.r = to_double(value);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

}  // namespace

ExperimentConfig resolve_config(const ExperimentConfig& raw,
                                const std::optional<std::string>& config_file) {
  ExperimentConfig cfg = raw;
  if (config_file) {
    for (const auto& [key, value] : parse_config_file(*config_file)) {
      apply_config_entry(cfg, key, value);
    }
  }
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.model == Model::kNormalMeans) {
    if (cfg.qn < 1 || cfg.qn > cfg.n) throw ConfigError("qn must satisfy 1 <= qn <= n");
    if (cfg.a.kind == HyperSpec::Kind::kOverP) {
      throw ConfigError("a = 1/p is only meaningful for the linreg model");
    }
  } else {
    if (cfg.p < 1) throw ConfigError("p must be >= 1");
    if (!(cfg.sigma2 > 0.0)) throw ConfigError("sigma2 must be > 0");
  }
  if (cfg.iters <= cfg.burnin) throw ConfigError("iters must exceed burnin");
  if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
  if (!cfg.prior.valid()) throw ConfigError("variance prior (s, r) must be positive");
  return cfg;
}

std::string manifest_to_json(const RunManifest& m) {
  json j{{"config", config_to_json_obj(m.config)},
         {"version", m.version},
         {"output_files", m.output_files},
         {"wall_seconds", m.wall_seconds}};
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  RunManifest m;
  m.config = config_from_json_obj(j.at("config"));
  m.version = j.at("version").get<std::string>();
  m.output_files = j.at("output_files").get<std::vector<std::string>>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  return m;
}

std::uint64_t make_stream_id(StreamKind kind, std::uint64_t cell_index, std::uint64_t rep_index) {
  if (cell_index >= (1ULL << 28) || rep_index >= (1ULL << 28)) {
    throw ConfigError("seed fan-out supports cell and replicate indices below 2^28");
  }
  return (static_cast<std::uint64_t>(kind) << 56) | (cell_index << 28) | rep_index;
}

RngStream seed_fanout(std::uint64_t master_seed, std::uint64_t cell_index,
                      std::uint64_t rep_index, StreamKind kind) {
  return RngStream(master_seed, make_stream_id(kind, cell_index, rep_index));
}

const char* version_string() { return "dirlap 0.1.0"; }

}  // namespace dirlap
