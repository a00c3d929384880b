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

#ifndef DIRLAP_CONFIG_HPP_
#define DIRLAP_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirlap/linreg.hpp"
#include "dirlap/rng.hpp"

namespace dirlap {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Model { kNormalMeans, kLinReg };
enum class AlgorithmChoice { kOriginal, kCorrect, kBoth };

std::string to_string(Model model);
std::string to_string(AlgorithmChoice alg);

/// Shrinkage hyperparameter given either as a literal or as one of the
/// fractional forms "1/n" and "1/p", resolved against the cell's own
/// dimensions at instantiation.
struct HyperSpec {
  enum class Kind { kLiteral, kOverN, kOverP };
  Kind kind = Kind::kLiteral;
  double literal = 0.5;

  static HyperSpec parse(const std::string& text);
  double resolve(std::size_t n, std::size_t p) const;
  std::string str() const;
};

/// Fully resolved single-cell run configuration.
struct ExperimentConfig {
  Model model = Model::kNormalMeans;
  AlgorithmChoice algorithm = AlgorithmChoice::kBoth;
  std::size_t n = 100;
  std::size_t p = 100;   // linreg only
  std::size_t qn = 5;    // normal-means only
  double A = 7.0;        // normal-means only
  double sigma2 = 1.0;   // linreg only
  HyperSpec a;
  std::size_t iters = 20000;
  std::size_t burnin = 5000;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  VariancePrior prior{};
  std::string out_dir = ".";
};

/// Applies defaults, merges an optional key-value config file (flags win),
/// and validates cross-field consistency. Throws ConfigError with a distinct
/// message per defect.
ExperimentConfig resolve_config(const ExperimentConfig& raw,
                                const std::optional<std::string>& config_file);

/// Simple `key = value` file, one pair per line, '#' comments.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Serialization used by the run manifest; round-trips exactly.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& json_text);

/// Record of one resolved run: the full configuration, outputs, and
/// timings. Serializing and re-parsing a manifest yields an identical
/// configuration.
struct RunManifest {
  ExperimentConfig config;
  std::string version;
  std::vector<std::string> output_files;
  double wall_seconds = 0.0;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& json_text);

/// Substream roles hung off one master seed.
enum class StreamKind : std::uint8_t {
  kData = 0,      ///< synthetic dataset noise (shared by both algorithms)
  kOriginal = 1,  ///< chain driving the original-order scan
  kCorrect = 2,   ///< chain driving the redundancy-free scan
  kAux = 3,       ///< validation studies and miscellaneous draws
};

/// Injective (kind, cell, rep) -> stream id layout: 8 bits of kind, 28 of
/// cell index, 28 of replicate index.
std::uint64_t make_stream_id(StreamKind kind, std::uint64_t cell_index, std::uint64_t rep_index);

/// Deterministic fan-out of the master seed to one replicate's stream.
RngStream seed_fanout(std::uint64_t master_seed, std::uint64_t cell_index,
                      std::uint64_t rep_index, StreamKind kind = StreamKind::kData);

/// Library version recorded into manifests and CSV metadata.
const char* version_string();

}  // namespace dirlap

#endif  // DIRLAP_CONFIG_HPP_
