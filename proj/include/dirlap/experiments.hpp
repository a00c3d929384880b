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

#ifndef DIRLAP_EXPERIMENTS_HPP_
#define DIRLAP_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dirlap/config.hpp"
#include "dirlap/linreg.hpp"
#include "dirlap/normal_means.hpp"

namespace dirlap {

enum class Algorithm { kOriginal, kCorrect };

std::string algorithm_label(Algorithm alg);

/// Sparse-mean simulation cell: qn coordinates at amplitude A, the rest 0.
struct NmScenario {
  std::size_t n = 100;
  std::size_t qn = 5;
  double A = 7.0;
  double a = 0.01;
  std::size_t reps = 20;
  std::size_t iters = 20000;
  std::size_t burnin = 5000;
  std::uint64_t seed = 1;

  bool valid() const { return qn >= 1 && qn <= n && iters > burnin; }
};

/// Regression simulation cell with the five-block signal pattern
/// (5, 6, 7, 8, 10) x sigma over blocks of length m after p/2 zeros.
struct RegScenario {
  std::size_t n = 50;
  std::size_t p = 100;
  std::size_t m = 10;
  double sigma2 = 1.0;
  double a = 0.01;
  std::size_t reps = 50;
  std::size_t iters = 20000;
  std::size_t burnin = 5000;
  std::uint64_t seed = 1;
  VariancePrior prior{};

  bool valid() const { return n >= 1 && p == 10 * m && iters > burnin; }
};

/// Post-burn-in draws, coordinate-major: draw t of coordinate j sits at
/// data[j * kept + t].
struct SampleStore {
  std::size_t dim = 0;
  std::size_t kept = 0;
  std::vector<double> data;

  SampleStore() = default;
  SampleStore(std::size_t dim_, std::size_t kept_)
      : dim(dim_), kept(kept_), data(dim_ * kept_) {}
  double* coordinate(std::size_t j) { return data.data() + j * kept; }
  const double* coordinate(std::size_t j) const { return data.data() + j * kept; }
};

/// Deterministic dataset draw for one replicate; both algorithms of a
/// replicate see this same dataset (paired comparison).
std::pair<NmData, std::vector<double>> gen_normal_means(const NmScenario& s,
                                                        std::size_t rep_index);
std::pair<RegData, Eigen::VectorXd> gen_linreg(const RegScenario& s, std::size_t rep_index);

/// Coordinatewise median of the retained draws; even counts take the
/// midpoint of the two central order statistics.
std::vector<double> posterior_median(const SampleStore& store);

double squared_loss(const std::vector<double>& est, const std::vector<double>& truth);

/// Runs one chain and returns the retained theta draws.
SampleStore run_nm_chain(const NmScenario& s, Algorithm alg, const NmData& data, RngStream& rng);
SampleStore run_reg_chain(const RegScenario& s, Algorithm alg, const RegData& data,
                          RngStream& rng);

/// Aggregated losses for one (cell, algorithm) pair.
struct LossReport {
  Model model = Model::kNormalMeans;
  Algorithm algorithm = Algorithm::kCorrect;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t qn = 0;
  double A = 0.0;
  double a = 0.0;
  std::size_t reps = 0;
  double total_loss = 0.0;    ///< average over replicates of the summed loss
  double null_loss = 0.0;     ///< contribution of truth == 0 coordinates
  double nonnull_loss = 0.0;  ///< contribution of truth != 0 coordinates
  std::vector<double> per_rep_loss;
  std::vector<double> per_coordinate_loss;  ///< averaged over replicates
};

/// Runs every (scenario, algorithm) cell over its replicates. cell_index
/// offsets the seed fan-out so distinct grids never share chain streams. A
/// replicate failure aborts the run with the cell recorded in the error.
std::vector<LossReport> run_nm_grid(const std::vector<NmScenario>& scenarios,
                                    const std::vector<Algorithm>& algorithms,
                                    std::size_t first_cell_index = 0);
std::vector<LossReport> run_reg_grid(const std::vector<RegScenario>& scenarios,
                                     const std::vector<Algorithm>& algorithms,
                                     std::size_t first_cell_index = 0);

/// One row per (cell, algorithm, replicate).
void write_replicate_csv(const std::string& path, const std::vector<LossReport>& reports);
/// One row per (cell, algorithm, coordinate) with average and log-average
/// loss, the figure data.
void write_coordinate_csv(const std::string& path, const std::vector<LossReport>& reports);
/// Per-cell summary rows (total / null / non-null averages).
void write_summary_csv(const std::string& path, const std::vector<LossReport>& reports);

/// Published experiment grids at the requested replication count.
std::vector<NmScenario> table1_grid(std::size_t reps, std::size_t iters, std::size_t burnin,
                                    std::uint64_t seed);
std::vector<NmScenario> table3_grid(std::size_t reps, std::size_t iters, std::size_t burnin,
                                    std::uint64_t seed);
std::vector<RegScenario> table2_grid(std::size_t reps, std::size_t iters, std::size_t burnin,
                                     std::uint64_t seed);

}  // namespace dirlap

#endif  // DIRLAP_EXPERIMENTS_HPP_
