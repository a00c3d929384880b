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

#ifndef DIRLAP_VALIDATION_HPP_
#define DIRLAP_VALIDATION_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dirlap/rng.hpp"

namespace dirlap {

/// Accuracy and budget for the adaptive quadrature oracles. Results must be
/// stable to 1e-8 under doubling of the subdivision limit; integrate_*
/// throws QuadratureError instead of silently truncating.
struct QuadratureSpec {
  double epsabs = 1e-12;
  double epsrel = 1e-10;
  std::size_t limit = 600;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integral of f over (0, inf), evaluated on the log scale so that mass
/// concentrated anywhere on the positive axis is resolved.
double integrate_positive(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

/// Integral of f over the real line.
double integrate_real(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

/// Integral of f over [a, b], with optional interior singular points the
/// quadrature must not step over.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& singularities = {},
                          const QuadratureSpec& spec = {});

/// Two-sample Kolmogorov-Smirnov result with the asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

KsResult ks_two_sample(std::vector<double> xs, std::vector<double> ys);

/// Mean of a chain segment with its Monte Carlo standard error by batch
/// means.
struct BatchMeansSummary {
  double mean = 0.0;
  double mcse = 0.0;
};

BatchMeansSummary mcse_batch_means(std::span<const double> draws, std::size_t n_batches = 50);

/// Effective sample size implied by the batch-means variance estimate.
double effective_sample_size(std::span<const double> draws, std::size_t n_batches = 50);

/// Marginal prior density of a coordinate under the shrinkage prior,
/// computed by integrating the Laplace scale against its gamma mixing law.
double dl_marginal_density(double theta, double a, const QuadratureSpec& spec = {});

/// Quadrature summary of the single-coordinate posterior theta | y.
struct NmPosteriorSummary {
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> probs;
  std::vector<double> quantiles;
};

NmPosteriorSummary nm_posterior_oracle(double y, double a,
                                       const std::vector<double>& probs = {0.25, 0.5, 0.75},
                                       const QuadratureSpec& spec = {});

/// Exact draw from the global-scale conditional tau | theta, obtained by
/// summing the independent per-coordinate GiG conditionals.
double tau_reference_sample(const std::vector<double>& theta, double a, RngStream& rng);

/// Empirical comparison, at a frozen theta, of (i) exact iid draws from the
/// (psi, tau, phi) | theta conditional against (ii) the stationary law of
/// iterating the stale-conditioned sub-scan.
struct ConditionalScanStudy {
  KsResult psi1_flawed_vs_exact;       ///< expected to reject
  KsResult tau_composition_vs_reference;  ///< expected not to reject
  double corr_tau_phi1_exact = 0.0;    ///< near zero: the summand/normalizer coupling is weak
  double corr_tau_phi1_flawed = 0.0;   ///< zero by the sub-scan's structure
  /// Dependence between psi_1 and the scale tau*phi_1 recorded in the same
  /// draw. The exact conditional ties psi_1 to its scale (strongly negative);
  /// the stale-conditioned sub-scan draws psi_1 from the previous scan's
  /// scale, so this correlation collapses toward zero.
  double corr_psi1_scale_exact = 0.0;
  double corr_psi1_scale_flawed = 0.0;
  double corr_se = 0.0;                ///< ~ 1/sqrt(n_draws)
  std::size_t n_draws = 0;
};

/// Draw count at which the study separates the two orderings with power
/// well above 0.99 (the stationary psi_1 discrepancy has asymptotic
/// Kolmogorov-Smirnov distance ~0.0115 at theta = (0.5, -1.2, 3.0), a = 1/2).
inline constexpr std::size_t kScanStudyDraws = 120000;

ConditionalScanStudy conditional_scan_study(const std::vector<double>& theta, double a,
                                            std::size_t n_draws, RngStream& rng);

}  // namespace dirlap

#endif  // DIRLAP_VALIDATION_HPP_
