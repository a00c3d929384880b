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

#ifndef DIRLAP_DISTRIBUTIONS_HPP_
#define DIRLAP_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <vector>

#include "dirlap/rng.hpp"

namespace dirlap {

/// Parameters of the generalized inverse Gaussian GiG(nu, gamma, xi), with
/// density proportional to x^{nu-1} exp{-(gamma x + xi / x) / 2} on (0, inf).
///
/// The normalizing constant uses the standard Bessel convention with argument
/// sqrt(gamma * xi):
///   C = 2 K_nu(sqrt(gamma xi)) / (gamma / xi)^{nu/2},
/// degenerating to the Gamma(nu, gamma/2) constant when xi = 0 and to the
/// inverse-Gamma(-nu, xi/2) constant when gamma = 0.
struct GigParams {
  double nu;
  double gamma_rate;  ///< coefficient of x in the exponent, >= 0
  double xi;          ///< coefficient of 1/x in the exponent, >= 0

  /// True iff the density is normalizable: nonnegative rates, and a strictly
  /// positive (negative) order when xi (gamma_rate) vanishes.
  bool valid() const {
    if (gamma_rate < 0.0 || xi < 0.0) return false;
    if (xi == 0.0 && !(nu > 0.0 && gamma_rate > 0.0)) return false;
    if (gamma_rate == 0.0 && !(nu < 0.0 && xi > 0.0)) return false;
    return true;
  }
};

/// Mean mu and shape lambda of the inverse Gaussian iG(mu, lambda).
struct InvGaussParams {
  double mu;
  double lambda;

  bool valid() const { return mu > 0.0 && lambda > 0.0; }
};

/// Normalized log density of GiG(nu, gamma, xi) at x > 0.
/// Throws std::domain_error on x <= 0 or invalid parameters.
double gig_log_density(double x, const GigParams& p);

/// E[X] for X ~ GiG(nu, gamma, xi), via the Bessel ratio
/// sqrt(xi/gamma) K_{nu+1}(w) / K_nu(w), w = sqrt(gamma xi).
double gig_mean(const GigParams& p);

/// Draws one GiG(nu, gamma, xi) variate. The boundary cases reduce exactly:
/// xi = 0 to Gamma(nu, gamma/2) and gamma = 0 to 1/Gamma(-nu, xi/2); the
/// interior case uses a rejection generator with uniformly bounded expected
/// trials for every order nu and every admissible (gamma, xi), including
/// very negative orders with xi near underflow. Never returns exactly 0.
double gig_sample(const GigParams& p, RngStream& rng);

/// Draws from iG(mu, lambda) by the transformation-with-roots method; the
/// smaller root is evaluated in a cancellation-free form so the sampler
/// stays accurate when mu >> lambda.
double invgauss_sample(const InvGaussParams& p, RngStream& rng);

/// Normalized log density of iG(mu, lambda) at x > 0.
double invgauss_log_density(double x, const InvGaussParams& p);

/// Gamma(shape, rate) variate; supports shape < 1. Never returns exactly 0.
double gamma_sample(double shape, double rate, RngStream& rng);

/// Standard normal variate.
double normal_sample(RngStream& rng);

/// Exponential variate with the given rate.
double exponential_sample(double rate, RngStream& rng);

/// Dirichlet variate with the given concentration vector; the result is
/// strictly positive and sums to 1.
std::vector<double> dirichlet_sample(const std::vector<double>& conc, RngStream& rng);

/// Counters for the floating-point guards taken inside conditional updates
/// (xi clamped at underflow, inverse-Gaussian mean capped). Cumulative per
/// process; reset explicitly in tests.
struct ClampDiagnostics {
  std::uint64_t xi_clamps() const;
  std::uint64_t mean_caps() const;
  void reset() const;
};

ClampDiagnostics clamp_diagnostics();
void note_xi_clamp();
void note_mean_cap();

/// Smallest xi used in place of an underflowed 2|theta| when theta is
/// numerically zero. A zero coordinate has probability zero in exact
/// arithmetic but does occur in floating point; the chain keeps running.
inline constexpr double kXiClampFloor = 1e-300;

/// Cap on the inverse-Gaussian mean mu = scale / |theta| when |theta|
/// underflows.
inline constexpr double kInvGaussMeanCap = 1e300;

/// Ceiling for xi in chain conditionals. The stale-conditioned regression
/// scan can pair an O(1) |theta_j| with a previous scan's phi_j ~ 1e-150,
/// driving xi (and hence tau ~ sqrt(xi)) past overflow of the prior scale
/// matrix. Beyond this ceiling the draw is already in a pure degenerate
/// tail; clamping keeps the chain finite.
inline constexpr double kXiClampCeil = 1e14;

/// Ceiling for entries of D = diag(psi_j delta_j^2) in the regression
/// kernels. A prior variance this diffuse is indistinguishable given the
/// data (prior precision 1e-8 against likelihood precision ~n), while
/// larger values push cond(I + XDX') past 1/eps so the Cholesky pivots
/// round negative, and the fast sampler's u + D X'w cancellation loses
/// sqrt(D) * eps absolute accuracy.
inline constexpr double kPriorDiagCeil = 1e8;

}  // namespace dirlap

#endif  // DIRLAP_DISTRIBUTIONS_HPP_
