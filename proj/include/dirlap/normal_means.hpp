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

#ifndef DIRLAP_NORMAL_MEANS_HPP_
#define DIRLAP_NORMAL_MEANS_HPP_

#include <vector>

#include "dirlap/dl_core.hpp"
#include "dirlap/rng.hpp"

namespace dirlap {

/// Observations of the n-dimensional mean under unit Gaussian noise.
struct NmData {
  std::vector<double> y;
};

/// Chain state for the redundancy-free scan.
struct NmStateDelta {
  std::vector<double> theta;
  DeltaState local;
};

/// Chain state for the stale-conditioning scan, which needs (tau, phi)
/// explicitly.
struct NmStateTauPhi {
  std::vector<double> theta;
  TauPhiState local;
};

/// zeta^2 = {1 + 1 / (psi * scale^2)}^{-1}, in (0, 1). scale is delta_i or
/// tau * phi_i depending on the parameterization.
double shrink_factor(double psi, double scale);

/// theta_i ~ N(zeta_i^2 y_i, zeta_i^2), independently across coordinates.
std::vector<double> draw_theta(const NmData& d, const std::vector<double>& psi,
                               const std::vector<double>& scale, RngStream& rng);

/// delta_i | theta_i ~ GiG(a - 1, 1, 2|theta_i|). A numerically zero theta_i
/// clamps xi at kXiClampFloor and bumps the diagnostics counter.
std::vector<double> draw_delta_given_theta(const std::vector<double>& theta, double a,
                                           RngStream& rng);

/// psi_i = 1 / X_i with X_i ~ iG(scale_i / |theta_i|, 1); the mean is capped
/// at kInvGaussMeanCap when |theta_i| underflows.
std::vector<double> draw_psi_given(const std::vector<double>& theta,
                                   const std::vector<double>& scale, RngStream& rng);

/// tau | theta, phi ~ GiG(n(a-1), 1, 2 sum_i |theta_i| / phi_i).
double draw_tau_given_theta_phi(const std::vector<double>& theta, const std::vector<double>& phi,
                                double a, RngStream& rng);

/// phi = T / sum(T) with independent T_i ~ GiG(a - 1, 1, 2|theta_i|).
std::vector<double> draw_phi_given_theta(const std::vector<double>& theta, double a,
                                         RngStream& rng);

/// One scan in the originally published order: theta | psi, tau, phi, y;
/// psi | theta with the *old* (tau, phi); tau | theta with the *old* phi;
/// phi | theta. The stale conditioning is deliberate; this kernel does not
/// leave the posterior invariant.
void scan_original(NmStateTauPhi& state, const NmData& d, double a, RngStream& rng);

/// One redundancy-free scan: theta | psi, delta, y; delta | theta;
/// psi | theta, delta.
void scan_correct(NmStateDelta& state, const NmData& d, double a, RngStream& rng);

/// Frozen-theta sub-scan of the original order (steps 2-4 only), used to
/// study the stationary law of (psi, tau, phi) given theta in isolation.
void scan_original_given_theta(TauPhiState& local, const std::vector<double>& theta, double a,
                               RngStream& rng);

/// Unit-scale chain states (psi = delta = 1); theta starts at the data.
/// Prior draws of the scales underflow for a ~ 1/n and strand the exact-order
/// chain in a numerically absorbing small-delta region.
NmStateDelta init_delta_state(const NmData& d, double a, RngStream& rng);
NmStateTauPhi init_tauphi_state(const NmData& d, double a, RngStream& rng);

}  // namespace dirlap

#endif  // DIRLAP_NORMAL_MEANS_HPP_
