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

#ifndef DIRLAP_DL_CORE_HPP_
#define DIRLAP_DL_CORE_HPP_

#include <cstddef>
#include <vector>

#include "dirlap/rng.hpp"

namespace dirlap {

/// Hyperparameters of the Dirichlet-Laplace prior: the common Dirichlet
/// concentration a (the single free shrinkage knob) and the number of
/// coefficients.
struct DlHyper {
  double a;
  std::size_t dim;

  bool valid() const { return a > 0.0 && dim >= 1; }
};

/// Local scales in the (psi, tau, phi) parameterization: per-coordinate
/// mixing variances psi, global scale tau, simplex weights phi.
struct TauPhiState {
  std::vector<double> psi;
  double tau = 1.0;
  std::vector<double> phi;
};

/// Local scales in the collapsed (psi, delta) parameterization with
/// delta_i = tau * phi_i. Canonical chain-state representation; the
/// (tau, phi) form exists only for the stale-conditioning scans.
struct DeltaState {
  std::vector<double> psi;
  std::vector<double> delta;
};

/// delta_i = tau * phi_i; psi carried through unchanged.
DeltaState to_delta(const TauPhiState& s);

/// tau = sum(delta), phi = delta / tau; psi carried through unchanged.
TauPhiState from_delta(const DeltaState& s);

/// Independent prior draw: psi_i ~ Exp(1/2), delta_i ~ Gamma(a, 1/2).
DeltaState prior_sample(const DlHyper& h, RngStream& rng);

}  // namespace dirlap

#endif  // DIRLAP_DL_CORE_HPP_
