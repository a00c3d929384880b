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

#include "dirlap/dl_core.hpp"

#include <stdexcept>

#include "dirlap/distributions.hpp"

namespace dirlap {

DeltaState to_delta(const TauPhiState& s) {
  if (s.psi.size() != s.phi.size()) throw std::invalid_argument("to_delta: length mismatch");
  DeltaState out;
  out.psi = s.psi;
  out.delta.resize(s.phi.size());
  for (std::size_t i = 0; i < s.phi.size(); ++i) out.delta[i] = s.tau * s.phi[i];
  return out;
}

TauPhiState from_delta(const DeltaState& s) {
  if (s.psi.size() != s.delta.size()) throw std::invalid_argument("from_delta: length mismatch");
  TauPhiState out;
  out.psi = s.psi;
  out.tau = 0.0;
  for (double d : s.delta) out.tau += d;
  out.phi.resize(s.delta.size());
  for (std::size_t i = 0; i < s.delta.size(); ++i) out.phi[i] = s.delta[i] / out.tau;
  return out;
}

DeltaState prior_sample(const DlHyper& h, RngStream& rng) {
  if (!h.valid()) throw std::invalid_argument("prior_sample: invalid hyperparameters");
  DeltaState out;
  out.psi.resize(h.dim);
  out.delta.resize(h.dim);
  for (std::size_t i = 0; i < h.dim; ++i) {
    out.psi[i] = exponential_sample(0.5, rng);
    out.delta[i] = gamma_sample(h.a, 0.5, rng);
  }
  return out;
}

}  // namespace dirlap
