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

#ifndef DIRLAP_LINREG_HPP_
#define DIRLAP_LINREG_HPP_

#include <Eigen/Dense>
#include <vector>

#include "dirlap/dl_core.hpp"
#include "dirlap/rng.hpp"

namespace dirlap {

/// Dense design matrix and response, with the design products reused across
/// scans cached at construction.
struct RegData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd Xty;
  Eigen::MatrixXd XtX;  ///< only populated when p <= n (direct-path cache)

  static RegData make(Eigen::MatrixXd X, Eigen::VectorXd y);
  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Shape s and rate r of the inverse-gamma prior on sigma^2.
struct VariancePrior {
  double s = 0.1;
  double r = 0.1;

  bool valid() const { return s > 0.0 && r > 0.0; }
};

struct RegStateDelta {
  Eigen::VectorXd theta;
  double sigma2 = 1.0;
  DeltaState local;
};

struct RegStateTauPhi {
  Eigen::VectorXd theta;
  double sigma2 = 1.0;
  TauPhiState local;
};

/// Diagonal of the prior scale matrix D, with D_jj = psi_j * delta_j^2.
Eigen::VectorXd prior_scale_diagonal(const DeltaState& local);

/// sigma^2 ~ iGa(s + n/2, r + y' (I_n + X D X')^{-1} y / 2), the
/// theta-marginalized full conditional.
double draw_sigma2_marginal(const RegData& d, const DeltaState& local, const VariancePrior& prior,
                            RngStream& rng);

/// theta ~ N(A^{-1} X'y, sigma^2 A^{-1}) with A = X'X + D^{-1}. For p > n the
/// draw goes through the structured sampler working on the unit-noise scale
/// (Phi = X, alpha = y / sigma, theta = sigma * result): u ~ N(0, D),
/// e ~ N(0, I_n), v = Phi u + e, solve (Phi D Phi' + I_n) w = alpha - v, and
/// return sigma * (u + D Phi' w). For p <= n a direct factorization of A is
/// used instead.
Eigen::VectorXd draw_theta_given_sigma2(const RegData& d, double sigma2, const DeltaState& local,
                                        RngStream& rng);

/// delta_j | theta_j, sigma^2 ~ GiG(a - 1, 1, 2|theta_j| / sigma).
std::vector<double> draw_delta_reg(const Eigen::VectorXd& theta, double sigma2, double a,
                                   RngStream& rng);

/// psi_j = 1 / X_j with X_j ~ iG(sigma delta_j / |theta_j|, 1).
std::vector<double> draw_psi_reg(const Eigen::VectorXd& theta, double sigma2,
                                 const std::vector<double>& delta, RngStream& rng);

/// tau | theta, sigma^2, phi ~ GiG(p(a-1), 1, 2 sum_j |theta_j| / (sigma phi_j)).
double draw_tau_reg_flawed(const Eigen::VectorXd& theta, double sigma2,
                           const std::vector<double>& phi, double a, RngStream& rng);

/// phi = T / sum(T) with T_j ~ GiG(a - 1, 1, 2|theta_j| / sigma).
std::vector<double> draw_phi_reg_flawed(const Eigen::VectorXd& theta, double sigma2, double a,
                                        RngStream& rng);

/// One scan in the originally published order: collapsed (theta, sigma^2)
/// block, then psi / tau conditioned on the previous scan's (tau, phi).
void scan_original_reg(RegStateTauPhi& state, const RegData& d, double a,
                       const VariancePrior& prior, RngStream& rng);

/// One redundancy-free scan: (theta, sigma^2) block; delta | theta, sigma^2;
/// psi | theta, sigma^2, delta.
void scan_correct_reg(RegStateDelta& state, const RegData& d, double a,
                      const VariancePrior& prior, RngStream& rng);

/// Unit-scale states: theta = 0, sigma^2 = 1, psi = delta = 1 (prior draws
/// of the scales underflow for a ~ 1/p).
RegStateDelta init_reg_delta_state(const RegData& d, double a, RngStream& rng);
RegStateTauPhi init_reg_tauphi_state(const RegData& d, double a, RngStream& rng);

}  // namespace dirlap

#endif  // DIRLAP_LINREG_HPP_
