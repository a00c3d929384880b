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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dirlap/distributions.hpp"
#include "dirlap/validation.hpp"

using namespace dirlap;

namespace {

std::vector<double> draw_many(std::size_t n, std::uint64_t stream,
                              const std::function<double(RngStream&)>& f) {
  RngStream rng(20260826, stream);
  std::vector<double> out(n);
  for (auto& x : out) x = f(rng);
  return out;
}

double sample_mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_se(const std::vector<double>& xs) {
  const double m = sample_mean(xs);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - m) * (x - m);
  s2 /= static_cast<double>(xs.size() - 1);
  return std::sqrt(s2 / static_cast<double>(xs.size()));
}

}  // namespace

TEST_CASE("gig density normalizes to one across orders and rates") {
  // includes very negative orders and a rate pair pushing the mass to ~1e-10
  const double nus[] = {-99.0, -0.99, -0.5, 0.5, 2.0};
  const double gammas[] = {0.1, 1.0, 10.0};
  const double xis[] = {1e-8, 0.1, 1.0, 10.0};
  for (double nu : nus) {
    for (double g : gammas) {
      for (double xi : xis) {
        const GigParams p{nu, g, xi};
        REQUIRE(p.valid());
        const double z =
            integrate_positive([&](double x) { return std::exp(gig_log_density(x, p)); });
        CAPTURE(nu);
        CAPTURE(g);
        CAPTURE(xi);
        CHECK(std::fabs(z - 1.0) < 1e-6);
      }
    }
  }
}

TEST_CASE("gig mean matches the Bessel-ratio closed form") {
  // frozen against 40-digit reference evaluations of sqrt(xi/gamma) K_{nu+1}/K_nu
  CHECK(gig_mean({-0.5, 4.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(gig_mean({-0.5, 1.0, 2.0}) == doctest::Approx(1.414213562373095).epsilon(1e-12));
  CHECK(gig_mean({-0.5, 1.0, 4.0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gig_mean({-1.5, 1.0, 28.2}) == doctest::Approx(4.4688366019899919).epsilon(1e-12));
  CHECK(gig_mean({-1.5, 1.0, 14.1}) == doctest::Approx(2.9653017605009478).epsilon(1e-12));
  CHECK(gig_mean({-99.0, 1.0, 2e-3}) == doctest::Approx(1.020408109593517e-5).epsilon(1e-10));
}

TEST_CASE("gig sampler mean agrees with the closed form, including nu = -99") {
  const GigParams cases[] = {
      {-0.5, 1.0, 2.0}, {2.0, 3.0, 0.5}, {-1.5, 1.0, 28.2}, {-99.0, 1.0, 2e-3}};
  std::uint64_t stream = 100;
  for (const auto& p : cases) {
    const auto xs =
        draw_many(200000, stream++, [&](RngStream& r) { return gig_sample(p, r); });
    const double se = sample_se(xs);
    CAPTURE(p.nu);
    CHECK(std::fabs(sample_mean(xs) - gig_mean(p)) < 4.0 * se);
    CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
  }
}

TEST_CASE("gig degenerates to gamma when xi = 0") {
  const auto gig = draw_many(
      40000, 7, [&](RngStream& r) { return gig_sample({1.7, 3.0, 0.0}, r); });
  const auto gam =
      draw_many(40000, 8, [&](RngStream& r) { return gamma_sample(1.7, 1.5, r); });
  const auto ks = ks_two_sample(gig, gam);
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("gig degenerates to reciprocal gamma when gamma = 0") {
  const auto gig = draw_many(
      40000, 9, [&](RngStream& r) { return gig_sample({-2.3, 0.0, 5.0}, r); });
  const auto inv = draw_many(
      40000, 10, [&](RngStream& r) { return 1.0 / gamma_sample(2.3, 2.5, r); });
  const auto ks = ks_two_sample(gig, inv);
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("gig scaling: c X ~ GiG(nu, gamma/c, c xi)") {
  const double c = 3.7;
  auto scaled = draw_many(
      40000, 11, [&](RngStream& r) { return c * gig_sample({-0.8, 2.0, 1.3}, r); });
  const auto direct = draw_many(
      40000, 12, [&](RngStream& r) { return gig_sample({-0.8, 2.0 / c, c * 1.3}, r); });
  const auto ks = ks_two_sample(scaled, direct);
  CHECK(ks.p_value > 0.001);
}

TEST_CASE("gig log density matches the kernel up to the frozen constant") {
  // density ratio depends only on the kernel; spot-check against direct arithmetic
  const GigParams p{-0.5, 1.0, 2.0};
  const double x1 = 0.7, x2 = 1.9;
  const double lhs = gig_log_density(x1, p) - gig_log_density(x2, p);
  const double rhs =
      (p.nu - 1.0) * std::log(x1 / x2) - 0.5 * (p.gamma_rate * (x1 - x2) + p.xi * (1.0 / x1 - 1.0 / x2));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gig rejects invalid parameters") {
  CHECK_FALSE(GigParams{-0.5, 1.0, -1.0}.valid());
  CHECK_FALSE(GigParams{-0.5, 0.0, 0.0}.valid());
  CHECK_FALSE(GigParams{0.5, 0.0, 1.0}.valid());   // gamma = 0 needs nu < 0
  CHECK_FALSE(GigParams{-0.5, 1.0, 0.0}.valid());  // xi = 0 needs nu > 0
  CHECK_THROWS_AS(gig_log_density(-1.0, GigParams{-0.5, 1.0, 2.0}), std::domain_error);
}

TEST_CASE("inverse gaussian moments and density normalization") {
  const InvGaussParams p{2.5, 4.0};
  const auto xs =
      draw_many(200000, 13, [&](RngStream& r) { return invgauss_sample(p, r); });
  CHECK(std::fabs(sample_mean(xs) - p.mu) < 4.0 * sample_se(xs));
  std::vector<double> inv(xs.size());
  std::transform(xs.begin(), xs.end(), inv.begin(), [](double x) { return 1.0 / x; });
  const double recip_mean = 1.0 / p.mu + 1.0 / p.lambda;
  CHECK(std::fabs(sample_mean(inv) - recip_mean) < 4.0 * sample_se(inv));
  const double z =
      integrate_positive([&](double x) { return std::exp(invgauss_log_density(x, p)); });
  CHECK(std::fabs(z - 1.0) < 1e-8);
}

TEST_CASE("inverse gaussian stays stable when mu >> lambda") {
  const InvGaussParams p{1e12, 1.0};
  RngStream rng(5, 5);
  for (int i = 0; i < 10000; ++i) {
    const double x = invgauss_sample(p, rng);
    CHECK(x > 0.0);
    CHECK(std::isfinite(x));
  }
}

TEST_CASE("gamma sampler handles shape below one and never returns zero") {
  const double shape = 0.01, rate = 0.5;
  const auto xs = draw_many(
      200000, 14, [&](RngStream& r) { return gamma_sample(shape, rate, r); });
  CHECK(*std::min_element(xs.begin(), xs.end()) > 0.0);
  CHECK(std::fabs(sample_mean(xs) - shape / rate) < 4.0 * sample_se(xs));
}

TEST_CASE("dirichlet draws live on the simplex with the right mean") {
  const std::vector<double> conc{0.2, 1.0, 3.5};
  RngStream rng(21, 21);
  std::vector<double> mean(3, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto w = dirichlet_sample(conc, rng);
    double s = 0.0;
    for (double wi : w) {
      CHECK(wi > 0.0);
      s += wi;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 3; ++j) mean[j] += w[j];
  }
  const double total = conc[0] + conc[1] + conc[2];
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(mean[j] / n - conc[j] / total) < 0.005);
  }
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, 1), b(42, 1), c(42, 2);
  bool all_equal = true, any_equal_c = false;
  for (int i = 0; i < 1000; ++i) {
    const auto xa = a.next_u64();
    all_equal = all_equal && (xa == b.next_u64());
    any_equal_c = any_equal_c || (xa == c.next_u64());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_c);
}

TEST_CASE("clamp diagnostics count and reset") {
  clamp_diagnostics().reset();
  note_xi_clamp();
  note_xi_clamp();
  note_mean_cap();
  CHECK(clamp_diagnostics().xi_clamps() == 2);
  CHECK(clamp_diagnostics().mean_caps() == 1);
  clamp_diagnostics().reset();
  CHECK(clamp_diagnostics().xi_clamps() == 0);
}
