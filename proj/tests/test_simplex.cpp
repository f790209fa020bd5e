#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "m2fgb/error.hpp"
#include "m2fgb/simplex.hpp"

using namespace m2fgb;

namespace {

// independent reference: bisection on tau over sum_i max(v_i - tau, 0) = lambda
std::vector<double> project_by_bisection(const std::vector<double>& v, double lambda) {
  double lo = *std::min_element(v.begin(), v.end()) - lambda - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  auto mass = [&](double tau) {
    double s = 0.0;
    for (double x : v) s += std::max(x - tau, 0.0);
    return s;
  };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mass(mid) > lambda)
      lo = mid;
    else
      hi = mid;
  }
  double tau = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

}  // namespace

TEST_CASE("symmetric shift") {
  auto w = project_scaled_simplex(std::vector<double>{0.25, 0.25}, 1.0);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("points already on the simplex are fixed") {
  auto w = project_scaled_simplex(std::vector<double>{0.3, 0.7}, 1.0);
  CHECK(w[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("partial support, verified against bisection") {
  std::vector<double> v{1.0, 0.2, -0.1};
  auto w = project_scaled_simplex(v, 1.0);
  CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(w[1] == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(w[2] == 0.0);
  auto ref = project_by_bisection(v, 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("lambda zero collapses to the zero vector") {
  auto w = project_scaled_simplex(std::vector<double>{3.0, -2.0}, 0.0);
  CHECK(w == std::vector<double>{0.0, 0.0});
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(project_scaled_simplex(std::vector<double>{}, 1.0), DataError);
  CHECK_THROWS_AS(project_scaled_simplex(std::vector<double>{1.0}, -0.5), DataError);
  CHECK_THROWS_AS(project_scaled_simplex(std::vector<double>{std::nan("")}, 1.0), DataError);
}

TEST_CASE("random vectors match the bisection reference, plus invariants") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_int_distribution<int> dim(2, 64);
  const double lambdas[] = {0.1, 0.5, 1.0};
  for (int trial = 0; trial < 300; ++trial) {
    int d = dim(rng);
    std::vector<double> v(static_cast<std::size_t>(d));
    for (double& x : v) x = entry(rng);
    double lambda = lambdas[trial % 3];

    auto w = project_scaled_simplex(v, lambda);
    auto ref = project_by_bisection(v, lambda);
    double l1 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(w[i] >= 0.0);
      CHECK(std::abs(w[i] - ref[i]) < 1e-9);
      l1 += w[i];
    }
    CHECK(std::abs(l1 - lambda) < 1e-12);

    // idempotence (up to threshold roundoff)
    auto w2 = project_scaled_simplex(w, lambda);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(w2[i] - w[i]) < 1e-12);

    // order preservation
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[i] >= v[j]) CHECK(w[i] >= w[j]);
      }
    }

    // shift invariance
    std::vector<double> shifted(v);
    for (double& x : shifted) x += 1.7;
    auto ws = project_scaled_simplex(shifted, lambda);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(ws[i] - w[i]) < 1e-12);
  }
}
