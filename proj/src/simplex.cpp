#include "m2fgb/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "m2fgb/error.hpp"

namespace m2fgb {

std::vector<double> project_scaled_simplex(std::span<const double> v, double lambda) {
  if (v.empty()) throw DataError("cannot project an empty vector");
  if (lambda < 0.0) throw DataError("simplex scale must be non-negative");
  for (double x : v) {
    if (!std::isfinite(x)) throw DataError("non-finite input to simplex projection");
  }
  if (lambda == 0.0) return std::vector<double>(v.size(), 0.0);

  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  // largest k with sorted[k-1] > (prefix_sum(k) - lambda) / k
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    prefix += sorted[k - 1];
    double candidate = (prefix - lambda) / static_cast<double>(k);
    if (sorted[k - 1] > candidate) tau = candidate;
  }

  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

}  // namespace m2fgb
