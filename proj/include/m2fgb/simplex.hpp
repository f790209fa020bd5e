#pragma once

#include <span>
#include <vector>

namespace m2fgb {

/// Euclidean projection onto {w >= 0, ||w||_1 = lambda}.
/// Sort-then-threshold: w_i = max(v_i - tau, 0) for the unique tau with
/// sum_i max(v_i - tau, 0) = lambda. lambda = 0 returns the zero vector.
std::vector<double> project_scaled_simplex(std::span<const double> v, double lambda);

}  // namespace m2fgb
