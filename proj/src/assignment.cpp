#include "diarkit/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diarkit/error.hpp"

namespace diarkit {

namespace {

// Minimum-cost perfect assignment on an n x n matrix (1-based potentials
// formulation). Returns the optimal total cost.
double hungarian_min_cost(std::size_t n, const std::vector<double>& cost) {
  if (n == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    total += cost[(p[j] - 1) * n + (j - 1)];
  }
  return total;
}

// Optimal value restricted to the given rows/cols.
double restricted_value(const WeightMatrix& w, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  const std::size_t n = std::max(rows.size(), cols.size());
  if (rows.empty() || cols.empty()) return 0.0;
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      cost[i * n + j] = -w.at(rows[i], cols[j]);
    }
  }
  return -hungarian_min_cost(n, cost);
}

void check(const WeightMatrix& w) {
  if (w.values.size() != w.rows * w.cols) {
    throw Error(Errc::InvalidArgument, "weight matrix storage does not match its shape");
  }
  for (double x : w.values) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(Errc::InvalidArgument, "assignment weights must be finite and non-negative");
    }
  }
}

}  // namespace

double max_weight_assignment_value(const WeightMatrix& weights) {
  check(weights);
  std::vector<std::size_t> rows(weights.rows), cols(weights.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return restricted_value(weights, rows, cols);
}

std::vector<int> max_weight_assignment(const WeightMatrix& weights) {
  const double best = max_weight_assignment_value(weights);
  const double tol = 1e-9 * std::max(1.0, best);

  std::vector<int> result(weights.rows, kUnassigned);
  std::vector<char> col_used(weights.cols, 0);
  double fixed = 0.0;

  // Greedy row-by-row commitment: each row takes the smallest column that
  // still admits an optimal completion of the remaining rows.
  for (std::size_t r = 0; r < weights.rows; ++r) {
    std::vector<std::size_t> rest_rows;
    for (std::size_t rr = r + 1; rr < weights.rows; ++rr) rest_rows.push_back(rr);
    for (std::size_t c = 0; c < weights.cols; ++c) {
      if (col_used[c] || !(weights.at(r, c) > 0.0)) continue;
      std::vector<std::size_t> rest_cols;
      for (std::size_t cc = 0; cc < weights.cols; ++cc) {
        if (!col_used[cc] && cc != c) rest_cols.push_back(cc);
      }
      const double total = fixed + weights.at(r, c) + restricted_value(weights, rest_rows, rest_cols);
      if (total >= best - tol) {
        result[r] = static_cast<int>(c);
        col_used[c] = 1;
        fixed += weights.at(r, c);
        break;
      }
    }
  }
  return result;
}

}  // namespace diarkit
