#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace wthermo {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(x) + exp(y)) without overflow.
double log_add(double x, double y);

// log(sum exp(v_i)) reduced along a fixed pairwise tree over the given order.
// Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

// log(sum_{i < count} exp(term(i))). The index range is cut into fixed-size
// chunks (independent of the worker count), chunks are evaluated in parallel
// and each chunk, then the chunk totals, are reduced with log_sum_exp. The
// result is bitwise identical for every worker count.
double parallel_log_sum_exp(std::size_t count,
                            const std::function<double(std::size_t)>& term);

inline constexpr std::size_t kLogSumChunk = 4096;

}  // namespace wthermo
