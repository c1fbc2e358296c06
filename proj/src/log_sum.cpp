#include "wthermo/log_sum.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wthermo/parallel.hpp"

namespace wthermo {

double log_add(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) {
  switch (values.size()) {
    case 0:
      return kNegInf;
    case 1:
      return values[0];
    case 2:
      return log_add(values[0], values[1]);
    default:
      break;
  }
  const std::size_t mid = values.size() / 2;
  return log_add(log_sum_exp(values.first(mid)), log_sum_exp(values.subspan(mid)));
}

double parallel_log_sum_exp(std::size_t count,
                            const std::function<double(std::size_t)>& term) {
  if (count == 0) return kNegInf;
  const std::size_t chunks = (count + kLogSumChunk - 1) / kLogSumChunk;
  std::vector<double> partial(chunks, kNegInf);
  auto reduce_chunk = [&](std::size_t c) {
    const std::size_t begin = c * kLogSumChunk;
    const std::size_t end = std::min(count, begin + kLogSumChunk);
    std::vector<double> buf(end - begin);
    for (std::size_t i = begin; i < end; ++i) buf[i - begin] = term(i);
    partial[c] = log_sum_exp(buf);
  };
  if (chunks == 1) {
    reduce_chunk(0);
  } else {
    parallel_for(chunks, [&](std::size_t b, std::size_t e) {
      for (std::size_t c = b; c < e; ++c) reduce_chunk(c);
    });
  }
  return log_sum_exp(partial);
}

}  // namespace wthermo
