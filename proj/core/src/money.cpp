#include "decarb/money.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace decarb {

Cents round_cents(double cents) {
  if (!std::isfinite(cents)) throw std::domain_error("round_cents: non-finite amount");
  const double floor_value = std::floor(cents);
  const double frac = cents - floor_value;
  auto result = static_cast<Cents>(floor_value);
  if (frac > 0.5) {
    ++result;
  } else if (frac == 0.5 && (result % 2 != 0)) {
    ++result;
  }
  return result;
}

namespace {
__extension__ using Wide = __int128;
}  // namespace

void allocate_cents(Cents total, std::span<const std::int64_t> weights, std::span<Cents> shares) {
  if (total < 0) throw std::invalid_argument("allocate_cents: negative total");
  if (shares.size() != weights.size()) throw std::invalid_argument("allocate_cents: size mismatch");
  std::fill(shares.begin(), shares.end(), 0);
  if (total == 0) return;
  if (weights.empty()) throw std::invalid_argument("allocate_cents: no recipients");
  Wide weight_sum = 0;
  for (auto w : weights) {
    if (w < 0) throw std::invalid_argument("allocate_cents: negative weight");
    weight_sum += w;
  }
  if (weight_sum == 0) {
    const auto n = static_cast<Cents>(weights.size());
    const Cents each = total / n;
    const Cents rest = total % n;
    for (std::size_t i = 0; i < shares.size(); ++i) shares[i] = each + (static_cast<Cents>(i) < rest ? 1 : 0);
    return;
  }
  Cents assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    shares[i] = static_cast<Cents>(static_cast<Wide>(total) * weights[i] / weight_sum);
    assigned += shares[i];
  }
  Cents rest = total - assigned;
  // rest < number of positive-weight recipients, so one pass suffices.
  for (std::size_t i = 0; i < weights.size() && rest > 0; ++i) {
    if (weights[i] > 0) {
      ++shares[i];
      --rest;
    }
  }
}

std::vector<Cents> allocate_cents(Cents total, std::span<const std::int64_t> weights) {
  std::vector<Cents> shares(weights.size(), 0);
  allocate_cents(total, weights, shares);
  return shares;
}

std::vector<std::int64_t> integer_weights(std::span<const double> values) {
  double max_value = 0.0;
  for (double v : values) max_value = std::max(max_value, v);
  std::vector<std::int64_t> weights(values.size(), 0);
  if (max_value <= 0.0) return weights;
  // Scale the largest weight to 2^52 so relative precision is kept.
  const double scale = 4503599627370496.0 / max_value;
  for (std::size_t i = 0; i < values.size(); ++i) {
    weights[i] = values[i] > 0.0 ? static_cast<std::int64_t>(std::llround(values[i] * scale)) : 0;
  }
  return weights;
}

}  // namespace decarb
