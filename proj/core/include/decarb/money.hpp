#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace decarb {

/// Currency is carried as signed integer cents everywhere money moves.
using Cents = std::int64_t;

/// Round a real-valued amount of cents to the nearest cent, ties to even.
Cents round_cents(double cents);

/// Convert major currency units (e.g. pounds) to cents, ties to even.
inline Cents to_cents(double major) { return round_cents(major * 100.0); }

inline double to_major(Cents cents) { return static_cast<double>(cents) / 100.0; }

/// Split `total` (>= 0) across recipients in proportion to non-negative
/// integer weights. Each share is floor(total * w / W); the leftover cents go
/// one each to the lowest-index recipients with positive weight. The shares
/// always sum to `total`. With all-zero weights the split is uniform.
std::vector<Cents> allocate_cents(Cents total, std::span<const std::int64_t> weights);
/// Same split written into `out` (must match weights in size).
void allocate_cents(Cents total, std::span<const std::int64_t> weights, std::span<Cents> out);

/// Proportional weights for allocate_cents from real-valued magnitudes.
std::vector<std::int64_t> integer_weights(std::span<const double> values);

}  // namespace decarb
