#pragma once

#include <cstddef>
#include <cstdint>

namespace bincat {

/// Population sizes, states and times. Unsigned 64-bit covers the 2^63 range
/// the model requires; overflow is unreachable at the scales used here.
using Count = std::uint64_t;

/// Value of an infinite sum or product together with the number of terms
/// evaluated and a bound on the neglected remainder.
struct SeriesResult {
  double value = 0.0;
  std::size_t terms_used = 0;
  double error_bound = 0.0;
};

/// Default truncation budget for pmf operations.
inline constexpr double kDefaultTruncation = 1e-12;

/// Default stopping tolerance for series evaluations.
inline constexpr double kDefaultSeriesTol = 1e-14;

}  // namespace bincat
