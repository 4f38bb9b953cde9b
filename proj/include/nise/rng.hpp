#pragma once

#include <cstdint>

namespace nise {

// Counter-based generator: draw i of stream (seed, stream) is a pure function
// of (seed, stream, i), so substreams can be consumed in any order or on any
// thread with identical results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double next_uniform();

  // Standard normal via the inverse CDF, keeping the draw count per variate
  // fixed at one so streams stay aligned.
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Inverse standard-normal CDF (Acklam's rational approximation, |relative
// error| < 1.2e-9). Exposed for tests.
double inverse_normal_cdf(double p);

}  // namespace nise
