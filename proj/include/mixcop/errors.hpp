#pragma once

#include <atomic>
#include <stdexcept>
#include <string>

namespace mixcop {

// Error taxonomy used by the CLI to pick exit codes:
// usage -> 2, data -> 3, numerical -> 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counters for recoverable numeric events. They never change results silently
// beyond the documented clamps; runs surface them in the manifest.
struct NumericsDiag {
  std::atomic<long> rectangle_clamped{0};   // alternating sum fell to <= 0
  std::atomic<long> mvn_low_accuracy{0};    // MVN CDF error estimate above tolerance
  std::atomic<long> latent_degenerate{0};   // truncation interval underflowed
  std::atomic<long> latent_zero_ratio{0};   // MH denominator underflowed -> reject

  void reset() {
    rectangle_clamped = 0;
    mvn_low_accuracy = 0;
    latent_degenerate = 0;
    latent_zero_ratio = 0;
  }
};

NumericsDiag& diagnostics();

}  // namespace mixcop
