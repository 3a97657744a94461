#include "toxsearch/backends.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace toxsearch {

namespace {
std::int64_t now_us() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

TokenBucket::TokenBucket(double requests_per_second, double burst)
    : rate_(requests_per_second),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_refill_us_(now_us()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  for (;;) {
    std::int64_t now = now_us();
    tokens_ = std::min(capacity_,
                       tokens_ + rate_ * static_cast<double>(now - last_refill_us_) / 1e6);
    last_refill_us_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

}  // namespace toxsearch
