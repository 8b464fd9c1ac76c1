#include "citeimpact/rate_limit.hpp"

#include <algorithm>
#include <thread>

namespace citeimpact {

TokenBucket::TokenBucket(double requests_per_second, double burst)
    : rate_(requests_per_second), burst_(std::max(1.0, burst)), tokens_(burst_), last_(clock::now()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = clock::now();
        const std::chrono::duration<double> elapsed = now - last_;
        tokens_ = std::min(burst_, tokens_ + elapsed.count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const std::chrono::duration<double> wait((1.0 - tokens_) / rate_);
        std::this_thread::sleep_for(wait);
    }
}

} // namespace citeimpact
