#pragma once

#include <chrono>
#include <mutex>

namespace citeimpact {

// Token bucket shared by every request to one service. A non-positive rate
// disables limiting.
class TokenBucket {
public:
    using clock = std::chrono::steady_clock;

    explicit TokenBucket(double requests_per_second = 1.0, double burst = 1.0);

    // Blocks until one token is available, then consumes it.
    void acquire();

    double rate() const noexcept { return rate_; }

private:
    double rate_;
    double burst_;
    double tokens_;
    clock::time_point last_;
    std::mutex mutex_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{500}; // doubled after each failed attempt
};

} // namespace citeimpact
