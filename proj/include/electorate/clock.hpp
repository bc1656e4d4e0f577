#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace electorate {

// Time source for rate limiting and retry backoff. Jobs get their own clock
// instance; VirtualClock makes the pacing logic testable without waiting.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
    void sleep_ms(std::int64_t ms) override {
        if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
};

class VirtualClock final : public Clock {
public:
    explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
    std::int64_t now_ms() override { return now_; }
    void sleep_ms(std::int64_t ms) override {
        if (ms > 0) now_ += ms;
    }

private:
    std::int64_t now_;
};

}  // namespace electorate
