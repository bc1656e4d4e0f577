#include "electorate/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <deque>
#include <fstream>

namespace electorate::ingest {
namespace {

constexpr std::int64_t kWindowMs = 60'000;

// Blocks (via the clock) until one more request fits in the rolling window.
class RollingLimiter {
public:
    RollingLimiter(std::uint32_t limit, Clock& clock) : limit_(limit), clock_(clock) {}

    void admit() {
        if (limit_ == 0) return;
        prune();
        if (sent_.size() >= limit_) {
            const std::int64_t wake = sent_.front() + kWindowMs;
            clock_.sleep_ms(wake - clock_.now_ms());
            prune();
        }
        sent_.push_back(clock_.now_ms());
    }

private:
    void prune() {
        const std::int64_t cutoff = clock_.now_ms() - kWindowMs;
        while (!sent_.empty() && sent_.front() <= cutoff) sent_.pop_front();
    }

    std::uint32_t limit_;
    Clock& clock_;
    std::deque<std::int64_t> sent_;
};

Page fetch_page_with_retry(PageSource& source, const std::string& token, const FetchOptions& options,
                           Clock& clock, RollingLimiter& limiter) {
    std::int64_t backoff_ms = 1'000;
    for (int attempt = 0;; ++attempt) {
        try {
            limiter.admit();
            return source.get_page(token);
        } catch (const SourceUnavailable&) {
            if (attempt >= options.max_retries) throw;
            clock.sleep_ms(backoff_ms);
            backoff_ms *= 2;
        }
    }
}

}  // namespace

std::vector<UserId> fetch_all_ids(PageSource& source, const FetchOptions& options, Clock& clock) {
    RollingLimiter limiter(options.rate_limit, clock);
    std::vector<UserId> ids;
    std::string token;  // "" = first page; tokens are never revisited
    for (;;) {
        const Page page = fetch_page_with_retry(source, token, options, clock, limiter);
        ids.insert(ids.end(), page.ids.begin(), page.ids.end());
        if (!page.next_token) return ids;
        token = *page.next_token;
    }
}

snap::Snapshot capture_snapshot(PageSource& source, const FetchOptions& options, Clock& clock,
                                const std::string& candidate, std::int64_t captured_at) {
    snap::Snapshot s;
    s.candidate = candidate;
    s.captured_at = captured_at;
    s.ids = fetch_all_ids(source, options, clock);
    std::sort(s.ids.begin(), s.ids.end());
    s.ids.erase(std::unique(s.ids.begin(), s.ids.end()), s.ids.end());
    return s;
}

FixtureSource::FixtureSource(std::filesystem::path dir, std::string source_id)
    : dir_(std::move(dir)), source_id_(std::move(source_id)) {}

std::filesystem::path FixtureSource::page_path(std::uint64_t k) const {
    return dir_ / (source_id_ + ".page" + std::to_string(k) + ".txt");
}

Page FixtureSource::get_page(const std::string& token) {
    std::uint64_t k = 0;
    if (!token.empty()) {
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), k);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw std::invalid_argument("fixture source: bad page token '" + token + "'");
    }

    const auto path = page_path(k);
    std::ifstream in(path);
    if (!in)
        throw SourceUnavailable("fixture source: cannot open " + path.string());

    Page page;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        UserId id = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), id);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw MalformedPage(k, path.string() + ":" + std::to_string(line_no) + " '" + line + "'");
        page.ids.push_back(id);
    }
    if (std::filesystem::exists(page_path(k + 1))) page.next_token = std::to_string(k + 1);
    return page;
}

std::filesystem::path fixture_dir_from_env() {
    const char* dir = std::getenv("ELECTORATE_FIXTURE_DIR");
    return dir ? std::filesystem::path(dir) : std::filesystem::path();
}

}  // namespace electorate::ingest
