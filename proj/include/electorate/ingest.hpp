#pragma once
// Follower-ID ingestion from a paged source. The live 2016 endpoints are
// gone, so the transport is an interface with exactly one method; fixture
// directories are the canonical backend and a network client can be added
// without touching callers.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "electorate/clock.hpp"
#include "electorate/snapshot.hpp"

namespace electorate::ingest {

using snap::UserId;

struct Page {
    std::vector<UserId> ids;
    std::optional<std::string> next_token;  // nullopt = last page
};

// One fetch job per source at a time; cursor state lives in the caller.
class PageSource {
public:
    virtual ~PageSource() = default;
    // token "" requests the first page.
    virtual Page get_page(const std::string& token) = 0;
    virtual std::string source_id() const = 0;
};

struct SourceUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedPage : std::runtime_error {
    std::uint64_t page_index;
    MalformedPage(std::uint64_t index, const std::string& what)
        : std::runtime_error("malformed page " + std::to_string(index) + ": " + what),
          page_index(index) {}
};

struct FetchOptions {
    // Max requests in any rolling 60 s window; 0 = unlimited.
    std::uint32_t rate_limit = 0;
    // Transient-failure retries per page, exponential backoff 1s/2s/4s.
    int max_retries = 3;
};

// All IDs from all pages in arrival order; duplicates across page boundaries
// are preserved at this layer. Paces requests against `clock` per the rate
// limit and retries SourceUnavailable with bounded backoff before giving up.
std::vector<UserId> fetch_all_ids(PageSource& source, const FetchOptions& options, Clock& clock);

// Sorted deduplication of fetch_all_ids, tagged with candidate and timestamp.
snap::Snapshot capture_snapshot(PageSource& source, const FetchOptions& options, Clock& clock,
                                const std::string& candidate, std::int64_t captured_at);

// Reads pages from `<dir>/<source_id>.page<k>.txt`, k from 0: one decimal ID
// per line. A missing page-0 file reads as source unavailable; an existing
// empty file is an empty source.
class FixtureSource final : public PageSource {
public:
    FixtureSource(std::filesystem::path dir, std::string source_id);
    Page get_page(const std::string& token) override;
    std::string source_id() const override { return source_id_; }

private:
    std::filesystem::path page_path(std::uint64_t k) const;
    std::filesystem::path dir_;
    std::string source_id_;
};

// Fixture root from ELECTORATE_FIXTURE_DIR; empty when unset.
std::filesystem::path fixture_dir_from_env();

}  // namespace electorate::ingest
