#pragma once
// Follower-ID snapshots and diffs between two captures of the same account.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace electorate::snap {

using UserId = std::uint64_t;

// A candidate's follower-ID set at one instant. `ids` is strictly increasing
// (sorted, deduplicated). Immutable after construction; safe to share across
// threads for reads.
struct Snapshot {
    std::string candidate;
    std::int64_t captured_at = 0;  // UTC epoch seconds
    std::vector<UserId> ids;
};

struct DiffResult {
    std::vector<UserId> new_followers;  // in newer, not in older
    std::vector<UserId> unfollowers;    // in older, not in newer
    std::int64_t net_gain = 0;          // count(new) - count(unfollowers)
};

bool is_strictly_sorted(const std::vector<UserId>& ids) noexcept;

// Throws std::invalid_argument when `ids` violates the sortedness invariant.
void validate(const Snapshot& s);

// Single merge pass, O(|older| + |newer|).
// Throws std::invalid_argument on candidate mismatch or when
// older.captured_at >= newer.captured_at (equal timestamps are ambiguous).
DiffResult diff(const Snapshot& older, const Snapshot& newer);

// Binary format: magic "ELSS", u16 version, u32 label length + UTF-8 label,
// i64 epoch seconds, u64 count, then the IDs as delta-encoded LEB128 varints.
// All fixed-width fields little-endian. load(save(s)) == s bit-exactly and
// re-saving a loaded snapshot reproduces the file byte for byte.
void save(const Snapshot& s, const std::filesystem::path& path);
Snapshot load(const std::filesystem::path& path);

// Interop mirror: one decimal ID per line.
void export_csv(const Snapshot& s, const std::filesystem::path& path);

}  // namespace electorate::snap
