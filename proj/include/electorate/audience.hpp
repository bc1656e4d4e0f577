#pragma once
// Set analytics over snapshots: membership, the four-group partition of one
// account's followers by cross-following, and unfollower destination rates.
// Everything here is pure over immutable snapshots.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "electorate/snapshot.hpp"

namespace electorate::audience {

using snap::Snapshot;
using snap::UserId;

// Binary search over the sorted id vector, O(log n).
bool contains(const Snapshot& s, UserId id) noexcept;

// Sorted intersection of two sorted id sequences. Iterates the smaller side
// with binary search into the larger when their sizes differ by more than
// 32x, otherwise a plain merge pass.
std::vector<UserId> intersect(std::span<const UserId> a, std::span<const UserId> b);

// Each focal follower lands in exactly one group depending on whether it also
// appears in snapshots a and b. Groups are sorted; together they cover focal.
struct GroupPartition {
    std::vector<UserId> a_only;
    std::vector<UserId> b_only;
    std::vector<UserId> both;
    std::vector<UserId> focal_only;
};

GroupPartition partition_groups(const Snapshot& focal, const Snapshot& a, const Snapshot& b);

// Fraction of the cohort present in each destination snapshot, in input
// order. Fractions are independent (multi-following allowed) and an empty
// cohort yields rate 0 for every destination.
using NamedSnapshot = std::pair<std::string, const Snapshot*>;

struct DestinationRate {
    std::string destination;
    std::uint64_t overlap = 0;
    double rate = 0.0;
};

std::vector<DestinationRate> destination_rates(std::span<const UserId> cohort,
                                               std::span<const NamedSnapshot> destinations);

}  // namespace electorate::audience
