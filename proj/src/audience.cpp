#include "electorate/audience.hpp"

#include <algorithm>

namespace electorate::audience {

bool contains(const Snapshot& s, UserId id) noexcept {
    return std::binary_search(s.ids.begin(), s.ids.end(), id);
}

std::vector<UserId> intersect(std::span<const UserId> a, std::span<const UserId> b) {
    if (a.size() > b.size()) return intersect(b, a);
    std::vector<UserId> out;
    if (a.empty()) return out;

    if (b.size() / a.size() > 32) {
        // Far apart in size: probe the large side per small element.
        out.reserve(a.size());
        for (UserId id : a)
            if (std::binary_search(b.begin(), b.end(), id)) out.push_back(id);
        return out;
    }
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else {
            out.push_back(a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

GroupPartition partition_groups(const Snapshot& focal, const Snapshot& a, const Snapshot& b) {
    const std::vector<UserId> in_a = intersect(focal.ids, a.ids);
    const std::vector<UserId> in_b = intersect(focal.ids, b.ids);

    GroupPartition p;
    std::size_t ia = 0, ib = 0;
    for (UserId id : focal.ids) {
        while (ia < in_a.size() && in_a[ia] < id) ++ia;
        while (ib < in_b.size() && in_b[ib] < id) ++ib;
        const bool fa = ia < in_a.size() && in_a[ia] == id;
        const bool fb = ib < in_b.size() && in_b[ib] == id;
        if (fa && fb) p.both.push_back(id);
        else if (fa) p.a_only.push_back(id);
        else if (fb) p.b_only.push_back(id);
        else p.focal_only.push_back(id);
    }
    return p;
}

std::vector<DestinationRate> destination_rates(std::span<const UserId> cohort,
                                               std::span<const NamedSnapshot> destinations) {
    std::vector<DestinationRate> out;
    out.reserve(destinations.size());
    for (const auto& [name, snapshot] : destinations) {
        DestinationRate r;
        r.destination = name;
        r.overlap = cohort.empty() ? 0 : intersect(cohort, snapshot->ids).size();
        r.rate = cohort.empty() ? 0.0
                                : static_cast<double>(r.overlap) / static_cast<double>(cohort.size());
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace electorate::audience
