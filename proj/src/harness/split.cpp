#include "ximp/harness/split.hpp"

#include <algorithm>
#include <map>

#include "ximp/chem/reductions.hpp"
#include "ximp/errors.hpp"
#include "ximp/rng.hpp"

namespace ximp::harness {

std::vector<int> SplitPlan::cv_pool() const {
    std::vector<int> out;
    for (const auto& fold : folds) out.insert(out.end(), fold.begin(), fold.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> SplitPlan::train_indices(int held_out_fold) const {
    std::vector<int> out;
    for (size_t f = 0; f < folds.size(); ++f) {
        if (static_cast<int>(f) == held_out_fold) continue;
        out.insert(out.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

SplitPlan make_split(const Dataset& ds, uint64_t seed) {
    const int n = ds.size();
    SplitPlan plan;
    plan.seed = seed;
    if (n < plan.bin_count)
        throw TooFewRecords("need at least " + std::to_string(plan.bin_count) +
                            " records, have " + std::to_string(n));

    // scaffold groups, largest first
    std::map<std::string, std::vector<int>> groups;
    for (int i = 0; i < n; ++i)
        groups[chem::murcko_scaffold(ds.records[i].graph)].push_back(i);
    std::vector<std::pair<std::string, std::vector<int>>> ordered(groups.begin(),
                                                                  groups.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
        return a.first < b.first;
    });

    const int want = (n + 9) / 10;  // at least 10%
    std::vector<bool> in_test(n, false);
    int assigned = 0;
    for (const auto& [key, members] : ordered) {
        if (assigned >= want) break;
        for (int i : members) in_test[i] = true;
        assigned += static_cast<int>(members.size());
    }
    if (assigned >= n)
        throw DegenerateSplit("scaffold holdout would consume the whole dataset");
    for (int i = 0; i < n; ++i)
        if (in_test[i]) plan.test_indices.push_back(i);

    std::vector<int> pool;
    for (int i = 0; i < n; ++i)
        if (!in_test[i]) pool.push_back(i);
    if (static_cast<int>(pool.size()) < plan.bin_count)
        throw TooFewRecords("only " + std::to_string(pool.size()) +
                            " records left after the scaffold holdout");

    // equal-frequency binning by target rank, stable on ties by record index
    std::sort(pool.begin(), pool.end(), [&](int a, int b) {
        if (ds.records[a].target != ds.records[b].target)
            return ds.records[a].target < ds.records[b].target;
        return a < b;
    });
    plan.bin_of.assign(n, -1);
    const int m = static_cast<int>(pool.size());
    std::vector<std::vector<int>> bins(plan.bin_count);
    for (int rank = 0; rank < m; ++rank) {
        int b = std::min(rank * plan.bin_count / m, plan.bin_count - 1);
        bins[b].push_back(pool[rank]);
        plan.bin_of[pool[rank]] = b;
    }

    plan.folds.assign(10, {});
    for (int b = 0; b < plan.bin_count; ++b) {
        Rng rng = Rng::derive(seed, static_cast<uint64_t>(b) + 1);
        rng.shuffle(bins[b]);
        for (size_t j = 0; j < bins[b].size(); ++j)
            plan.folds[(b + static_cast<int>(j)) % 10].push_back(bins[b][j]);
    }
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

}  // namespace ximp::harness
