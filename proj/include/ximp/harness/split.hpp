#pragma once

#include <cstdint>
#include <vector>

#include "ximp/harness/dataset.hpp"

namespace ximp::harness {

struct SplitPlan {
    std::vector<int> test_indices;         // scaffold holdout, sorted
    std::vector<std::vector<int>> folds;   // stratified CV folds over the rest
    std::vector<int> bin_of;               // bin per record (-1 for test records)
    int bin_count = 10;
    uint64_t seed = 0;

    std::vector<int> cv_pool() const;                       // all non-test indices
    std::vector<int> train_indices(int held_out_fold) const;
};

// Scaffold groups (largest first, key as tie-break) go to the test set until
// it holds at least 10% of records; the remainder is binned into ten
// equal-frequency target bins and dealt round-robin into ten folds under a
// seeded shuffle.
SplitPlan make_split(const Dataset& ds, uint64_t seed);

}  // namespace ximp::harness
