#pragma once

#include <cstdint>
#include <vector>

#include "aprifire/apriori.hpp"
#include "aprifire/rules.hpp"

namespace aprifire {

// Exhaustive reference implementations, deliberately independent of the
// level-wise miner: transactions become bitmasks over the used items and
// every nonempty subset is counted directly. Bounded at 20 distinct items
// (2^20 enumeration); TooManyItemsError beyond that.

std::vector<FrequentItemset> brute_force_frequent_itemsets(
    const TransactionDatabase& db, std::uint64_t min_count);

std::vector<AssociationRule> brute_force_rules(const TransactionDatabase& db,
                                               std::uint64_t min_count,
                                               double min_confidence);

}  // namespace aprifire
