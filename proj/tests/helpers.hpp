#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "aprifire/event_model.hpp"
#include "aprifire/prng.hpp"

namespace aprifire::testing {

// Builds a database over n abstract items (interned as dst_ip=10.0.0.<k>, so
// item index k maps to ItemId k) from transactions given as index lists.
inline TransactionDatabase make_db(
    std::size_t n_items, const std::vector<std::vector<int>>& transactions) {
    TransactionDatabase db;
    for (std::size_t i = 0; i < n_items; ++i) {
        db.catalog.intern(AttributeKind::DstIp,
                          "10.0.0." + std::to_string(i + 1));
    }
    std::uint64_t tid = 0;
    for (const auto& indices : transactions) {
        std::vector<ItemId> ids;
        for (int index : indices) {
            ids.push_back(ItemId{static_cast<std::uint32_t>(index)});
        }
        db.transactions.push_back({tid++, Itemset::from_unsorted(ids)});
    }
    return db;
}

inline Itemset iset(std::initializer_list<int> indices) {
    std::vector<ItemId> ids;
    for (int index : indices) {
        ids.push_back(ItemId{static_cast<std::uint32_t>(index)});
    }
    return Itemset::from_unsorted(std::move(ids));
}

// The worked 4-transaction database used across the miner and rule tests:
// D = [{a,b}, {a,b,c}, {a,c}, {b,c}] with a=0, b=1, c=2.
inline TransactionDatabase worked_db() {
    return make_db(3, {{0, 1}, {0, 1, 2}, {0, 2}, {1, 2}});
}

// Random database for property tests: up to max_items distinct items, up to
// max_tx transactions, every transaction nonempty.
inline TransactionDatabase random_db(Xoshiro256& rng, std::size_t max_items = 12,
                                     std::size_t max_tx = 200) {
    std::size_t n_items = 1 + rng.next_below(max_items);
    std::size_t n_tx = 1 + rng.next_below(max_tx);
    std::vector<std::vector<int>> transactions;
    transactions.reserve(n_tx);
    for (std::size_t t = 0; t < n_tx; ++t) {
        std::vector<int> indices;
        for (std::size_t i = 0; i < n_items; ++i) {
            if (rng.next_bernoulli(0.35)) {
                indices.push_back(static_cast<int>(i));
            }
        }
        if (indices.empty()) {
            indices.push_back(static_cast<int>(rng.next_below(n_items)));
        }
        transactions.push_back(std::move(indices));
    }
    return make_db(n_items, transactions);
}

}  // namespace aprifire::testing
