#include "aprifire/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace aprifire {

namespace {

constexpr std::size_t kMaxOracleItems = 20;

struct MaskedDatabase {
    std::vector<ItemId> used;             // ascending; bit i <-> used[i]
    std::vector<std::uint32_t> tx_masks;  // one mask per transaction
};

MaskedDatabase build_masks(const TransactionDatabase& db) {
    std::map<ItemId, std::size_t> bit_of;
    MaskedDatabase out;
    for (const Transaction& t : db.transactions) {
        for (ItemId id : t.items.items()) {
            bit_of.emplace(id, 0);
        }
    }
    if (bit_of.size() > kMaxOracleItems) {
        throw TooManyItemsError("oracle bound exceeded: " +
                                std::to_string(bit_of.size()) +
                                " distinct items, max " +
                                std::to_string(kMaxOracleItems));
    }
    std::size_t next = 0;
    for (auto& [id, bit] : bit_of) {
        bit = next++;
        out.used.push_back(id);
    }
    out.tx_masks.reserve(db.transactions.size());
    for (const Transaction& t : db.transactions) {
        std::uint32_t mask = 0;
        for (ItemId id : t.items.items()) {
            mask |= 1u << bit_of[id];
        }
        out.tx_masks.push_back(mask);
    }
    return out;
}

std::vector<std::uint64_t> count_all_masks(const MaskedDatabase& masked) {
    std::size_t m = masked.used.size();
    std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
    for (std::uint32_t set = 0; set < counts.size(); ++set) {
        std::uint64_t count = 0;
        for (std::uint32_t tx : masked.tx_masks) {
            if ((tx & set) == set) ++count;
        }
        counts[set] = count;
    }
    return counts;
}

Itemset itemset_from_mask(std::uint32_t mask,
                          const std::vector<ItemId>& used) {
    std::vector<ItemId> ids;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (mask & (1u << i)) ids.push_back(used[i]);
    }
    return Itemset::from_sorted(std::move(ids));
}

}  // namespace

std::vector<FrequentItemset> brute_force_frequent_itemsets(
    const TransactionDatabase& db, std::uint64_t min_count) {
    MaskedDatabase masked = build_masks(db);
    std::vector<std::uint64_t> counts = count_all_masks(masked);
    min_count = std::max<std::uint64_t>(min_count, 1);

    std::vector<FrequentItemset> out;
    for (std::uint32_t set = 1; set < counts.size(); ++set) {
        if (counts[set] >= min_count) {
            out.push_back({itemset_from_mask(set, masked.used), counts[set],
                           static_cast<double>(counts[set]) /
                               static_cast<double>(db.size())});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const FrequentItemset& a, const FrequentItemset& b) {
                  if (a.itemset.size() != b.itemset.size()) {
                      return a.itemset.size() < b.itemset.size();
                  }
                  return a.itemset < b.itemset;
              });
    return out;
}

std::vector<AssociationRule> brute_force_rules(const TransactionDatabase& db,
                                               std::uint64_t min_count,
                                               double min_confidence) {
    MaskedDatabase masked = build_masks(db);
    std::vector<std::uint64_t> counts = count_all_masks(masked);
    min_count = std::max<std::uint64_t>(min_count, 1);

    std::vector<AssociationRule> rules;
    for (std::uint32_t whole = 1; whole < counts.size(); ++whole) {
        if (std::popcount(whole) < 2) continue;
        if (counts[whole] < min_count) continue;
        // all nonempty proper submasks as antecedents
        for (std::uint32_t left = (whole - 1) & whole; left != 0;
             left = (left - 1) & whole) {
            double conf = static_cast<double>(counts[whole]) /
                          static_cast<double>(counts[left]);
            if (conf >= min_confidence) {
                rules.push_back({itemset_from_mask(left, masked.used),
                                 itemset_from_mask(whole ^ left, masked.used),
                                 counts[whole],
                                 static_cast<double>(counts[whole]) /
                                     static_cast<double>(db.size()),
                                 conf});
            }
        }
    }
    std::sort(rules.begin(), rules.end(),
              [](const AssociationRule& a, const AssociationRule& b) {
                  if (a.antecedent != b.antecedent) {
                      return a.antecedent < b.antecedent;
                  }
                  return a.consequent < b.consequent;
              });
    return rules;
}

}  // namespace aprifire
