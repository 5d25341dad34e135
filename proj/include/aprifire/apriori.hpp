#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aprifire/event_model.hpp"

namespace aprifire {

// Minimum support, either an absolute transaction count or a fraction of the
// database size. Fractions are held in micro-units (1e-6) so the resolution
// to a count is exact integer arithmetic: ceil(fraction * |D|).
class SupportThreshold {
public:
    static SupportThreshold count(std::uint64_t n);
    // fraction must lie in (0, 1]; kept at 6-decimal resolution.
    static SupportThreshold fraction(double f);

    // Smallest admissible support count for a database of `db_size`
    // transactions. Throws EmptyDatabaseError when a fractional threshold is
    // applied to an empty database.
    std::uint64_t resolve(std::size_t db_size) const;

    bool is_fraction() const { return is_fraction_; }
    std::string to_string() const;

    // Parses "0.25" (fraction) or "25c" (absolute count).
    static SupportThreshold parse(const std::string& text);

private:
    SupportThreshold(bool is_fraction, std::uint64_t raw)
        : is_fraction_(is_fraction), raw_(raw) {}

    bool is_fraction_;
    std::uint64_t raw_;  // count, or fraction in micro-units
};

// An itemset together with its exact support over the mined database.
struct FrequentItemset {
    Itemset itemset;
    std::uint64_t support_count = 0;
    double support_fraction = 0.0;

    bool operator==(const FrequentItemset&) const = default;
};

// Size-k candidates with per-candidate counters, arranged as a prefix trie
// over the sorted ItemId sequences so that "all candidates contained in
// transaction t" is one ordered walk instead of per-candidate subset tests.
class CandidateStore {
public:
    // All candidates must have exactly `k` items, k >= 1.
    CandidateStore(std::vector<Itemset> candidates, std::size_t k);

    std::size_t candidate_count() const { return candidates_.size(); }
    std::size_t itemset_size() const { return k_; }

    // Adds 1 to the counter of every candidate contained in the transaction.
    void count_transaction(const Itemset& transaction_items);
    // Merge-in of counters from a partition of the database.
    void absorb_counts(const CandidateStore& other);

    std::uint64_t count_of(std::size_t candidate_index) const {
        return counts_[candidate_index];
    }
    const Itemset& candidate(std::size_t candidate_index) const {
        return candidates_[candidate_index];
    }

    // Candidates whose counter reached `min_count`, with exact counts.
    std::vector<FrequentItemset> threshold(std::uint64_t min_count,
                                           std::size_t db_size) const;

private:
    struct Node {
        ItemId id;
        std::int32_t candidate_index = -1;  // leaf payload at depth k
        std::uint32_t children_begin = 0;
        std::uint32_t children_end = 0;
    };

    void build_trie();
    void walk(std::size_t node_index, std::size_t depth,
              std::span<const ItemId> tail);

    std::size_t k_;
    std::vector<Itemset> candidates_;
    std::vector<std::uint64_t> counts_;
    std::vector<Node> nodes_;
    std::uint32_t root_begin_ = 0;  // root child range into nodes_
    std::uint32_t root_end_ = 0;
};

// Controls for mine(): counting parallelism (results are required to be
// identical for any thread count) and an optional safety cap on itemset size
// (0 = unlimited).
struct MineOptions {
    unsigned threads = 1;
    std::size_t max_itemset_size = 0;
};

// L1 seed: the single items appearing in at least the resolved threshold of
// transactions, with exact counts.
std::vector<FrequentItemset> find_frequent_1_itemsets(
    const TransactionDatabase& db, const SupportThreshold& threshold);

// Join + prune: all k-sets formed from two members of L_{k-1} that share all
// but their last item, kept only when every (k-1)-subset is itself in
// L_{k-1}. Throws MixedSizesError if L_prev members differ in size.
std::vector<Itemset> generate_candidates(const std::vector<Itemset>& l_prev);

// Exact containment counting of every candidate over the database. With
// threads > 1 the database is partitioned and per-partition counters are
// summed, which leaves the final counts identical to the sequential run.
void count_support(CandidateStore& candidates, const TransactionDatabase& db,
                   unsigned threads = 1);

// Level-wise mining: L1 seed, candidate join, prune, counting, threshold
// filter, loop until no level survives. Output is the union of all levels,
// sorted by (size, lexicographic ItemId sequence).
std::vector<FrequentItemset> mine(const TransactionDatabase& db,
                                  const SupportThreshold& threshold,
                                  const MineOptions& options = {});

// Direct containment count of one itemset; support_of(empty) == |D|.
std::uint64_t support_of(const Itemset& itemset,
                         const TransactionDatabase& db);

// Debug/interchange dump: "item,item<TAB>count<TAB>fraction" per line,
// fraction with 6 decimals, itemsets in mine() order.
std::string render_frequent_itemsets(const std::vector<FrequentItemset>& sets,
                                     const ItemCatalog& catalog);

}  // namespace aprifire
