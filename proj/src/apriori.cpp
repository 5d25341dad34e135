#include "aprifire/apriori.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace aprifire {

namespace {
constexpr std::uint64_t kMicro = 1000000;
}

SupportThreshold SupportThreshold::count(std::uint64_t n) {
    if (n < 1) throw ConfigError("absolute support count must be >= 1");
    return SupportThreshold(false, n);
}

SupportThreshold SupportThreshold::fraction(double f) {
    if (!(f > 0.0) || f > 1.0) {
        throw ConfigError("support fraction must lie in (0, 1]");
    }
    auto micro = static_cast<std::uint64_t>(std::llround(f * kMicro));
    if (micro == 0) micro = 1;
    return SupportThreshold(true, micro);
}

std::uint64_t SupportThreshold::resolve(std::size_t db_size) const {
    if (!is_fraction_) return raw_;
    if (db_size == 0) {
        throw EmptyDatabaseError(
            "fractional support threshold over an empty database");
    }
    // ceil(raw/1e6 * db_size) in exact integer arithmetic
    std::uint64_t resolved = (raw_ * db_size + kMicro - 1) / kMicro;
    return std::max<std::uint64_t>(resolved, 1);
}

std::string SupportThreshold::to_string() const {
    if (!is_fraction_) return std::to_string(raw_) + "c";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f",
                  static_cast<double>(raw_) / static_cast<double>(kMicro));
    return buf;
}

SupportThreshold SupportThreshold::parse(const std::string& text) {
    if (text.empty()) throw ConfigError("empty support threshold");
    if (text.back() == 'c') {
        std::string digits = text.substr(0, text.size() - 1);
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("bad absolute support count: '" + text + "'");
        }
        unsigned long long n = 0;
        try {
            n = std::stoull(digits);
        } catch (const std::exception&) {
            throw ConfigError("bad absolute support count: '" + text + "'");
        }
        return count(n);
    }
    std::size_t pos = 0;
    double f = 0.0;
    try {
        f = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad support fraction: '" + text + "'");
    }
    if (pos != text.size()) {
        throw ConfigError("bad support fraction: '" + text + "'");
    }
    return fraction(f);
}

CandidateStore::CandidateStore(std::vector<Itemset> candidates, std::size_t k)
    : k_(k), candidates_(std::move(candidates)) {
    if (k_ < 1) throw Error("candidate itemset size must be >= 1");
    for (const Itemset& c : candidates_) {
        if (c.size() != k_) {
            throw MixedSizesError("candidate store requires uniform size " +
                                  std::to_string(k_));
        }
    }
    std::sort(candidates_.begin(), candidates_.end());
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()),
                      candidates_.end());
    counts_.assign(candidates_.size(), 0);
    build_trie();
}

// Candidates are sorted lexicographically, so every trie level is a run of
// contiguous ranges; the whole trie is laid out level by level with child
// ranges instead of per-node maps.
void CandidateStore::build_trie() {
    struct Range {
        std::uint32_t parent;  // index into nodes_, or UINT32_MAX for root
        std::uint32_t begin;
        std::uint32_t end;
        std::uint32_t depth;
    };

    nodes_.clear();
    root_begin_ = root_end_ = 0;
    if (candidates_.empty()) return;

    std::vector<Range> queue;
    queue.push_back({UINT32_MAX, 0, static_cast<std::uint32_t>(candidates_.size()), 0});

    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        Range range = queue[qi];
        auto first_child = static_cast<std::uint32_t>(nodes_.size());
        std::uint32_t i = range.begin;
        while (i < range.end) {
            ItemId id = candidates_[i].items()[range.depth];
            std::uint32_t j = i;
            while (j < range.end && candidates_[j].items()[range.depth] == id) {
                ++j;
            }
            Node node;
            node.id = id;
            if (range.depth + 1 == k_) {
                node.candidate_index = static_cast<std::int32_t>(i);
            } else {
                queue.push_back({static_cast<std::uint32_t>(nodes_.size()), i,
                                 j, range.depth + 1});
            }
            nodes_.push_back(node);
            i = j;
        }
        auto last_child = static_cast<std::uint32_t>(nodes_.size());
        if (range.parent == UINT32_MAX) {
            root_begin_ = first_child;
            root_end_ = last_child;
        } else {
            nodes_[range.parent].children_begin = first_child;
            nodes_[range.parent].children_end = last_child;
        }
    }
}

void CandidateStore::count_transaction(const Itemset& transaction_items) {
    if (nodes_.empty() || transaction_items.size() < k_) return;
    std::span<const ItemId> items = transaction_items.items();
    // Descend from every matching root child; children are sorted by id, so
    // each step is a linear merge of the node's child run with the
    // transaction tail.
    struct Frame {
        std::uint32_t child_begin;
        std::uint32_t child_end;
        std::size_t item_pos;
    };
    std::vector<Frame> stack;
    stack.push_back({root_begin_, root_end_, 0});
    while (!stack.empty()) {
        Frame frame = stack.back();
        stack.pop_back();
        std::uint32_t child = frame.child_begin;
        std::size_t pos = frame.item_pos;
        while (child < frame.child_end && pos < items.size()) {
            if (nodes_[child].id < items[pos]) {
                ++child;
            } else if (items[pos] < nodes_[child].id) {
                ++pos;
            } else {
                const Node& node = nodes_[child];
                if (node.candidate_index >= 0) {
                    ++counts_[static_cast<std::size_t>(node.candidate_index)];
                } else {
                    stack.push_back(
                        {node.children_begin, node.children_end, pos + 1});
                }
                ++child;
                ++pos;
            }
        }
    }
}

void CandidateStore::absorb_counts(const CandidateStore& other) {
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
    }
}

std::vector<FrequentItemset> CandidateStore::threshold(
    std::uint64_t min_count, std::size_t db_size) const {
    std::vector<FrequentItemset> out;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        if (counts_[i] >= min_count) {
            out.push_back({candidates_[i], counts_[i],
                           static_cast<double>(counts_[i]) /
                               static_cast<double>(db_size)});
        }
    }
    return out;
}

std::vector<FrequentItemset> find_frequent_1_itemsets(
    const TransactionDatabase& db, const SupportThreshold& threshold) {
    std::uint64_t min_count = threshold.resolve(db.size());
    std::vector<std::uint64_t> counts(db.catalog.size(), 0);
    for (const Transaction& t : db.transactions) {
        for (ItemId id : t.items.items()) {
            if (id.value < counts.size()) ++counts[id.value];
        }
    }
    std::vector<FrequentItemset> out;
    for (std::uint32_t id = 0; id < counts.size(); ++id) {
        if (counts[id] >= min_count) {
            out.push_back({Itemset::from_sorted({ItemId{id}}), counts[id],
                           static_cast<double>(counts[id]) /
                               static_cast<double>(db.size())});
        }
    }
    return out;
}

std::vector<Itemset> generate_candidates(const std::vector<Itemset>& l_prev) {
    if (l_prev.empty()) return {};
    std::size_t prev_size = l_prev.front().size();
    if (prev_size < 1) throw MixedSizesError("joining empty itemsets");
    for (const Itemset& s : l_prev) {
        if (s.size() != prev_size) {
            throw MixedSizesError("join input mixes itemset sizes " +
                                  std::to_string(prev_size) + " and " +
                                  std::to_string(s.size()));
        }
    }

    std::vector<Itemset> sorted = l_prev;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    auto is_frequent = [&sorted](const Itemset& s) {
        return std::binary_search(sorted.begin(), sorted.end(), s);
    };

    // Prefix join: pairs sharing the first k-2 ids produce the same k-set the
    // full Cartesian product would, without duplicates.
    std::vector<Itemset> candidates;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        auto a = sorted[i].items();
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            auto b = sorted[j].items();
            if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) {
                break;  // sorted order: shared prefixes are contiguous
            }
            std::vector<ItemId> joined(a.begin(), a.end());
            joined.push_back(b.back());
            Itemset candidate = Itemset::from_sorted(std::move(joined));

            // Apriori prune: every (k-1)-subset must be frequent.
            bool keep = true;
            auto ids = candidate.items();
            for (std::size_t drop = 0; keep && drop < ids.size(); ++drop) {
                std::vector<ItemId> subset;
                subset.reserve(ids.size() - 1);
                for (std::size_t m = 0; m < ids.size(); ++m) {
                    if (m != drop) subset.push_back(ids[m]);
                }
                keep = is_frequent(Itemset::from_sorted(std::move(subset)));
            }
            if (keep) candidates.push_back(std::move(candidate));
        }
    }
    return candidates;
}

void count_support(CandidateStore& candidates, const TransactionDatabase& db,
                   unsigned threads) {
    if (candidates.candidate_count() == 0 || db.transactions.empty()) return;
    if (threads <= 1 || db.transactions.size() < 2 * threads) {
        for (const Transaction& t : db.transactions) {
            candidates.count_transaction(t.items);
        }
        return;
    }

    // Partition counting: per-partition counters summed afterwards. Integer
    // addition commutes, so the result matches the sequential run exactly.
    std::size_t n = db.transactions.size();
    std::size_t chunk = (n + threads - 1) / threads;
    std::vector<CandidateStore> partials;
    partials.reserve(threads - 1);
    std::vector<std::thread> workers;
    for (unsigned w = 1; w < threads; ++w) {
        std::size_t begin = w * chunk;
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + chunk);
        partials.push_back(candidates);  // zero-count copy of the trie
        CandidateStore& part = partials.back();
        workers.emplace_back([&db, &part, begin, end]() {
            for (std::size_t i = begin; i < end; ++i) {
                part.count_transaction(db.transactions[i].items);
            }
        });
    }
    for (std::size_t i = 0; i < std::min<std::size_t>(chunk, n); ++i) {
        candidates.count_transaction(db.transactions[i].items);
    }
    for (auto& worker : workers) worker.join();
    for (const CandidateStore& part : partials) candidates.absorb_counts(part);
}

std::vector<FrequentItemset> mine(const TransactionDatabase& db,
                                  const SupportThreshold& threshold,
                                  const MineOptions& options) {
    std::uint64_t min_count = threshold.resolve(db.size());

    std::vector<FrequentItemset> result =
        find_frequent_1_itemsets(db, SupportThreshold::count(min_count));
    std::vector<Itemset> level;
    for (const FrequentItemset& f : result) level.push_back(f.itemset);

    std::size_t k = 2;
    while (!level.empty() &&
           (options.max_itemset_size == 0 || k <= options.max_itemset_size)) {
        std::vector<Itemset> raw = generate_candidates(level);
        if (raw.empty()) break;
        CandidateStore store(std::move(raw), k);
        count_support(store, db, options.threads);
        std::vector<FrequentItemset> lk = store.threshold(min_count, db.size());
        level.clear();
        for (const FrequentItemset& f : lk) level.push_back(f.itemset);
        result.insert(result.end(), std::make_move_iterator(lk.begin()),
                      std::make_move_iterator(lk.end()));
        ++k;
    }

    std::sort(result.begin(), result.end(),
              [](const FrequentItemset& a, const FrequentItemset& b) {
                  if (a.itemset.size() != b.itemset.size()) {
                      return a.itemset.size() < b.itemset.size();
                  }
                  return a.itemset < b.itemset;
              });
    return result;
}

std::uint64_t support_of(const Itemset& itemset, const TransactionDatabase& db) {
    std::uint64_t count = 0;
    for (const Transaction& t : db.transactions) {
        if (t.items.contains_all(itemset)) ++count;
    }
    return count;
}

std::string render_frequent_itemsets(const std::vector<FrequentItemset>& sets,
                                     const ItemCatalog& catalog) {
    std::string out;
    char buf[32];
    for (const FrequentItemset& f : sets) {
        out += render_itemset(f.itemset, catalog);
        out += '\t';
        out += std::to_string(f.support_count);
        out += '\t';
        std::snprintf(buf, sizeof(buf), "%.6f", f.support_fraction);
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace aprifire
