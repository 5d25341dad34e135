#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aprifire/apriori.hpp"
#include "aprifire/event_model.hpp"

namespace aprifire {

// X => Y with the support of X u Y and the confidence supp(X u Y)/supp(X).
// Both sides are nonempty and disjoint. Counts are kept so confidence stays
// an exact ratio of integers.
struct AssociationRule {
    Itemset antecedent;
    Itemset consequent;
    std::uint64_t support_count = 0;
    double support_fraction = 0.0;
    double confidence = 0.0;

    bool operator==(const AssociationRule&) const = default;
};

// An association rule whose consequent is exactly {label=INTRUSION}, plus
// the antecedent rendered as an activity string: "A.B.C.D" for a lone
// dst_ip, "A.B.C.D:port" for dst_ip + dst_port, otherwise the sorted
// attr=value list.
struct IntrusionRule {
    AssociationRule rule;
    std::string activity;

    bool operator==(const IntrusionRule&) const = default;
};

// Exact ratio rule_support / antecedent_support. Throws ZeroAntecedentError
// when antecedent_support is 0.
double confidence(std::uint64_t rule_support, std::uint64_t antecedent_support);

// For every frequent itemset F with |F| >= 2 and every nonempty proper
// subset X of F, emits X => F\X iff its confidence meets min_confidence.
// Confidence comes from the stored counts (no database rescan); a missing
// antecedent count raises MissingSubsetSupportError. Output is sorted by
// (antecedent, consequent).
std::vector<AssociationRule> derive_rules(
    const std::vector<FrequentItemset>& frequent, std::size_t db_size,
    double min_confidence);

// Keeps exactly the rules whose consequent is {label=INTRUSION} and attaches
// the rendered activity string.
std::vector<IntrusionRule> filter_intrusion_rules(
    const std::vector<AssociationRule>& rules, const ItemCatalog& catalog);

// Rule dump: "antecedent<TAB>consequent<TAB>support_fraction<TAB>confidence"
// per line, 6-decimal fixed point, rules already in (antecedent, consequent)
// order.
std::string render_rules(const std::vector<AssociationRule>& rules,
                         const ItemCatalog& catalog);

// Parses the dump format back. support_count is reconstructed against
// db_size so downstream provenance stays consistent.
std::vector<AssociationRule> parse_rules(const std::string& text,
                                         ItemCatalog& catalog,
                                         std::size_t db_size);

}  // namespace aprifire
