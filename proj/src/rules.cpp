#include "aprifire/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace aprifire {

double confidence(std::uint64_t rule_support,
                  std::uint64_t antecedent_support) {
    if (antecedent_support == 0) {
        throw ZeroAntecedentError("confidence with zero antecedent support");
    }
    return static_cast<double>(rule_support) /
           static_cast<double>(antecedent_support);
}

std::vector<AssociationRule> derive_rules(
    const std::vector<FrequentItemset>& frequent, std::size_t db_size,
    double min_confidence) {
    std::map<Itemset, std::uint64_t> support;
    for (const FrequentItemset& f : frequent) {
        support[f.itemset] = f.support_count;
    }

    std::vector<AssociationRule> rules;
    for (const FrequentItemset& f : frequent) {
        std::size_t n = f.itemset.size();
        if (n < 2) continue;
        if (n >= 63) throw Error("itemset too large for rule enumeration");
        auto ids = f.itemset.items();

        // Every nonempty proper subset of F as antecedent, complement as
        // consequent.
        std::uint64_t limit = (1ULL << n) - 1;
        for (std::uint64_t mask = 1; mask < limit; ++mask) {
            std::vector<ItemId> left, right;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1ULL << i)) {
                    left.push_back(ids[i]);
                } else {
                    right.push_back(ids[i]);
                }
            }
            Itemset antecedent = Itemset::from_sorted(std::move(left));
            auto it = support.find(antecedent);
            if (it == support.end()) {
                throw MissingSubsetSupportError(
                    "antecedent support missing from frequent set");
            }
            double conf = confidence(f.support_count, it->second);
            if (conf >= min_confidence) {
                rules.push_back({std::move(antecedent),
                                 Itemset::from_sorted(std::move(right)),
                                 f.support_count,
                                 static_cast<double>(f.support_count) /
                                     static_cast<double>(db_size),
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

namespace {

std::string render_activity(const Itemset& antecedent,
                            const ItemCatalog& catalog) {
    // A destination activity renders the way the mined reports present it:
    // "A.B.C.D" or "A.B.C.D:port". A protocol item does not change that
    // rendering; anything else falls back to the attr=value list.
    std::string dst_ip;
    std::string dst_port;
    bool destination_only = true;
    for (ItemId id : antecedent.items()) {
        const Item& item = catalog.resolve(id);
        if (item.attribute == AttributeKind::DstIp && dst_ip.empty()) {
            dst_ip = item.value;
        } else if (item.attribute == AttributeKind::DstPort &&
                   dst_port.empty()) {
            dst_port = item.value;
        } else if (item.attribute != AttributeKind::Protocol) {
            destination_only = false;
        }
    }
    if (destination_only && !dst_ip.empty()) {
        return dst_port.empty() ? dst_ip : dst_ip + ":" + dst_port;
    }

    // Fallback: sorted attr=value list.
    std::vector<std::string> parts;
    for (ItemId id : antecedent.items()) {
        parts.push_back(catalog.resolve(id).to_string());
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += ',';
        out += parts[i];
    }
    return out;
}

}  // namespace

std::vector<IntrusionRule> filter_intrusion_rules(
    const std::vector<AssociationRule>& rules, const ItemCatalog& catalog) {
    std::vector<IntrusionRule> out;
    for (const AssociationRule& rule : rules) {
        if (rule.consequent.size() != 1) continue;
        const Item& item = catalog.resolve(rule.consequent.items()[0]);
        if (item.attribute != AttributeKind::Label || item.value != "INTRUSION") {
            continue;
        }
        // A rule with a label on both sides cannot have nonzero support, so
        // any rule that reached this point has a label-free antecedent.
        for (ItemId id : rule.antecedent.items()) {
            if (catalog.resolve(id).attribute == AttributeKind::Label) {
                throw Error("intrusion rule with label in antecedent");
            }
        }
        out.push_back({rule, render_activity(rule.antecedent, catalog)});
    }
    return out;
}

std::string render_rules(const std::vector<AssociationRule>& rules,
                         const ItemCatalog& catalog) {
    std::string out;
    char buf[32];
    for (const AssociationRule& rule : rules) {
        out += render_itemset(rule.antecedent, catalog);
        out += '\t';
        out += render_itemset(rule.consequent, catalog);
        out += '\t';
        std::snprintf(buf, sizeof(buf), "%.6f", rule.support_fraction);
        out += buf;
        out += '\t';
        std::snprintf(buf, sizeof(buf), "%.6f", rule.confidence);
        out += buf;
        out += '\n';
    }
    return out;
}

namespace {

Itemset parse_item_list(const std::string& text, ItemCatalog& catalog) {
    std::vector<ItemId> ids;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        ids.push_back(catalog.intern(parse_item(token)));
    }
    return Itemset::from_unsorted(std::move(ids));
}

}  // namespace

std::vector<AssociationRule> parse_rules(const std::string& text,
                                         ItemCatalog& catalog,
                                         std::size_t db_size) {
    std::vector<AssociationRule> rules;
    std::stringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(
                start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4) {
            throw ParseError(line_no, 1, "rule line needs 4 tab-separated fields");
        }
        AssociationRule rule;
        try {
            rule.antecedent = parse_item_list(fields[0], catalog);
            rule.consequent = parse_item_list(fields[1], catalog);
            rule.support_fraction = std::stod(fields[2]);
            rule.confidence = std::stod(fields[3]);
        } catch (const InvalidItemError& err) {
            throw ParseError(line_no, 1, err.what());
        } catch (const std::exception&) {
            throw ParseError(line_no, 1, "bad numeric field");
        }
        if (rule.antecedent.empty() || rule.consequent.empty()) {
            throw ParseError(line_no, 1, "rule sides must be nonempty");
        }
        rule.support_count = static_cast<std::uint64_t>(
            std::llround(rule.support_fraction * static_cast<double>(db_size)));
        rules.push_back(std::move(rule));
    }
    return rules;
}

}  // namespace aprifire
