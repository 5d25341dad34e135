#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aprifire/rules.hpp"

namespace aprifire {

enum class ThresholdMetric { Support, Confidence };
enum class Direction { Inbound, Outbound, Both };
enum class RuleAction { Drop, Reject };
enum class FirewallFormat { Json, Iptables, Nftables };

std::string to_string(Direction direction);
std::string to_string(RuleAction action);
std::optional<FirewallFormat> firewall_format_from_name(const std::string& name);

// How intrusion rules become block rules: the threshold (default the 70%
// from the mined-rule pipeline), which metric it applies to, block
// direction, action, and chain/table naming for the rendered forms.
struct EmissionPolicy {
    double support_threshold = 0.70;
    ThresholdMetric threshold_on = ThresholdMetric::Support;
    Direction direction = Direction::Both;
    RuleAction action = RuleAction::Drop;
    std::string iptables_input_chain = "INPUT";
    std::string iptables_output_chain = "OUTPUT";
    std::string nft_table = "inet filter";
    std::string nft_input_chain = "input";
    std::string nft_output_chain = "output";

    void validate() const;  // throws ConfigError
};

// Packet-match fields extracted from a rule antecedent. At least one field
// is always present.
struct FirewallMatch {
    std::optional<std::string> src_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<std::string> dst_ip;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::string> protocol;  // "TCP" | "UDP"

    bool operator==(const FirewallMatch&) const = default;
    auto operator<=>(const FirewallMatch&) const = default;
    bool empty() const {
        return !src_ip && !src_port && !dst_ip && !dst_port && !protocol;
    }
};

// A renderable block directive plus the provenance of the intrusion rule it
// came from.
struct FirewallRule {
    FirewallMatch match;
    RuleAction action = RuleAction::Drop;
    Direction direction = Direction::Both;
    double support_fraction = 0.0;
    double confidence = 0.0;
    std::uint64_t stable_id = 0;  // deterministic hash of the match fields

    bool operator==(const FirewallRule&) const = default;
};

// Run metadata stamped into rendered output. generated_at defaults to a
// fixed instant so identical inputs produce identical bytes; callers that
// want wall-clock stamps set it explicitly.
struct RenderMetadata {
    std::string generated_at = "1970-01-01T00:00:00Z";
    std::size_t db_size = 0;
};

// Exactly the rules whose thresholded metric (support_fraction by default)
// is >= policy.support_threshold, input order preserved.
std::vector<IntrusionRule> select_rules(const std::vector<IntrusionRule>& rules,
                                        const EmissionPolicy& policy,
                                        const ItemCatalog& catalog);

// Maps antecedent items onto match fields and copies provenance. Throws
// UnmappableAntecedentError if no item maps (cannot happen for a well-formed
// IntrusionRule).
FirewallRule to_firewall_rule(const IntrusionRule& rule,
                              const EmissionPolicy& policy,
                              const ItemCatalog& catalog);

// select + map + dedup (coinciding match fields collapse, keeping the
// max-support provenance) + deterministic sort by match fields.
std::vector<FirewallRule> plan_firewall_rules(
    const std::vector<IntrusionRule>& rules, const EmissionPolicy& policy,
    const ItemCatalog& catalog);

// Bit-exact rendering. Text formats start with a header comment carrying
// tool version, threshold, and database size; JSON carries them as fields.
std::string render(const std::vector<FirewallRule>& rules,
                   FirewallFormat format, const EmissionPolicy& policy,
                   const RenderMetadata& metadata);

// Parses the JSON form back into rules (round-trip check and tooling).
std::vector<FirewallRule> parse_firewall_json(const std::string& text);

}  // namespace aprifire
