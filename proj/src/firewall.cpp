#include "aprifire/firewall.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "aprifire/version.hpp"
#include <json.hpp>

namespace aprifire {

namespace {

std::string fixed6(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string canonical_match(const FirewallMatch& match) {
    std::string s;
    if (match.src_ip) s += "s=" + *match.src_ip + ";";
    if (match.src_port) s += "sp=" + std::to_string(*match.src_port) + ";";
    if (match.dst_ip) s += "d=" + *match.dst_ip + ";";
    if (match.dst_port) s += "dp=" + std::to_string(*match.dst_port) + ";";
    if (match.protocol) s += "p=" + lower(*match.protocol) + ";";
    return s;
}

double metric_of(const IntrusionRule& rule, const EmissionPolicy& policy) {
    return policy.threshold_on == ThresholdMetric::Support
               ? rule.rule.support_fraction
               : rule.rule.confidence;
}

}  // namespace

std::string to_string(Direction direction) {
    switch (direction) {
        case Direction::Inbound: return "inbound";
        case Direction::Outbound: return "outbound";
        case Direction::Both: return "both";
    }
    return "both";
}

std::string to_string(RuleAction action) {
    return action == RuleAction::Drop ? "DROP" : "REJECT";
}

std::optional<FirewallFormat> firewall_format_from_name(
    const std::string& name) {
    if (name == "json") return FirewallFormat::Json;
    if (name == "iptables") return FirewallFormat::Iptables;
    if (name == "nftables") return FirewallFormat::Nftables;
    return std::nullopt;
}

void EmissionPolicy::validate() const {
    if (!(support_threshold >= 0.0 && support_threshold <= 1.0)) {
        throw ConfigError("emission threshold must lie in [0, 1]");
    }
}

std::vector<IntrusionRule> select_rules(const std::vector<IntrusionRule>& rules,
                                        const EmissionPolicy& policy,
                                        const ItemCatalog&) {
    policy.validate();
    std::vector<IntrusionRule> selected;
    for (const IntrusionRule& rule : rules) {
        if (metric_of(rule, policy) >= policy.support_threshold) {
            selected.push_back(rule);
        }
    }
    return selected;
}

FirewallRule to_firewall_rule(const IntrusionRule& rule,
                              const EmissionPolicy& policy,
                              const ItemCatalog& catalog) {
    FirewallRule out;
    for (ItemId id : rule.rule.antecedent.items()) {
        const Item& item = catalog.resolve(id);
        switch (item.attribute) {
            case AttributeKind::SrcIp:
                if (!out.match.src_ip) out.match.src_ip = item.value;
                break;
            case AttributeKind::DstIp:
                if (!out.match.dst_ip) out.match.dst_ip = item.value;
                break;
            case AttributeKind::SrcPort:
                if (!out.match.src_port) {
                    out.match.src_port =
                        static_cast<std::uint16_t>(std::stoul(item.value));
                }
                break;
            case AttributeKind::DstPort:
                if (!out.match.dst_port) {
                    out.match.dst_port =
                        static_cast<std::uint16_t>(std::stoul(item.value));
                }
                break;
            case AttributeKind::Protocol:
                if (!out.match.protocol) out.match.protocol = item.value;
                break;
            case AttributeKind::Label:
                break;
        }
    }
    if (out.match.empty()) {
        throw UnmappableAntecedentError(
            "antecedent has no mappable match field: " + rule.activity);
    }
    out.action = policy.action;
    out.direction = policy.direction;
    out.support_fraction = rule.rule.support_fraction;
    out.confidence = rule.rule.confidence;
    out.stable_id = fnv1a(canonical_match(out.match));
    return out;
}

std::vector<FirewallRule> plan_firewall_rules(
    const std::vector<IntrusionRule>& rules, const EmissionPolicy& policy,
    const ItemCatalog& catalog) {
    std::vector<FirewallRule> mapped;
    for (const IntrusionRule& rule : select_rules(rules, policy, catalog)) {
        mapped.push_back(to_firewall_rule(rule, policy, catalog));
    }
    std::sort(mapped.begin(), mapped.end(),
              [](const FirewallRule& a, const FirewallRule& b) {
                  if (a.match != b.match) return a.match < b.match;
                  // dedup keeps the strongest provenance; order it first
                  if (a.support_fraction != b.support_fraction) {
                      return a.support_fraction > b.support_fraction;
                  }
                  return a.confidence > b.confidence;
              });
    std::vector<FirewallRule> out;
    for (FirewallRule& rule : mapped) {
        if (!out.empty() && out.back().match == rule.match) continue;
        out.push_back(std::move(rule));
    }
    return out;
}

namespace {

std::string header_comment(const EmissionPolicy& policy,
                           const RenderMetadata& metadata) {
    std::string line = "# ";
    line += kToolName;
    line += ' ';
    line += kToolVersion;
    line += " threshold=" + fixed6(policy.support_threshold);
    line += " db_size=" + std::to_string(metadata.db_size);
    line += '\n';
    return line;
}

// -A <CHAIN> [-s <ip>/32] [-d <ip>/32] [-p <tcp|udp>] [--dport <n>]
// [--sport <n>] -j <ACTION>
std::string iptables_line(const FirewallRule& rule, const std::string& chain) {
    std::string line = "-A " + chain;
    if (rule.match.src_ip) line += " -s " + *rule.match.src_ip + "/32";
    if (rule.match.dst_ip) line += " -d " + *rule.match.dst_ip + "/32";
    if (rule.match.protocol) line += " -p " + lower(*rule.match.protocol);
    if (rule.match.dst_port) {
        line += " --dport " + std::to_string(*rule.match.dst_port);
    }
    if (rule.match.src_port) {
        line += " --sport " + std::to_string(*rule.match.src_port);
    }
    line += " -j " + to_string(rule.action);
    line += '\n';
    return line;
}

// [ip saddr <ip>] [ip daddr <ip>] [<tcp|udp> dport <n>] <drop|reject>
// A port with no protocol item falls back to the transport-header match.
std::string nftables_statement(const FirewallRule& rule) {
    std::string stmt;
    std::string proto =
        rule.match.protocol ? lower(*rule.match.protocol) : "th";
    if (rule.match.src_ip) stmt += "ip saddr " + *rule.match.src_ip + " ";
    if (rule.match.dst_ip) stmt += "ip daddr " + *rule.match.dst_ip + " ";
    if (rule.match.dst_port) {
        stmt += proto + " dport " + std::to_string(*rule.match.dst_port) + " ";
    }
    if (rule.match.src_port) {
        stmt += proto + " sport " + std::to_string(*rule.match.src_port) + " ";
    }
    if (!rule.match.dst_port && !rule.match.src_port && rule.match.protocol) {
        stmt += "meta l4proto " + proto + " ";
    }
    stmt += rule.action == RuleAction::Drop ? "drop" : "reject";
    return stmt;
}

std::string render_iptables(const std::vector<FirewallRule>& rules,
                            const EmissionPolicy& policy,
                            const RenderMetadata& metadata) {
    std::string out = header_comment(policy, metadata);
    for (const FirewallRule& rule : rules) {
        if (policy.direction != Direction::Outbound) {
            out += iptables_line(rule, policy.iptables_input_chain);
        }
        if (policy.direction != Direction::Inbound) {
            out += iptables_line(rule, policy.iptables_output_chain);
        }
    }
    return out;
}

std::string render_nftables(const std::vector<FirewallRule>& rules,
                            const EmissionPolicy& policy,
                            const RenderMetadata& metadata) {
    std::string out = header_comment(policy, metadata);
    out += "table " + policy.nft_table + " {\n";
    auto chain = [&](const std::string& name) {
        out += "  chain " + name + " {\n";
        for (const FirewallRule& rule : rules) {
            out += "    " + nftables_statement(rule) + "\n";
        }
        out += "  }\n";
    };
    if (policy.direction != Direction::Outbound) chain(policy.nft_input_chain);
    if (policy.direction != Direction::Inbound) chain(policy.nft_output_chain);
    out += "}\n";
    return out;
}

// Hand-rendered so the byte layout (key order, 6-decimal fixed point) is
// stable; nlohmann is used only for parsing.
std::string render_json(const std::vector<FirewallRule>& rules,
                        const EmissionPolicy& policy,
                        const RenderMetadata& metadata) {
    std::string out = "{\"version\":1,\"generated_at\":\"";
    out += metadata.generated_at;
    out += "\",\"threshold\":" + fixed6(policy.support_threshold);
    out += ",\"db_size\":" + std::to_string(metadata.db_size);
    out += ",\"rules\":[";
    bool first_rule = true;
    for (const FirewallRule& rule : rules) {
        if (!first_rule) out += ',';
        first_rule = false;
        out += "{\"match\":{";
        bool first_field = true;
        auto field = [&](const char* key, const std::string& value,
                         bool quoted) {
            if (!first_field) out += ',';
            first_field = false;
            out += '"';
            out += key;
            out += "\":";
            if (quoted) {
                out += '"' + value + '"';
            } else {
                out += value;
            }
        };
        if (rule.match.src_ip) field("src_ip", *rule.match.src_ip, true);
        if (rule.match.src_port) {
            field("src_port", std::to_string(*rule.match.src_port), false);
        }
        if (rule.match.dst_ip) field("dst_ip", *rule.match.dst_ip, true);
        if (rule.match.dst_port) {
            field("dst_port", std::to_string(*rule.match.dst_port), false);
        }
        if (rule.match.protocol) {
            field("protocol", lower(*rule.match.protocol), true);
        }
        out += "},\"action\":\"" + to_string(rule.action) + "\"";
        out += ",\"direction\":\"" + to_string(rule.direction) + "\"";
        out += ",\"support\":" + fixed6(rule.support_fraction);
        out += ",\"confidence\":" + fixed6(rule.confidence);
        out += '}';
    }
    out += "]}";
    return out;
}

}  // namespace

std::string render(const std::vector<FirewallRule>& rules,
                   FirewallFormat format, const EmissionPolicy& policy,
                   const RenderMetadata& metadata) {
    switch (format) {
        case FirewallFormat::Json:
            return render_json(rules, policy, metadata);
        case FirewallFormat::Iptables:
            return render_iptables(rules, policy, metadata);
        case FirewallFormat::Nftables:
            return render_nftables(rules, policy, metadata);
    }
    throw ConfigError("unknown firewall format");
}

std::vector<FirewallRule> parse_firewall_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<FirewallRule> rules;
    for (const auto& entry : doc.at("rules")) {
        FirewallRule rule;
        const auto& match = entry.at("match");
        if (match.contains("src_ip")) {
            rule.match.src_ip = match["src_ip"].get<std::string>();
        }
        if (match.contains("src_port")) {
            rule.match.src_port = match["src_port"].get<std::uint16_t>();
        }
        if (match.contains("dst_ip")) {
            rule.match.dst_ip = match["dst_ip"].get<std::string>();
        }
        if (match.contains("dst_port")) {
            rule.match.dst_port = match["dst_port"].get<std::uint16_t>();
        }
        if (match.contains("protocol")) {
            std::string proto = match["protocol"].get<std::string>();
            rule.match.protocol = proto == "tcp" ? "TCP" : "UDP";
        }
        rule.action = entry.at("action").get<std::string>() == "DROP"
                          ? RuleAction::Drop
                          : RuleAction::Reject;
        std::string dir = entry.at("direction").get<std::string>();
        rule.direction = dir == "inbound"    ? Direction::Inbound
                         : dir == "outbound" ? Direction::Outbound
                                             : Direction::Both;
        rule.support_fraction = entry.at("support").get<double>();
        rule.confidence = entry.at("confidence").get<double>();
        rule.stable_id = fnv1a(canonical_match(rule.match));
        rules.push_back(std::move(rule));
    }
    return rules;
}

}  // namespace aprifire
