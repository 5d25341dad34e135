#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aprifire/event_model.hpp"

namespace aprifire {

enum class Protocol : std::uint8_t { Tcp, Udp, Other };
enum class Label : std::uint8_t { Intrusion, Normal };

std::string_view to_string(Protocol protocol);
std::string_view to_string(Label label);

// One logged network activity. Ports are absent only for protocol Other
// (e.g. ICMP); the label is always present since the miner trains on
// labeled data.
struct Event {
    std::int64_t timestamp_us = 0;  // microseconds since the Unix epoch, UTC
    std::string src_ip;
    std::optional<std::uint16_t> src_port;
    std::string dst_ip;
    std::optional<std::uint16_t> dst_port;
    Protocol protocol = Protocol::Other;
    Label label = Label::Normal;

    bool operator==(const Event&) const = default;
};

// Timestamp helpers for the "2024-01-05T10:00:00.000001Z" rendering.
std::int64_t parse_timestamp_us(std::string_view text);
std::string format_timestamp_us(std::int64_t timestamp_us);

// Which attribute kinds each event projects onto. The label is always
// included (rules need the INTRUSION consequent) and at least one other
// attribute must be present.
class TransactionSchema {
public:
    // Default projection: destination activity plus protocol and label.
    TransactionSchema();
    explicit TransactionSchema(const std::set<AttributeKind>& attributes);

    // Comma-separated attribute names, e.g. "dst_ip,dst_port,label".
    static TransactionSchema parse(const std::string& text);

    bool includes(AttributeKind kind) const;
    const std::set<AttributeKind>& attributes() const { return attributes_; }

private:
    std::set<AttributeKind> attributes_;
};

// On a malformed row, strict parsing throws ParseError; lenient parsing
// skips the row and records the error.
enum class ParseMode { Strict, Lenient };

struct ParseStats {
    std::size_t parsed = 0;
    std::size_t skipped = 0;
    std::vector<ParseError> errors;  // populated in lenient mode
};

// CSV event stream with header
// "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,label", RFC 4180
// quoting, UTF-8. Returns events in input order.
std::vector<Event> parse_csv_events(std::string_view text,
                                    ParseMode mode = ParseMode::Strict,
                                    ParseStats* stats = nullptr);

// Inverse of parse_csv_events; emits the header plus one row per event.
std::string write_csv_events(const std::vector<Event>& events);

// Maps a Snort alert classification string to a label. Alerts default to
// INTRUSION; classifications can be remapped (e.g. to NORMAL) explicitly.
struct LabelRule {
    std::map<std::string, Label> by_classification;
    Label default_label = Label::Intrusion;

    Label resolve(const std::string& classification) const;
};

// Snort "fast" alert lines:
//   MM/DD-HH:MM:SS.ffffff [**] [gid:sid:rev] msg [**]
//   [Classification: c] [Priority: p] {PROTO} srcip:sport -> dstip:dport
// Lenient by default: log tails contain partial lines.
std::vector<Event> parse_snort_fast_alert(std::string_view text,
                                          const LabelRule& label_rule = {},
                                          ParseMode mode = ParseMode::Lenient,
                                          ParseStats* stats = nullptr);

// One transaction per event: each schema attribute with a present value
// becomes one interned item; absent ports (and the Other protocol, which
// has no item rendering) contribute nothing. TIDs are sequential from 0.
TransactionDatabase transactionize(const std::vector<Event>& events,
                                   const TransactionSchema& schema,
                                   ItemCatalog catalog = {});

}  // namespace aprifire
