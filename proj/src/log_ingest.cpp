#include "aprifire/log_ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace aprifire {

namespace {

constexpr std::string_view kCsvHeader =
    "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,label";

// --- civil time <-> days, Gregorian proleptic -------------------------------

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m,
                     unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool days_in_month_ok(std::int64_t y, unsigned m, unsigned d) {
    static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                         31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    unsigned max_day = lengths[m - 1];
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) max_day = 29;
    return d <= max_day;
}

bool parse_uint(std::string_view text, unsigned& out) {
    if (text.empty()) return false;
    unsigned value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return false;
    out = value;
    return true;
}

std::optional<std::int64_t> make_timestamp(std::int64_t year, unsigned month,
                                           unsigned day, unsigned hour,
                                           unsigned minute, unsigned second,
                                           unsigned micros) {
    if (!days_in_month_ok(year, month, day)) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60 || micros > 999999) {
        return std::nullopt;
    }
    std::int64_t days = days_from_civil(year, month, day);
    std::int64_t seconds =
        days * 86400 + hour * 3600 + minute * 60 + second;
    return seconds * 1000000 + micros;
}

}  // namespace

std::int64_t parse_timestamp_us(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.ffffff]Z
    auto fail = [&]() -> std::int64_t {
        throw ParseError(0, 0, "bad timestamp: '" + std::string(text) + "'");
    };
    if (text.size() < 20 || text.back() != 'Z') return fail();
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':') {
        return fail();
    }
    unsigned year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_uint(text.substr(0, 4), year) ||
        !parse_uint(text.substr(5, 2), month) ||
        !parse_uint(text.substr(8, 2), day) ||
        !parse_uint(text.substr(11, 2), hour) ||
        !parse_uint(text.substr(14, 2), minute) ||
        !parse_uint(text.substr(17, 2), second)) {
        return fail();
    }
    unsigned micros = 0;
    std::size_t rest = 19;
    if (text[rest] == '.') {
        std::size_t digits_end = rest + 1;
        while (digits_end < text.size() - 1 &&
               std::isdigit(static_cast<unsigned char>(text[digits_end]))) {
            ++digits_end;
        }
        std::size_t n_digits = digits_end - rest - 1;
        if (n_digits == 0 || n_digits > 6 || digits_end != text.size() - 1) {
            return fail();
        }
        parse_uint(text.substr(rest + 1, n_digits), micros);
        for (std::size_t i = n_digits; i < 6; ++i) micros *= 10;
    } else if (rest != text.size() - 1) {
        return fail();
    }
    auto ts = make_timestamp(year, month, day, hour, minute, second, micros);
    if (!ts) return fail();
    return *ts;
}

std::string format_timestamp_us(std::int64_t timestamp_us) {
    std::int64_t micros = timestamp_us % 1000000;
    std::int64_t seconds = timestamp_us / 1000000;
    if (micros < 0) {
        micros += 1000000;
        seconds -= 1;
    }
    std::int64_t days = seconds / 86400;
    std::int64_t rem = seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t year = 0;
    unsigned month = 0, day = 0;
    civil_from_days(days, year, month, day);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%06lldZ",
                  static_cast<long long>(year), month, day,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem % 3600) / 60),
                  static_cast<long long>(rem % 60),
                  static_cast<long long>(micros));
    return buf;
}

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::Tcp: return "TCP";
        case Protocol::Udp: return "UDP";
        case Protocol::Other: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(Label label) {
    return label == Label::Intrusion ? "INTRUSION" : "NORMAL";
}

TransactionSchema::TransactionSchema()
    : TransactionSchema(std::set<AttributeKind>{
          AttributeKind::DstIp, AttributeKind::DstPort, AttributeKind::Protocol,
          AttributeKind::Label}) {}

TransactionSchema::TransactionSchema(const std::set<AttributeKind>& attributes)
    : attributes_(attributes) {
    attributes_.insert(AttributeKind::Label);
    if (attributes_.size() < 2) {
        throw ConfigError(
            "transaction schema needs at least one non-label attribute");
    }
}

TransactionSchema TransactionSchema::parse(const std::string& text) {
    std::set<AttributeKind> attrs;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string name = text.substr(
            start, comma == std::string::npos ? comma : comma - start);
        if (!name.empty()) {
            auto kind = attribute_kind_from_name(name);
            if (!kind) throw ConfigError("unknown schema attribute: '" + name + "'");
            attrs.insert(*kind);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return TransactionSchema(attrs);
}

bool TransactionSchema::includes(AttributeKind kind) const {
    return attributes_.count(kind) > 0;
}

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    std::vector<std::size_t> columns;  // 1-based column of each field start
    std::size_t line = 0;
};

// RFC 4180 scanner: quoted fields may contain commas, doubled quotes, and
// line breaks; records end at unquoted newlines.
std::vector<CsvRecord> scan_csv(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t field_column = 1;
    bool in_quotes = false;
    bool any_char = false;

    auto end_field = [&]() {
        current.fields.push_back(field);
        current.columns.push_back(field_column);
        field.clear();
    };
    auto end_record = [&]() {
        end_field();
        current.line = line;
        records.push_back(std::move(current));
        current = {};
        any_char = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (!any_char) {
            field_column = column;
            any_char = true;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                    column += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                field += c;
                if (c == '\n') {
                    ++line;
                    column = 0;
                }
            }
            ++column;
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                ++column;
                break;
            case ',':
                end_field();
                ++column;
                field_column = column;
                break;
            case '\r':
                ++column;
                break;
            case '\n':
                end_record();
                ++line;
                column = 1;
                field_column = 1;
                break;
            default:
                field += c;
                ++column;
                break;
        }
    }
    if (in_quotes) {
        throw ParseError(line, column, "unterminated quoted field");
    }
    if (!field.empty() || !current.fields.empty()) {
        end_record();
    }
    return records;
}

std::optional<std::uint16_t> parse_optional_port(const std::string& text,
                                                 std::size_t line,
                                                 std::size_t column,
                                                 const char* name) {
    if (text.empty()) return std::nullopt;
    unsigned value = 0;
    if (!parse_uint(text, value) || value > 65535) {
        throw ParseError(line, column, std::string(name) + " out of range 0-65535: '" +
                                           text + "'");
    }
    return static_cast<std::uint16_t>(value);
}

std::string parse_ip_field(const std::string& text, std::size_t line,
                           std::size_t column, AttributeKind kind) {
    try {
        return make_item(kind, text).value;
    } catch (const InvalidItemError&) {
        throw ParseError(line, column,
                         std::string(attribute_kind_name(kind)) +
                             " is not a dotted-quad IPv4 address: '" + text + "'");
    }
}

Event event_from_record(const CsvRecord& record) {
    if (record.fields.size() != 7) {
        throw ParseError(record.line, 1,
                         "expected 7 fields, got " +
                             std::to_string(record.fields.size()));
    }
    const auto& f = record.fields;
    const auto& col = record.columns;
    Event event;
    try {
        event.timestamp_us = parse_timestamp_us(f[0]);
    } catch (const ParseError& err) {
        throw ParseError(record.line, col[0], err.reason());
    }
    event.src_ip = parse_ip_field(f[1], record.line, col[1], AttributeKind::SrcIp);
    event.src_port = parse_optional_port(f[2], record.line, col[2], "src_port");
    event.dst_ip = parse_ip_field(f[3], record.line, col[3], AttributeKind::DstIp);
    event.dst_port = parse_optional_port(f[4], record.line, col[4], "dst_port");
    if (f[5] == "TCP") {
        event.protocol = Protocol::Tcp;
    } else if (f[5] == "UDP") {
        event.protocol = Protocol::Udp;
    } else if (f[5] == "OTHER") {
        event.protocol = Protocol::Other;
    } else {
        throw ParseError(record.line, col[5],
                         "protocol must be TCP, UDP or OTHER: '" + f[5] + "'");
    }
    if (f[6] == "INTRUSION") {
        event.label = Label::Intrusion;
    } else if (f[6] == "NORMAL") {
        event.label = Label::Normal;
    } else {
        throw ParseError(record.line, col[6],
                         "label must be INTRUSION or NORMAL: '" + f[6] + "'");
    }
    if (event.protocol != Protocol::Other &&
        (!event.src_port || !event.dst_port)) {
        throw ParseError(record.line, col[5],
                         "ports are required for TCP/UDP events");
    }
    return event;
}

}  // namespace

std::vector<Event> parse_csv_events(std::string_view text, ParseMode mode,
                                    ParseStats* stats) {
    std::vector<CsvRecord> records = scan_csv(text);
    if (records.empty()) {
        throw ParseError(1, 1, "missing CSV header");
    }
    {
        std::string joined;
        for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
            if (i > 0) joined += ',';
            joined += records[0].fields[i];
        }
        if (joined != kCsvHeader) {
            throw ParseError(1, 1, "unexpected CSV header: '" + joined + "'");
        }
    }

    std::vector<Event> events;
    for (std::size_t i = 1; i < records.size(); ++i) {
        try {
            events.push_back(event_from_record(records[i]));
            if (stats) ++stats->parsed;
        } catch (const ParseError& err) {
            if (mode == ParseMode::Strict) throw;
            if (stats) {
                ++stats->skipped;
                stats->errors.push_back(err);
            }
        }
    }
    return events;
}

std::string write_csv_events(const std::vector<Event>& events) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const Event& event : events) {
        out += format_timestamp_us(event.timestamp_us);
        out += ',';
        out += event.src_ip;
        out += ',';
        if (event.src_port) out += std::to_string(*event.src_port);
        out += ',';
        out += event.dst_ip;
        out += ',';
        if (event.dst_port) out += std::to_string(*event.dst_port);
        out += ',';
        out += to_string(event.protocol);
        out += ',';
        out += to_string(event.label);
        out += '\n';
    }
    return out;
}

Label LabelRule::resolve(const std::string& classification) const {
    auto it = by_classification.find(classification);
    return it == by_classification.end() ? default_label : it->second;
}

namespace {

// "ip" or "ip:port"
void parse_snort_endpoint(const std::string& token, std::size_t line,
                          AttributeKind ip_kind, std::string& ip,
                          std::optional<std::uint16_t>& port) {
    std::size_t colon = token.rfind(':');
    std::string ip_text =
        colon == std::string::npos ? token : token.substr(0, colon);
    ip = parse_ip_field(ip_text, line, 1, ip_kind);
    if (colon != std::string::npos) {
        port = parse_optional_port(token.substr(colon + 1), line, 1,
                                   ip_kind == AttributeKind::SrcIp ? "src_port"
                                                                   : "dst_port");
        if (!port) {
            throw ParseError(line, 1, "empty port in endpoint '" + token + "'");
        }
    }
}

std::int64_t parse_snort_timestamp(const std::string& token, std::size_t line) {
    // MM/DD[/YY]-HH:MM:SS.ffffff ; the year-less classic form is pinned to
    // 2000 (a leap year, so 02/29 stays parseable).
    auto fail = [&]() -> std::int64_t {
        throw ParseError(line, 1, "bad alert timestamp: '" + token + "'");
    };
    std::size_t dash = token.find('-');
    if (dash == std::string::npos) return fail();
    std::string date = token.substr(0, dash);
    std::string time = token.substr(dash + 1);

    unsigned month = 0, day = 0, year2 = 0;
    std::int64_t year = 2000;
    std::size_t s1 = date.find('/');
    if (s1 == std::string::npos) return fail();
    std::size_t s2 = date.find('/', s1 + 1);
    if (!parse_uint(date.substr(0, s1), month)) return fail();
    if (s2 == std::string::npos) {
        if (!parse_uint(date.substr(s1 + 1), day)) return fail();
    } else {
        if (!parse_uint(date.substr(s1 + 1, s2 - s1 - 1), day)) return fail();
        if (!parse_uint(date.substr(s2 + 1), year2)) return fail();
        year = 2000 + year2;
    }

    if (time.size() < 8 || time[2] != ':' || time[5] != ':') return fail();
    unsigned hour = 0, minute = 0, second = 0, micros = 0;
    if (!parse_uint(time.substr(0, 2), hour) ||
        !parse_uint(time.substr(3, 2), minute) ||
        !parse_uint(time.substr(6, 2), second)) {
        return fail();
    }
    if (time.size() > 8) {
        if (time[8] != '.') return fail();
        std::string frac = time.substr(9);
        if (frac.empty() || frac.size() > 6 || !parse_uint(frac, micros)) {
            return fail();
        }
        for (std::size_t i = frac.size(); i < 6; ++i) micros *= 10;
    }
    auto ts = make_timestamp(year, month, day, hour, minute, second, micros);
    if (!ts) return fail();
    return *ts;
}

Event event_from_alert_line(const std::string& line_text, std::size_t line,
                            const LabelRule& label_rule) {
    std::size_t arrow = line_text.find(" -> ");
    if (arrow == std::string::npos) {
        throw ParseError(line, 1, "alert line missing ' -> ' separator");
    }

    Event event;

    // destination: from the arrow to end of line
    std::string dst = line_text.substr(arrow + 4);
    while (!dst.empty() && (dst.back() == ' ' || dst.back() == '\r')) {
        dst.pop_back();
    }
    parse_snort_endpoint(dst, line, AttributeKind::DstIp, event.dst_ip,
                         event.dst_port);

    // source: token immediately before the arrow
    std::size_t src_end = arrow;
    std::size_t src_begin = line_text.rfind(' ', src_end - 1);
    if (src_begin == std::string::npos) {
        throw ParseError(line, 1, "alert line missing source endpoint");
    }
    parse_snort_endpoint(line_text.substr(src_begin + 1, src_end - src_begin - 1),
                         line, AttributeKind::SrcIp, event.src_ip,
                         event.src_port);

    // protocol: {PROTO} before the source
    std::size_t brace_close = line_text.rfind('}', src_begin);
    std::size_t brace_open =
        brace_close == std::string::npos ? std::string::npos
                                         : line_text.rfind('{', brace_close);
    if (brace_open == std::string::npos) {
        throw ParseError(line, 1, "alert line missing {PROTO}");
    }
    std::string proto =
        line_text.substr(brace_open + 1, brace_close - brace_open - 1);
    event.protocol = proto == "TCP"   ? Protocol::Tcp
                     : proto == "UDP" ? Protocol::Udp
                                      : Protocol::Other;
    if (event.protocol != Protocol::Other &&
        (!event.src_port || !event.dst_port)) {
        throw ParseError(line, 1, "ports are required for TCP/UDP alerts");
    }

    // timestamp: first token
    std::size_t ts_end = line_text.find(' ');
    if (ts_end == std::string::npos) {
        throw ParseError(line, 1, "alert line missing timestamp");
    }
    event.timestamp_us =
        parse_snort_timestamp(line_text.substr(0, ts_end), line);

    // classification: optional bracketed section
    std::string classification;
    constexpr std::string_view kClassTag = "[Classification: ";
    std::size_t class_begin = line_text.find(kClassTag);
    if (class_begin != std::string::npos) {
        std::size_t value_begin = class_begin + kClassTag.size();
        std::size_t value_end = line_text.find(']', value_begin);
        if (value_end == std::string::npos) {
            throw ParseError(line, 1, "unterminated [Classification: ...]");
        }
        classification =
            line_text.substr(value_begin, value_end - value_begin);
    }
    event.label = label_rule.resolve(classification);
    return event;
}

}  // namespace

std::vector<Event> parse_snort_fast_alert(std::string_view text,
                                          const LabelRule& label_rule,
                                          ParseMode mode, ParseStats* stats) {
    std::vector<Event> events;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t newline = text.find('\n', start);
        std::string line(text.substr(
            start, newline == std::string_view::npos ? newline : newline - start));
        ++line_no;
        start = newline == std::string_view::npos ? text.size() : newline + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            events.push_back(event_from_alert_line(line, line_no, label_rule));
            if (stats) ++stats->parsed;
        } catch (const ParseError& err) {
            if (mode == ParseMode::Strict) throw;
            if (stats) {
                ++stats->skipped;
                stats->errors.push_back(err);
            }
        }
    }
    return events;
}

TransactionDatabase transactionize(const std::vector<Event>& events,
                                   const TransactionSchema& schema,
                                   ItemCatalog catalog) {
    TransactionDatabase db;
    db.catalog = std::move(catalog);
    db.transactions.reserve(events.size());
    std::uint64_t tid = 0;
    for (const Event& event : events) {
        std::vector<ItemId> ids;
        for (AttributeKind kind : schema.attributes()) {
            switch (kind) {
                case AttributeKind::SrcIp:
                    ids.push_back(db.catalog.intern(kind, event.src_ip));
                    break;
                case AttributeKind::DstIp:
                    ids.push_back(db.catalog.intern(kind, event.dst_ip));
                    break;
                case AttributeKind::SrcPort:
                    if (event.src_port) {
                        ids.push_back(db.catalog.intern(
                            kind, std::to_string(*event.src_port)));
                    }
                    break;
                case AttributeKind::DstPort:
                    if (event.dst_port) {
                        ids.push_back(db.catalog.intern(
                            kind, std::to_string(*event.dst_port)));
                    }
                    break;
                case AttributeKind::Protocol:
                    // Other has no item rendering; it contributes nothing.
                    if (event.protocol != Protocol::Other) {
                        ids.push_back(db.catalog.intern(
                            kind, std::string(to_string(event.protocol))));
                    }
                    break;
                case AttributeKind::Label:
                    ids.push_back(db.catalog.intern(
                        kind, std::string(to_string(event.label))));
                    break;
            }
        }
        db.transactions.push_back({tid++, Itemset::from_unsorted(std::move(ids))});
    }
    return db;
}

}  // namespace aprifire
