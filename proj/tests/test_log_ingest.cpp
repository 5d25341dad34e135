#include <doctest.h>

#include "aprifire/log_ingest.hpp"
#include "helpers.hpp"

using namespace aprifire;

namespace {

const char* kHeader =
    "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,label\n";

std::string with_header(const std::string& rows) {
    return std::string(kHeader) + rows;
}

}  // namespace

TEST_CASE("csv: direct field mapping") {
    auto events = parse_csv_events(with_header(
        "2024-01-05T10:00:00.000001Z,10.0.0.5,4242,192.168.1.154,81,TCP,"
        "INTRUSION\n"));
    REQUIRE(events.size() == 1);
    const Event& e = events[0];
    CHECK(e.src_ip == "10.0.0.5");
    CHECK(e.src_port == 4242);
    CHECK(e.dst_ip == "192.168.1.154");
    CHECK(e.dst_port == 81);
    CHECK(e.protocol == Protocol::Tcp);
    CHECK(e.label == Label::Intrusion);
    CHECK(format_timestamp_us(e.timestamp_us) == "2024-01-05T10:00:00.000001Z");
}

TEST_CASE("csv: empty input after header yields no events") {
    CHECK(parse_csv_events(with_header("")).empty());
}

TEST_CASE("csv: out-of-range port points at the offending field") {
    std::string row =
        "2024-01-05T10:00:00Z,10.0.0.5,4242,192.168.1.154,70000,TCP,INTRUSION";
    try {
        parse_csv_events(with_header(row + "\n"));
        FAIL("expected ParseError");
    } catch (const ParseError& err) {
        CHECK(err.line() == 2);
        CHECK(err.column() == row.find("70000") + 1);
        CHECK(err.reason().find("dst_port") != std::string::npos);
    }
}

TEST_CASE("csv: strict aborts, lenient skips and counts") {
    std::string text = with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,4242,192.168.1.154,81,TCP,INTRUSION\n"
        "garbage line that is not csv enough,x,y,z,1,2\n"
        "2024-01-05T10:00:02Z,10.0.0.5,4242,192.168.1.154,83,TCP,NORMAL\n");

    CHECK_THROWS_AS(parse_csv_events(text, ParseMode::Strict), ParseError);

    ParseStats stats;
    auto events = parse_csv_events(text, ParseMode::Lenient, &stats);
    CHECK(events.size() == 2);
    CHECK(stats.parsed == 2);
    CHECK(stats.skipped == 1);
    REQUIRE(stats.errors.size() == 1);
    CHECK(stats.errors[0].line() == 3);
}

TEST_CASE("csv: header must match exactly") {
    CHECK_THROWS_AS(parse_csv_events("time,src,dst\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_csv_events(""), ParseError);
}

TEST_CASE("csv: rfc4180 quoting is accepted") {
    auto events = parse_csv_events(with_header(
        "\"2024-01-05T10:00:00Z\",\"10.0.0.5\",4242,192.168.1.154,81,TCP,"
        "INTRUSION\r\n"));
    REQUIRE(events.size() == 1);
    CHECK(events[0].src_ip == "10.0.0.5");
}

TEST_CASE("csv: ports are mandatory for TCP and UDP") {
    CHECK_THROWS_AS(
        parse_csv_events(with_header(
            "2024-01-05T10:00:00Z,10.0.0.5,,192.168.1.154,81,TCP,INTRUSION\n")),
        ParseError);
    // OTHER may omit ports
    auto events = parse_csv_events(with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,,192.168.1.160,,OTHER,NORMAL\n"));
    REQUIRE(events.size() == 1);
    CHECK_FALSE(events[0].src_port.has_value());
    CHECK_FALSE(events[0].dst_port.has_value());
}

TEST_CASE("csv: events round-trip through the writer") {
    std::string text = with_header(
        "2024-01-05T10:00:00.000001Z,10.0.0.5,4242,192.168.1.154,81,TCP,"
        "INTRUSION\n"
        "2024-01-05T10:00:01.500000Z,10.0.0.6,,192.168.1.160,,OTHER,NORMAL\n"
        "2024-01-05T10:00:02.000000Z,10.0.0.7,53,8.8.8.8,53,UDP,NORMAL\n");
    auto events = parse_csv_events(text);
    std::string rewritten = write_csv_events(events);
    auto reparsed = parse_csv_events(rewritten);
    CHECK(events == reparsed);
    CHECK(rewritten == text);
}

TEST_CASE("timestamp parser accepts and formats microseconds") {
    CHECK(format_timestamp_us(parse_timestamp_us("2024-01-05T10:00:00Z")) ==
          "2024-01-05T10:00:00.000000Z");
    CHECK(format_timestamp_us(parse_timestamp_us(
              "1999-12-31T23:59:59.999999Z")) == "1999-12-31T23:59:59.999999Z");
    CHECK(parse_timestamp_us("1970-01-01T00:00:00Z") == 0);
    CHECK_THROWS_AS(parse_timestamp_us("2024-13-05T10:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp_us("2024-02-30T10:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp_us("2024-01-05 10:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_timestamp_us("2024-01-05T10:00:00"), ParseError);
}

TEST_CASE("snort: fast alert line maps to an event") {
    std::string line =
        "01/05-10:00:00.000001  [**] [1:1000001:1] test [**] "
        "[Classification: trojan-activity] [Priority: 1] {TCP} "
        "10.0.0.5:4242 -> 192.168.1.154:81\n";
    auto events = parse_snort_fast_alert(line);
    REQUIRE(events.size() == 1);
    const Event& e = events[0];
    CHECK(e.src_ip == "10.0.0.5");
    CHECK(e.src_port == 4242);
    CHECK(e.dst_ip == "192.168.1.154");
    CHECK(e.dst_port == 81);
    CHECK(e.protocol == Protocol::Tcp);
    CHECK(e.label == Label::Intrusion);  // alerts default to INTRUSION
    CHECK(format_timestamp_us(e.timestamp_us) == "2000-01-05T10:00:00.000001Z");
}

TEST_CASE("snort: missing arrow separator is a parse error") {
    std::string line =
        "01/05-10:00:00.000001 [**] [1:1:1] test [**] {TCP} 10.0.0.5:1 "
        "192.168.1.154:81\n";
    CHECK_THROWS_AS(parse_snort_fast_alert(line, {}, ParseMode::Strict),
                    ParseError);
    // lenient default: skipped, counted
    ParseStats stats;
    CHECK(parse_snort_fast_alert(line, {}, ParseMode::Lenient, &stats).empty());
    CHECK(stats.skipped == 1);
}

TEST_CASE("snort: label rule remaps classifications") {
    std::string line =
        "01/05-10:00:01.000000 [**] [1:2:1] dns probe [**] "
        "[Classification: not-suspicious] [Priority: 3] {UDP} "
        "10.0.0.5:5353 -> 8.8.8.8:53\n";
    LabelRule rule;
    rule.by_classification["not-suspicious"] = Label::Normal;
    auto events = parse_snort_fast_alert(line, rule);
    REQUIRE(events.size() == 1);
    CHECK(events[0].protocol == Protocol::Udp);
    CHECK(events[0].label == Label::Normal);
}

TEST_CASE("snort: icmp alerts carry no ports") {
    std::string line =
        "01/05/24-10:00:02.000000 [**] [1:3:1] ping sweep [**] "
        "[Classification: icmp-event] [Priority: 3] {ICMP} "
        "10.0.0.5 -> 192.168.1.160\n";
    auto events = parse_snort_fast_alert(line);
    REQUIRE(events.size() == 1);
    CHECK(events[0].protocol == Protocol::Other);
    CHECK_FALSE(events[0].src_port.has_value());
    CHECK_FALSE(events[0].dst_port.has_value());
    CHECK(format_timestamp_us(events[0].timestamp_us) ==
          "2024-01-05T10:00:02.000000Z");
}

TEST_CASE("transactionize projects events onto the schema") {
    auto events = parse_csv_events(with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,4242,192.168.1.154,81,TCP,INTRUSION\n"));

    SUBCASE("default schema: dst_ip, dst_port, protocol, label") {
        TransactionDatabase db = transactionize(events, TransactionSchema{});
        REQUIRE(db.size() == 1);
        CHECK(db.transactions[0].tid == 0);
        CHECK(db.transactions[0].items.size() == 4);
        CHECK(render_itemset(db.transactions[0].items, db.catalog) ==
              "dst_ip=192.168.1.154,dst_port=81,protocol=TCP,label=INTRUSION");
    }

    SUBCASE("narrow schema keeps only the named attributes") {
        TransactionSchema schema({AttributeKind::DstIp, AttributeKind::Label});
        TransactionDatabase db = transactionize(events, schema);
        REQUIRE(db.size() == 1);
        CHECK(db.transactions[0].items.size() == 2);
        CHECK(render_itemset(db.transactions[0].items, db.catalog) ==
              "dst_ip=192.168.1.154,label=INTRUSION");
    }
}

TEST_CASE("transactionize: no events leaves the catalog untouched") {
    ItemCatalog preloaded;
    preloaded.intern(AttributeKind::DstPort, "81");
    TransactionDatabase db =
        transactionize({}, TransactionSchema{}, preloaded);
    CHECK(db.size() == 0);
    CHECK(db.catalog.size() == 1);
}

TEST_CASE("transactionize: absent ports and Other protocol yield no items") {
    auto events = parse_csv_events(with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,,192.168.1.160,,OTHER,INTRUSION\n"));
    TransactionDatabase db = transactionize(events, TransactionSchema{});
    REQUIRE(db.size() == 1);
    CHECK(render_itemset(db.transactions[0].items, db.catalog) ==
          "dst_ip=192.168.1.160,label=INTRUSION");
}

TEST_CASE("transactionize: tids are sequential and unique") {
    auto events = parse_csv_events(with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,1,10.0.0.9,81,TCP,NORMAL\n"
        "2024-01-05T10:00:01Z,10.0.0.5,2,10.0.0.9,81,TCP,NORMAL\n"
        "2024-01-05T10:00:02Z,10.0.0.5,3,10.0.0.9,81,TCP,NORMAL\n"));
    TransactionDatabase db = transactionize(events, TransactionSchema{});
    REQUIRE(db.size() == 3);
    for (std::size_t i = 0; i < db.size(); ++i) {
        CHECK(db.transactions[i].tid == i);
    }
}

TEST_CASE("transactionize is deterministic on identical input") {
    std::string text = with_header(
        "2024-01-05T10:00:00Z,10.0.0.5,4242,192.168.1.154,81,TCP,INTRUSION\n"
        "2024-01-05T10:00:01Z,10.0.0.6,99,192.168.1.154,83,UDP,NORMAL\n");
    TransactionDatabase a =
        transactionize(parse_csv_events(text), TransactionSchema{});
    TransactionDatabase b =
        transactionize(parse_csv_events(text), TransactionSchema{});
    CHECK(a.to_text() == b.to_text());
    CHECK(a.size() == 2);
}

TEST_CASE("schema always includes the label and rejects label-only") {
    TransactionSchema schema({AttributeKind::DstIp});
    CHECK(schema.includes(AttributeKind::Label));
    CHECK_THROWS_AS(TransactionSchema({AttributeKind::Label}), ConfigError);
    CHECK_THROWS_AS(TransactionSchema(std::set<AttributeKind>{}), ConfigError);
}

TEST_CASE("schema parses attribute lists") {
    TransactionSchema schema = TransactionSchema::parse("dst_ip,dst_port,label");
    CHECK(schema.includes(AttributeKind::DstIp));
    CHECK(schema.includes(AttributeKind::DstPort));
    CHECK_FALSE(schema.includes(AttributeKind::Protocol));
    CHECK_THROWS_AS(TransactionSchema::parse("dst_ip,frobnicator"), ConfigError);
}
