// aprifire: mines association rules from network activity logs and turns
// high-support intrusion rules into firewall block-rules.
//
// Subcommands: mine, emit, synth, oracle. See README.md for examples.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "aprifire/apriori.hpp"
#include "aprifire/error.hpp"
#include "aprifire/event_model.hpp"
#include "aprifire/firewall.hpp"
#include "aprifire/log_ingest.hpp"
#include "aprifire/oracle.hpp"
#include "aprifire/rules.hpp"
#include "aprifire/synth.hpp"
#include "aprifire/version.hpp"

#include <CLI11.hpp>

namespace {

using namespace aprifire;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;

enum class LogLevel { Off = 0, Error, Warn, Info, Debug };

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("APRIFIRE_LOG");
        if (!env) return LogLevel::Warn;
        std::string value(env);
        if (value == "off") return LogLevel::Off;
        if (value == "error") return LogLevel::Error;
        if (value == "info") return LogLevel::Info;
        if (value == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log_line(LogLevel level, const std::string& message) {
    if (level <= log_level()) {
        static const char* names[] = {"off", "error", "warn", "info", "debug"};
        std::cerr << "[aprifire " << names[static_cast<int>(level)] << "] "
                  << message << "\n";
    }
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open input file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        std::cout.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ConfigError("cannot open output file: " + path);
    file << bytes;
}

struct IngestOptions {
    std::string input;
    std::string format = "csv";
    std::string schema_text = "dst_ip,dst_port,protocol,label";
    bool strict_flag = false;
    bool lenient_flag = false;
    std::vector<std::string> normal_classes;

    ParseMode mode() const {
        if (strict_flag) return ParseMode::Strict;
        if (lenient_flag) return ParseMode::Lenient;
        return format == "snort" ? ParseMode::Lenient : ParseMode::Strict;
    }
};

void add_ingest_options(CLI::App* cmd, IngestOptions& opts) {
    cmd->add_option("-i,--input", opts.input,
                    "input log file, or - for stdin")
        ->required();
    cmd->add_option("--format", opts.format, "input format")
        ->check(CLI::IsMember({"csv", "snort"}));
    cmd->add_option("--schema", opts.schema_text,
                    "comma-separated attributes each event projects onto");
    cmd->add_flag("--strict", opts.strict_flag,
                  "abort on the first malformed line");
    cmd->add_flag("--lenient", opts.lenient_flag,
                  "skip malformed lines and count them");
    cmd->add_option("--normal-class", opts.normal_classes,
                    "Snort classification mapped to NORMAL (repeatable)");
}

TransactionDatabase ingest(const IngestOptions& opts, const std::string& text) {
    TransactionSchema schema = TransactionSchema::parse(opts.schema_text);
    ParseStats stats;
    std::vector<Event> events;
    if (opts.format == "snort") {
        LabelRule label_rule;
        for (const std::string& cls : opts.normal_classes) {
            label_rule.by_classification[cls] = Label::Normal;
        }
        events = parse_snort_fast_alert(text, label_rule, opts.mode(), &stats);
    } else {
        events = parse_csv_events(text, opts.mode(), &stats);
    }
    if (stats.skipped > 0) {
        log_line(LogLevel::Warn,
                 "skipped " + std::to_string(stats.skipped) + " malformed line(s)");
        for (const ParseError& err : stats.errors) {
            log_line(LogLevel::Debug, err.what());
        }
    }
    return transactionize(events, schema);
}

struct MiningOptionValues {
    std::string min_support = "0.1";
    double min_confidence = 0.0;
    unsigned threads = 1;
    std::size_t max_k = 0;
};

void add_mining_options(CLI::App* cmd, MiningOptionValues& opts) {
    cmd->add_option("--min-support", opts.min_support,
                    "minimum support: fraction (0.25) or count (25c)");
    cmd->add_option("--min-confidence", opts.min_confidence,
                    "minimum rule confidence in [0,1]");
    cmd->add_option("--threads", opts.threads, "counting parallelism");
    cmd->add_option("--max-k", opts.max_k,
                    "optional cap on itemset size (0 = unlimited)");
}

struct MiningOutcome {
    std::vector<FrequentItemset> frequent;
    std::vector<AssociationRule> rules;
};

MiningOutcome run_mining(const TransactionDatabase& db,
                         const MiningOptionValues& opts) {
    if (opts.min_confidence < 0.0 || opts.min_confidence > 1.0) {
        throw ConfigError("--min-confidence must lie in [0, 1]");
    }
    SupportThreshold threshold = SupportThreshold::parse(opts.min_support);
    MiningOutcome outcome;
    outcome.frequent =
        mine(db, threshold, MineOptions{opts.threads, opts.max_k});
    outcome.rules =
        derive_rules(outcome.frequent, db.size(), opts.min_confidence);
    return outcome;
}

struct EmitOptionValues {
    double threshold = 0.70;
    std::string threshold_on = "support";
    std::string format = "json";
    std::string action = "DROP";
    std::string direction = "both";
    std::string generated_at = "1970-01-01T00:00:00Z";
    std::string chain_input = "INPUT";
    std::string chain_output = "OUTPUT";
    std::string nft_table = "inet filter";
};

void add_emit_options(CLI::App* cmd, EmitOptionValues& opts) {
    cmd->add_option("--threshold", opts.threshold,
                    "emission threshold in [0,1]");
    cmd->add_option("--threshold-on", opts.threshold_on,
                    "metric the threshold applies to")
        ->check(CLI::IsMember({"support", "confidence"}));
    cmd->add_option("--fw-format", opts.format,
                    "output format: json, iptables or nftables");
    cmd->add_option("--action", opts.action, "block action")
        ->check(CLI::IsMember({"DROP", "REJECT"}));
    cmd->add_option("--direction", opts.direction, "block direction")
        ->check(CLI::IsMember({"inbound", "outbound", "both"}));
    cmd->add_option("--generated-at", opts.generated_at,
                    "timestamp stamped into the output (fixed default keeps "
                    "runs reproducible)");
    cmd->add_option("--chain-input", opts.chain_input, "iptables input chain");
    cmd->add_option("--chain-output", opts.chain_output,
                    "iptables output chain");
    cmd->add_option("--nft-table", opts.nft_table, "nftables table");
}

EmissionPolicy policy_from(const EmitOptionValues& opts) {
    EmissionPolicy policy;
    policy.support_threshold = opts.threshold;
    policy.threshold_on = opts.threshold_on == "confidence"
                              ? ThresholdMetric::Confidence
                              : ThresholdMetric::Support;
    policy.action =
        opts.action == "REJECT" ? RuleAction::Reject : RuleAction::Drop;
    policy.direction = opts.direction == "inbound"    ? Direction::Inbound
                       : opts.direction == "outbound" ? Direction::Outbound
                                                      : Direction::Both;
    policy.iptables_input_chain = opts.chain_input;
    policy.iptables_output_chain = opts.chain_output;
    policy.nft_table = opts.nft_table;
    policy.validate();
    return policy;
}

int run_mine_once(const IngestOptions& ingest_opts,
                  const MiningOptionValues& mining,
                  const std::string& itemsets_out,
                  const std::string& rules_out) {
    TransactionDatabase db = ingest(ingest_opts, read_input(ingest_opts.input));
    MiningOutcome outcome = run_mining(db, mining);
    write_output(itemsets_out,
                 render_frequent_itemsets(outcome.frequent, db.catalog));
    write_output(rules_out, render_rules(outcome.rules, db.catalog));
    std::cerr << "transactions=" << db.size() << " items=" << db.catalog.size()
              << " frequent=" << outcome.frequent.size()
              << " rules=" << outcome.rules.size() << "\n";
    return kExitOk;
}

int cmd_mine(const IngestOptions& ingest_opts, const MiningOptionValues& mining,
             const std::string& itemsets_out, const std::string& rules_out,
             bool watch) {
    if (!watch) {
        return run_mine_once(ingest_opts, mining, itemsets_out, rules_out);
    }
    if (ingest_opts.input == "-") {
        throw ConfigError("--watch requires a file input");
    }
    // Full re-mine on every change; no incremental update path exists.
    std::filesystem::file_time_type last_seen{};
    while (true) {
        std::error_code ec;
        auto stamp = std::filesystem::last_write_time(ingest_opts.input, ec);
        if (!ec && stamp != last_seen) {
            last_seen = stamp;
            try {
                run_mine_once(ingest_opts, mining, itemsets_out, rules_out);
            } catch (const Error& err) {
                log_line(LogLevel::Error, err.what());
            }
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(500));
    }
}

int cmd_emit(const IngestOptions& ingest_opts, bool have_input,
             const MiningOptionValues& mining, const std::string& rules_in,
             std::size_t db_size_flag, const EmitOptionValues& emit_opts,
             const std::string& output) {
    auto format = firewall_format_from_name(emit_opts.format);
    if (!format) {
        throw ConfigError("unknown firewall format: '" + emit_opts.format + "'");
    }
    EmissionPolicy policy = policy_from(emit_opts);

    ItemCatalog catalog;
    std::vector<AssociationRule> rules;
    std::size_t db_size = db_size_flag;
    if (!rules_in.empty()) {
        rules = parse_rules(read_input(rules_in), catalog, db_size);
    } else if (have_input) {
        TransactionDatabase db =
            ingest(ingest_opts, read_input(ingest_opts.input));
        MiningOutcome outcome = run_mining(db, mining);
        rules = std::move(outcome.rules);
        db_size = db.size();
        catalog = db.catalog;
    } else {
        throw ConfigError("emit needs either --rules or --input");
    }

    std::vector<IntrusionRule> intrusion = filter_intrusion_rules(rules, catalog);
    std::vector<FirewallRule> planned =
        plan_firewall_rules(intrusion, policy, catalog);
    RenderMetadata metadata;
    metadata.generated_at = emit_opts.generated_at;
    metadata.db_size = db_size;
    write_output(output, render(planned, *format, policy, metadata));
    log_line(LogLevel::Info,
             "emitted " + std::to_string(planned.size()) + " firewall rule(s)");
    return kExitOk;
}

int cmd_synth(std::uint64_t seed, bool seed_set, std::uint64_t events,
              bool events_set, const std::string& profile,
              const std::string& config_path, const std::string& output,
              bool report_flag) {
    SynthConfig config;
    if (!config_path.empty()) {
        config = SynthConfig::from_json(read_input(config_path));
    } else if (profile == "table2") {
        config = table2_profile();
    } else if (!profile.empty()) {
        throw ConfigError("unknown synth profile: '" + profile + "'");
    } else {
        throw ConfigError("synth needs --profile or --config");
    }
    if (seed_set) config.seed = seed;
    if (events_set) config.n_events = events;
    config.validate();

    SynthReport report;
    std::vector<Event> generated = generate(config, &report);
    write_output(output, write_csv_events(generated));
    if (report_flag) std::cerr << report.to_text(config);
    return kExitOk;
}

int cmd_oracle(const IngestOptions& ingest_opts,
               const MiningOptionValues& mining,
               const std::string& itemsets_out, const std::string& rules_out) {
    TransactionDatabase db = ingest(ingest_opts, read_input(ingest_opts.input));
    SupportThreshold threshold = SupportThreshold::parse(mining.min_support);
    std::uint64_t min_count = threshold.resolve(db.size());
    std::vector<FrequentItemset> frequent =
        brute_force_frequent_itemsets(db, min_count);
    std::vector<AssociationRule> rules =
        brute_force_rules(db, min_count, mining.min_confidence);
    write_output(itemsets_out, render_frequent_itemsets(frequent, db.catalog));
    write_output(rules_out, render_rules(rules, db.catalog));
    std::cerr << "transactions=" << db.size() << " items=" << db.catalog.size()
              << " frequent=" << frequent.size() << " rules=" << rules.size()
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) +
                 " - association-rule firewall rule generator"};
    app.set_version_flag("--version",
                         std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    // mine
    auto* mine_cmd = app.add_subcommand(
        "mine", "mine frequent itemsets and association rules from logs");
    IngestOptions mine_ingest;
    MiningOptionValues mine_mining;
    std::string mine_itemsets_out;
    std::string mine_rules_out;
    bool mine_watch = false;
    add_ingest_options(mine_cmd, mine_ingest);
    add_mining_options(mine_cmd, mine_mining);
    mine_cmd->add_option("--itemsets-out", mine_itemsets_out,
                         "frequent itemset dump path (default stdout)");
    mine_cmd->add_option("--rules-out", mine_rules_out,
                         "rule dump path (default stdout)");
    mine_cmd->add_flag("--watch", mine_watch,
                       "re-run the pipeline whenever the input file changes");

    // emit
    auto* emit_cmd = app.add_subcommand(
        "emit", "render firewall block-rules from mined intrusion rules");
    IngestOptions emit_ingest;
    MiningOptionValues emit_mining;
    EmitOptionValues emit_opts;
    std::string emit_rules_in;
    std::string emit_output;
    std::size_t emit_db_size = 0;
    emit_cmd->add_option("--rules", emit_rules_in,
                         "rule dump produced by mine (alternative to --input)");
    emit_cmd->add_option("--db-size", emit_db_size,
                         "database size recorded in the output header when "
                         "emitting from a rule dump");
    emit_cmd->add_option("-i,--input", emit_ingest.input,
                         "input log file for a full pipeline run");
    emit_cmd->add_option("--format", emit_ingest.format, "input format")
        ->check(CLI::IsMember({"csv", "snort"}));
    emit_cmd->add_option("--schema", emit_ingest.schema_text,
                         "transaction schema for pipeline runs");
    emit_cmd->add_flag("--strict", emit_ingest.strict_flag,
                       "abort on the first malformed line");
    emit_cmd->add_flag("--lenient", emit_ingest.lenient_flag,
                       "skip malformed lines");
    emit_cmd->add_option("--normal-class", emit_ingest.normal_classes,
                         "Snort classification mapped to NORMAL (repeatable)");
    add_mining_options(emit_cmd, emit_mining);
    add_emit_options(emit_cmd, emit_opts);
    emit_cmd->add_option("-o,--output", emit_output,
                         "output path (default stdout)");

    // synth
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a seeded synthetic event log");
    std::uint64_t synth_seed = 0;
    std::uint64_t synth_events = 0;
    std::string synth_profile;
    std::string synth_config;
    std::string synth_output;
    bool synth_report = false;
    auto* seed_opt =
        synth_cmd->add_option("--seed", synth_seed, "generator seed");
    auto* events_opt =
        synth_cmd->add_option("--events", synth_events, "number of events");
    synth_cmd->add_option("--profile", synth_profile,
                          "canned corpus profile (table2)");
    synth_cmd->add_option("--config", synth_config, "JSON config file");
    synth_cmd->add_option("-o,--output", synth_output,
                          "output path (default stdout)");
    synth_cmd->add_flag("--report", synth_report,
                        "print achieved per-activity rates to stderr");

    // oracle
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "brute-force reference mining for cross-checking");
    IngestOptions oracle_ingest;
    MiningOptionValues oracle_mining;
    std::string oracle_itemsets_out;
    std::string oracle_rules_out;
    add_ingest_options(oracle_cmd, oracle_ingest);
    add_mining_options(oracle_cmd, oracle_mining);
    oracle_cmd->add_option("--itemsets-out", oracle_itemsets_out,
                           "frequent itemset dump path (default stdout)");
    oracle_cmd->add_option("--rules-out", oracle_rules_out,
                           "rule dump path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (mine_cmd->parsed()) {
            return cmd_mine(mine_ingest, mine_mining, mine_itemsets_out,
                            mine_rules_out, mine_watch);
        }
        if (emit_cmd->parsed()) {
            return cmd_emit(emit_ingest, !emit_ingest.input.empty(),
                            emit_mining, emit_rules_in, emit_db_size, emit_opts,
                            emit_output);
        }
        if (synth_cmd->parsed()) {
            return cmd_synth(synth_seed, seed_opt->count() > 0, synth_events,
                             events_opt->count() > 0, synth_profile,
                             synth_config, synth_output, synth_report);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle(oracle_ingest, oracle_mining, oracle_itemsets_out,
                              oracle_rules_out);
        }
    } catch (const ParseError& err) {
        std::cerr << "aprifire: " << err.what() << "\n";
        return kExitParse;
    } catch (const EmptyDatabaseError& err) {
        std::cerr << "aprifire: " << err.what() << "\n";
        return kExitParse;
    } catch (const ConfigError& err) {
        std::cerr << "aprifire: " << err.what() << "\n";
        return kExitConfig;
    } catch (const Error& err) {
        std::cerr << "aprifire: " << err.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& err) {
        std::cerr << "aprifire: unexpected error: " << err.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
