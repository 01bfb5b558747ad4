#include "uwsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace uwsim {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_double(v[i]);
    }
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key `" + key + "` expects a number, got `" + value + "`");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key `" + key + "` expects an integer, got `" + value + "`");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("config: key `" + key + "` expects an unsigned integer, got `" + value +
                          "`");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError("config: key `" + key + "` expects a boolean, got `" + value + "`");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config: key `" + key + "` expects a non-empty list");
    return out;
}

struct KeyEntry {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

using Registry = std::map<std::string, KeyEntry>;

#define UWSIM_KEY_DOUBLE(name, field)                                                        \
    {name,                                                                                   \
     {[](SimConfig& c, const std::string& v) { c.field = parse_double(name, v); },           \
      [](const SimConfig& c) { return fmt_double(c.field); }}}
#define UWSIM_KEY_INT(name, field)                                                        \
    {name,                                                                                \
     {[](SimConfig& c, const std::string& v) { c.field = parse_int(name, v); },           \
      [](const SimConfig& c) { return std::to_string(c.field); }}}
#define UWSIM_KEY_BOOL(name, field)                                                        \
    {name,                                                                                 \
     {[](SimConfig& c, const std::string& v) { c.field = parse_bool(name, v); },           \
      [](const SimConfig& c) { return c.field ? std::string("true") : std::string("false"); }}}
#define UWSIM_KEY_LIST(name, field)                                                        \
    {name,                                                                                 \
     {[](SimConfig& c, const std::string& v) { c.field = parse_list(name, v); },           \
      [](const SimConfig& c) { return fmt_list(c.field); }}}
#define UWSIM_KEY_STRING(name, field)                                      \
    {name,                                                                 \
     {[](SimConfig& c, const std::string& v) { c.field = v; },             \
      [](const SimConfig& c) { return c.field; }}}

const Registry& registry() {
    static const Registry reg = {
        UWSIM_KEY_STRING("run.scenario", scenario),
        UWSIM_KEY_INT("run.trials", trials),
        {"run.seed",
         {[](SimConfig& c, const std::string& v) { c.seed = parse_u64("run.seed", v); },
          [](const SimConfig& c) { return std::to_string(c.seed); }}},
        UWSIM_KEY_STRING("run.out", outdir),
        UWSIM_KEY_BOOL("run.events_log", events_log),

        UWSIM_KEY_DOUBLE("engine.drift_max_ppm", net.drift_max_ppm),

        UWSIM_KEY_STRING("channel.model", channel_model),
        UWSIM_KEY_DOUBLE("channel.l_d0", channel_l_d0),
        UWSIM_KEY_DOUBLE("channel.slope_per_m", channel_slope_per_m),
        UWSIM_KEY_DOUBLE("channel.eta", channel_eta),
        UWSIM_KEY_DOUBLE("channel.d0", channel_d0),
        UWSIM_KEY_STRING("channel.fading", channel_fading),
        UWSIM_KEY_DOUBLE("channel.sigma2_db2", channel_sigma2_db2),

        UWSIM_KEY_DOUBLE("radio.data_rate_bps", net.radio.data_rate_bps),
        UWSIM_KEY_INT("radio.bits_per_symbol", net.radio.bits_per_symbol),
        UWSIM_KEY_DOUBLE("radio.signal_bw_hz", net.radio.signal_bw_hz),
        UWSIM_KEY_DOUBLE("radio.noise_bw_hz", net.radio.noise_bw_hz),
        UWSIM_KEY_DOUBLE("radio.noise_floor_dbm", net.radio.noise_floor_dbm),
        UWSIM_KEY_DOUBLE("radio.sensitivity_dbm", net.radio.sensitivity_dbm),
        UWSIM_KEY_DOUBLE("radio.tx_power_dbm", net.radio.tx_power_dbm),
        UWSIM_KEY_DOUBLE("radio.max_tx_power_dbm", net.radio.max_tx_power_dbm),
        {"radio.receiver",
         {[](SimConfig& c, const std::string& v) {
              if (v == "coherent") c.net.radio.receiver = ReceiverType::coherent;
              else if (v == "noncoherent") c.net.radio.receiver = ReceiverType::noncoherent;
              else throw ConfigError("config: radio.receiver must be coherent|noncoherent");
          },
          [](const SimConfig& c) {
              return std::string(c.net.radio.receiver == ReceiverType::coherent ? "coherent"
                                                                                : "noncoherent");
          }}},
        {"radio.coding",
         {[](SimConfig& c, const std::string& v) {
              if (v == "none") c.net.radio.coding = CodingType::none;
              else if (v == "conv_3_1_2") c.net.radio.coding = CodingType::conv_3_1_2;
              else throw ConfigError("config: radio.coding must be none|conv_3_1_2");
          },
          [](const SimConfig& c) {
              return std::string(c.net.radio.coding == CodingType::conv_3_1_2 ? "conv_3_1_2"
                                                                              : "none");
          }}},

        UWSIM_KEY_DOUBLE("mac.ack_wait_s", net.mac.ack_wait_s),
        UWSIM_KEY_INT("mac.max_retries", net.mac.max_retries),
        UWSIM_KEY_INT("mac.queue_capacity", net.mac.queue_capacity),
        UWSIM_KEY_INT("mac.ack_bytes", net.mac.ack_bytes),
        UWSIM_KEY_INT("mac.header_bytes", net.mac.header_bytes),
        UWSIM_KEY_INT("mac.dedup_window", net.mac.dedup_window),

        UWSIM_KEY_DOUBLE("ctp.ewma_alpha", net.ctp.ewma_alpha),
        UWSIM_KEY_DOUBLE("ctp.quality_floor", net.ctp.quality_floor),
        UWSIM_KEY_DOUBLE("ctp.i_min_s", net.ctp.trickle_i_min_s),
        UWSIM_KEY_DOUBLE("ctp.i_max_s", net.ctp.trickle_i_max_s),
        UWSIM_KEY_INT("ctp.redundancy_k", net.ctp.trickle_redundancy_k),
        UWSIM_KEY_DOUBLE("ctp.etx_jump", net.ctp.etx_inconsistency_jump),
        UWSIM_KEY_INT("ctp.beacon_bytes", net.ctp.beacon_bytes),
        UWSIM_KEY_DOUBLE("ctp.neighbor_timeout_s", net.ctp.neighbor_timeout_s),

        UWSIM_KEY_INT("grid.rows", grid.rows),
        UWSIM_KEY_INT("grid.cols", grid.cols),
        UWSIM_KEY_DOUBLE("grid.dx", grid.dx),
        UWSIM_KEY_DOUBLE("grid.dy", grid.dy),

        UWSIM_KEY_DOUBLE("p2p.distance_min", p2p_distance_min),
        UWSIM_KEY_DOUBLE("p2p.distance_max", p2p_distance_max),
        UWSIM_KEY_DOUBLE("p2p.distance_step", p2p_distance_step),
        UWSIM_KEY_LIST("p2p.tx_powers", p2p_tx_powers),
        UWSIM_KEY_BOOL("p2p.all_chains", p2p_all_chains),
        UWSIM_KEY_INT("p2p.frames", p2p_frames),
        UWSIM_KEY_DOUBLE("p2p.period_s", p2p_period_s),
        UWSIM_KEY_INT("p2p.payload_bytes", p2p_payload_bytes),

        UWSIM_KEY_LIST("routing.periods_s", routing_periods_s),
        UWSIM_KEY_INT("routing.packets_per_node", routing_packets_per_node),
        UWSIM_KEY_DOUBLE("routing.warmup_s", routing_warmup_s),
        UWSIM_KEY_DOUBLE("routing.drain_s", routing_drain_s),
        UWSIM_KEY_INT("routing.payload_bytes", routing_payload_bytes),

        UWSIM_KEY_LIST("diffusion.unicast_periods_s", diffusion_unicast_periods_s),
        UWSIM_KEY_DOUBLE("diffusion.contention_period_s", diffusion_contention_period_s),
        UWSIM_KEY_INT("diffusion.iterations", diffusion_iterations),
        UWSIM_KEY_DOUBLE("diffusion.warmup_s", diffusion_warmup_s),
        UWSIM_KEY_INT("diffusion.payload_bytes", diffusion_payload_bytes),

        UWSIM_KEY_LIST("broadcast.deltas", broadcast_deltas),
        UWSIM_KEY_INT("broadcast.packets", broadcast_packets),
        UWSIM_KEY_DOUBLE("broadcast.spacing_s", broadcast_spacing_s),
        UWSIM_KEY_INT("broadcast.payload_bytes", broadcast_payload_bytes),
        UWSIM_KEY_BOOL("broadcast.use_n_factor", broadcast_use_n_factor),
        UWSIM_KEY_BOOL("broadcast.synchronous", broadcast_synchronous),
    };
    return reg;
}

#undef UWSIM_KEY_DOUBLE
#undef UWSIM_KEY_INT
#undef UWSIM_KEY_BOOL
#undef UWSIM_KEY_LIST
#undef UWSIM_KEY_STRING

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_assignment(SimConfig& config, const std::string& key, const std::string& value) {
    const Registry& reg = registry();
    auto it = reg.find(key);
    if (it == reg.end()) throw ConfigError("config: unknown key `" + key + "`");
    it->second.set(config, value);
}

void load_config_file(SimConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file `" + path + "`");
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        apply_assignment(config, key, value);
    }
}

std::string effective_config(const SimConfig& config) {
    std::string out;
    for (const auto& [key, entry] : registry()) {
        out += key;
        out += '=';
        out += entry.get(config);
        out += '\n';
    }
    return out;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, entry] : registry()) keys.push_back(key);
    return keys;
}

void SimConfig::finalize() {
    static const std::vector<std::string> scenarios = {"p2p", "routing-grid", "diffusion-unicast",
                                                       "diffusion-broadcast"};
    if (scenario.empty()) throw ConfigError("config: missing scenario (run.scenario)");
    if (std::find(scenarios.begin(), scenarios.end(), scenario) == scenarios.end()) {
        throw ConfigError("config: unknown scenario `" + scenario + "`");
    }
    if (trials < 1) throw ConfigError("config: run.trials must be >= 1");
    if (grid.rows < 1 || grid.cols < 1 || grid.rows * grid.cols < 2) {
        throw ConfigError("config: grid must hold at least two nodes");
    }
    if (std::abs(net.drift_max_ppm) > Engine::kMaxDriftPpm) {
        throw ConfigError("config: engine.drift_max_ppm must be within 1000 ppm");
    }

    if (channel_model == "linear") {
        net.channel = LinearPathLoss{channel_l_d0, channel_slope_per_m, channel_d0};
    } else if (channel_model == "freespace") {
        net.channel = FreeSpacePathLoss{channel_l_d0, channel_eta, channel_d0};
    } else {
        throw ConfigError("config: channel.model must be linear|freespace");
    }
    if (channel_fading == "none") {
        net.fading = FadingModel{FadingModel::Kind::none, 0.0};
    } else if (channel_fading == "gaussian") {
        if (channel_sigma2_db2 < 0.0) throw ConfigError("config: channel.sigma2_db2 must be >= 0");
        net.fading = FadingModel{FadingModel::Kind::gaussian, std::sqrt(channel_sigma2_db2)};
    } else {
        throw ConfigError("config: channel.fading must be none|gaussian");
    }
    for (double d : broadcast_deltas) {
        if (d < 0.0 || d > 1.0) throw ConfigError("config: broadcast.deltas must lie in [0,1]");
    }
    try {
        net.radio.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace uwsim
