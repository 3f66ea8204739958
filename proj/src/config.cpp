#include "fbell/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "fbell/errors.hpp"
#include "fbell/json_io.hpp"

namespace fbell {

namespace {

using nlohmann::json;

// Typed accessor over one JSON object that rejects unknown keys.
class Block {
public:
    Block(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw InputError(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [key, value] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw InputError(field(key), "unknown key");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const char* key) const { return j_.at(key); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const char* key, double fallback, double lo = -std::numeric_limits<double>::infinity(),
                  double hi = std::numeric_limits<double>::infinity(), bool lo_open = false) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number()) throw InputError(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw InputError(field(key), "must be finite");
        if (x < lo || (lo_open && x == lo) || x > hi) {
            std::ostringstream msg;
            msg << "value " << x << " outside allowed range " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
            throw InputError(field(key), msg.str());
        }
        return x;
    }

    long long integer(const char* key, long long fallback, long long lo, long long hi) const {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw InputError(field(key), "expected an integer");
        const long long x = v.get<long long>();
        if (x < lo || x > hi)
            throw InputError(field(key), "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                                             std::to_string(hi) + "]");
        return x;
    }

    bool boolean(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) throw InputError(field(key), "expected true or false");
        return j_.at(key).get<bool>();
    }

    std::optional<std::string> string(const char* key) const {
        if (!has(key)) return std::nullopt;
        if (!j_.at(key).is_string()) throw InputError(field(key), "expected a string");
        return j_.at(key).get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
};

}  // namespace

EoimConfig RunConfig::resolved_eoim() const {
    EoimConfig c = eoim;
    c.mode = eoim_mode.value_or(correlation_class(target) == CorrelationClass::Phi ? EoimMode::on : EoimMode::off);
    return c;
}

NoiseConfig RunConfig::resolved_noise() const {
    NoiseConfig n = noise;
    n.singles_background_factor = background_factor.value_or(NoiseConfig::background_factor_for(correlation_class(target)));
    return n;
}

ScanMode RunConfig::resolved_scan_mode() const {
    return scan.mode.value_or(correlation_class(target) == CorrelationClass::Phi ? ScanMode::common
                                                                                 : ScanMode::differential);
}

nlohmann::json RunConfig::to_json() const {
    const EoimConfig e = resolved_eoim();
    const NoiseConfig n = resolved_noise();
    json beta_json = json{{"re", json::array()}, {"im", json::array()}};
    for (const auto& b : beta.beta) {
        beta_json["re"].push_back(b.real());
        beta_json["im"].push_back(b.imag());
    }
    return json{
        {"seed", seed},
        {"target", std::string(to_string(target))},
        {"grid",
         {{"pump_center_Hz", grid.pump_center() / kTwoPi},
          {"bin_offset_Hz", grid.bin_offset() / kTwoPi},
          {"bin_spacing_Hz", grid.bin_spacing() / kTwoPi}}},
        {"eoim",
         {{"mode", e.mode == EoimMode::on ? "on" : "off"},
          {"carrier_mW", e.carrier_mW},
          {"sideband_mW", e.sideband_mW},
          {"extinction_dB", e.extinction_dB},
          {"rf_phase_rad", e.rf_phase}}},
        {"beta", beta_json},
        {"noise",
         {{"pair_flux_per_s", n.pair_flux},
          {"singles_background_factor", n.singles_background_factor},
          {"coincidence_window_s", n.coincidence_window},
          {"detector_efficiency", n.detector_efficiency},
          {"integration_s", integration_s}}},
        {"tomography",
         {{"n_samples", tomography.n_samples},
          {"burn_in", tomography.burn_in},
          {"thin", tomography.thin},
          {"step_scale", tomography.step_scale},
          {"chains", tomography.chains},
          {"adapt", tomography.adapt},
          {"anneal", tomography.anneal},
          {"subtract_accidentals", tomography.subtract_accidentals}}},
        {"scan",
         {{"mode", to_string(resolved_scan_mode())},
          {"start_rad", scan.start_rad},
          {"stop_rad", scan.stop_rad},
          {"points", scan.points},
          {"counts_per_point", scan.counts_per_point}}},
    };
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    const Block root(j, "", {"seed", "target", "grid", "eoim", "beta", "noise", "tomography", "scan"});

    if (root.has("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned()) throw InputError("seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (auto t = root.string("target")) {
        try {
            cfg.target = parse_bell_label(*t);
        } catch (const InputError&) {
            throw InputError("target", "unknown Bell state '" + *t + "' (psi+, psi-, phi+, phi-)");
        }
    }

    if (root.has("grid")) {
        const Block g(root.at("grid"), "grid", {"pump_center_Hz", "bin_offset_Hz", "bin_spacing_Hz"});
        const double pc = g.number("pump_center_Hz", 384.15e12, 0.0, 1e17, true);
        const double off = g.number("bin_offset_Hz", 152.5e9, 0.0, 1e16, true);
        const double sp = g.number("bin_spacing_Hz", 25e9, 0.0, 1e16, true);
        if (!(off > sp)) throw InputError("grid.bin_offset_Hz", "must exceed bin_spacing_Hz");
        try {
            cfg.grid = FrequencyGrid::from_hz(pc, off, sp);
        } catch (const ContractViolation& e) {
            throw InputError("grid", e.what());
        }
    }

    if (root.has("eoim")) {
        const Block e(root.at("eoim"), "eoim", {"mode", "carrier_mW", "sideband_mW", "extinction_dB", "rf_phase_rad"});
        if (auto m = e.string("mode")) {
            if (*m == "on")
                cfg.eoim_mode = EoimMode::on;
            else if (*m == "off")
                cfg.eoim_mode = EoimMode::off;
            else
                throw InputError("eoim.mode", "expected \"on\" or \"off\", got '" + *m + "'");
        }
        cfg.eoim.carrier_mW = e.number("carrier_mW", cfg.eoim.carrier_mW, 0.0);
        cfg.eoim.sideband_mW = e.number("sideband_mW", cfg.eoim.sideband_mW, 0.0);
        cfg.eoim.extinction_dB = e.number("extinction_dB", cfg.eoim.extinction_dB, 0.0);
        cfg.eoim.rf_phase = e.number("rf_phase_rad", cfg.eoim.rf_phase);
    }

    if (root.has("beta")) {
        const Block b(root.at("beta"), "beta", {"re", "im"});
        try {
            cfg.beta.beta = state_from_json(root.at("beta"), "beta").c;
        } catch (const InputError& err) {
            throw InputError("beta", std::string(err.what()).substr(err.where().size() + 2));
        }
    }

    if (root.has("noise")) {
        const Block n(root.at("noise"), "noise",
                      {"pair_flux_per_s", "singles_background_factor", "coincidence_window_s", "detector_efficiency",
                       "integration_s"});
        cfg.noise.pair_flux = n.number("pair_flux_per_s", cfg.noise.pair_flux, 0.0);
        if (n.has("singles_background_factor")) {
            const json& v = n.at("singles_background_factor");
            if (v.is_string()) {
                if (v.get<std::string>() != "auto")
                    throw InputError("noise.singles_background_factor", "expected a number or \"auto\"");
            } else {
                cfg.background_factor = n.number("singles_background_factor", 1.0, 0.0);
            }
        }
        cfg.noise.coincidence_window = n.number("coincidence_window_s", cfg.noise.coincidence_window, 0.0);
        cfg.noise.detector_efficiency = n.number("detector_efficiency", cfg.noise.detector_efficiency, 0.0, 1.0);
        cfg.integration_s = n.number("integration_s", cfg.integration_s, 0.0, 1e9, true);
    }

    if (root.has("tomography")) {
        const Block t(root.at("tomography"), "tomography",
                      {"n_samples", "burn_in", "thin", "step_scale", "chains", "adapt", "anneal", "subtract_accidentals"});
        auto& s = cfg.tomography;
        s.n_samples = static_cast<int>(t.integer("n_samples", s.n_samples, 1, 10'000'000));
        s.burn_in = static_cast<int>(t.integer("burn_in", s.burn_in, 0, 100'000'000));
        s.thin = static_cast<int>(t.integer("thin", s.thin, 1, 1'000'000));
        s.step_scale = t.number("step_scale", s.step_scale, 0.0, 1.0, true);
        s.chains = static_cast<int>(t.integer("chains", s.chains, 1, 1024));
        s.adapt = t.boolean("adapt", s.adapt);
        s.anneal = t.boolean("anneal", s.anneal);
        s.subtract_accidentals = t.boolean("subtract_accidentals", s.subtract_accidentals);
    }

    if (root.has("scan")) {
        const Block s(root.at("scan"), "scan", {"mode", "start_rad", "stop_rad", "points", "counts_per_point"});
        if (auto m = s.string("mode")) cfg.scan.mode = parse_scan_mode(*m);
        cfg.scan.start_rad = s.number("start_rad", cfg.scan.start_rad);
        cfg.scan.stop_rad = s.number("stop_rad", cfg.scan.stop_rad);
        if (!(cfg.scan.stop_rad > cfg.scan.start_rad)) throw InputError("scan.stop_rad", "must exceed start_rad");
        cfg.scan.points = static_cast<int>(s.integer("points", cfg.scan.points, 8, 100000));
        cfg.scan.counts_per_point = s.number("counts_per_point", cfg.scan.counts_per_point, 0.0);
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.what() carries "at line L, column C"
        throw InputError(source, e.what());
    }
    return parse_config(j);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace fbell
