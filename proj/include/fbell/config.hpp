#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fbell/core.hpp"
#include "fbell/measurement.hpp"
#include "fbell/sensing.hpp"
#include "fbell/synthesis.hpp"
#include "fbell/tomography.hpp"

namespace fbell {

struct ScanSettings {
    std::optional<ScanMode> mode;  // default: the mode the target responds to
    double start_rad = 0.0;
    double stop_rad = kPi;
    int points = 64;
    double counts_per_point = 1e4;
};

// Everything a CLI run needs. Parsed from one JSON document; every block and
// key is optional, unknown keys are rejected.
//
// {
//   "seed": 1,
//   "target": "phi+",
//   "grid":  {"pump_center_Hz": 384.15e12, "bin_offset_Hz": 152.5e9, "bin_spacing_Hz": 25e9},
//   "eoim":  {"mode": "on", "carrier_mW": 6.2, "sideband_mW": 7, "extinction_dB": 17.5, "rf_phase_rad": 0},
//   "beta":  {"re": [1, 1, 1, 1], "im": [0, 0, 0, 0]},
//   "noise": {"pair_flux_per_s": 2.5e5, "singles_background_factor": "auto",
//             "coincidence_window_s": 2e-8, "detector_efficiency": 0.1, "integration_s": 4},
//   "tomography": {"n_samples": 2000, "burn_in": 1000, "thin": 10, "step_scale": 0.05,
//                  "chains": 4, "adapt": true, "anneal": true, "subtract_accidentals": true},
//   "scan":  {"mode": "common", "start_rad": 0, "stop_rad": 3.14159, "points": 64, "counts_per_point": 1e4}
// }
struct RunConfig {
    std::uint64_t seed = 1;
    BellLabel target = BellLabel::PhiPlus;
    FrequencyGrid grid = FrequencyGrid::reference();
    EoimConfig eoim{};
    std::optional<EoimMode> eoim_mode;  // unset: off for Psi targets, on for Phi targets
    PhaseMatching beta{};
    NoiseConfig noise{2.5e5, 1.0, 2e-8, 0.1};
    std::optional<double> background_factor;  // unset: 1 for Psi targets, 2 for Phi targets
    double integration_s = 4.0;
    ChainSettings tomography{};
    ScanSettings scan{};

    EoimConfig resolved_eoim() const;
    NoiseConfig resolved_noise() const;
    ScanMode resolved_scan_mode() const;

    nlohmann::json to_json() const;
};

// Throws InputError naming the offending field (or line/column for JSON
// syntax errors).
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

}  // namespace fbell
