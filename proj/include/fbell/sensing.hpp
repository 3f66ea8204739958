#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbell/core.hpp"
#include "fbell/measurement.hpp"
#include "fbell/synthesis.hpp"

namespace fbell {

enum class ScanMode { common, differential };

std::string to_string(ScanMode mode);
ScanMode parse_scan_mode(const std::string& text);

// Common mode puts the scanned phase on (I1, S1), differential on (S0, I1).
ShaperMask scan_mask(ScanMode mode, double phase);

struct ScanConfig {
    BellLabel state_label = BellLabel::PhiPlus;
    ScanMode mode = ScanMode::common;
    std::vector<double> phase_grid;
    double counts_per_point = 1e4;  // expected coincidences at a fringe maximum
    std::uint64_t seed = 0;

    void validate() const;
    // `points` phases evenly spaced over [start, stop).
    static std::vector<double> linear_grid(double start, double stop, int points);
};

struct ScanPoint {
    double phase = 0.0;
    ProbTable probs{};  // noiseless XX probabilities
    CountTable table{};
};

// Applies the mode mask to the canonical state, measures in the Hadamard
// basis and simulates counts for each grid phase. Points are independent and
// evaluated in parallel with RNG streams derived from (seed, point index);
// scan_serial is the single-threaded reference and returns the same table.
std::vector<ScanPoint> scan(const ScanConfig& cfg, const NoiseConfig& noise,
                            const FrequencyGrid& grid = FrequencyGrid::reference());
std::vector<ScanPoint> scan_serial(const ScanConfig& cfg, const NoiseConfig& noise,
                                   const FrequencyGrid& grid = FrequencyGrid::reference());

// Integration time giving `counts_per_point` expected coincidences at the
// XX fringe maximum of a Bell state.
double scan_integration_time(double counts_per_point, const NoiseConfig& noise);

// Fit of y = A cos^2(w x + theta) + B, normalized so that A >= 0, w >= 0 and
// theta in [0, pi).
struct FringeFit {
    double amplitude = 0.0;
    double offset = 0.0;
    double phase_offset = 0.0;
    double angular_frequency = 0.0;
    double visibility = 0.0;  // A / (A + 2B), clamped to [0, 1]
    double rss = 0.0;
    // One-sigma uncertainties from sigma^2 (J^T J)^-1 with sigma^2 = rss / (n - 4).
    double amplitude_err = 0.0;
    double angular_frequency_err = 0.0;
    bool flat = false;        // no significant fringe; angular_frequency is then 0
    bool converged = false;
    int iterations = 0;
};

// Needs >= 8 points. Levenberg-Marquardt from a periodogram frequency guess
// with starts theta in {0, pi/4, pi/2, 3pi/4}; stops when the relative RSS
// change drops below 1e-10 or after 200 iterations.
FringeFit fit_fringe(std::span<const double> phases, std::span<const double> values);

// Column of counts (or probabilities) for one bin pair across a scan.
std::vector<double> scan_column(const std::vector<ScanPoint>& points, int idler_bin, int signal_bin,
                                bool use_probs = false);

// tau = phase / dw: the common-mode delay for a common phase, the magnitude
// of the differential-mode delay for a differential phase.
double phase_to_delay(double phase, const FrequencyGrid& grid, ScanMode mode);

// Delays reproducing scan_mask(mode, phase) exactly, up to global phase:
// common  -> tau_S = tau_I =  phase / dw
// differential -> tau_S = -phase / dw, tau_I = +phase / dw.
DelayPair delays_for_phase(double phase, const FrequencyGrid& grid, ScanMode mode);

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points);
nlohmann::json fringe_fit_to_json(const FringeFit& fit);

}  // namespace fbell
