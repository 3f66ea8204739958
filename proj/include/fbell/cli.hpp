#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbell/config.hpp"

namespace fbell {

struct SynthResult {
    TwoQubitState raw;         // un-normalized SPDC amplitudes
    TwoQubitState state;       // normalized, after phase compensation
    double measured_phase = 0.0;
    ShaperMask mask;
    ProbTable zz{};
    double leakage_ratio = 0.0;  // desired / undesired ZZ probability, +inf when leakage-free
    double fidelity = 0.0;
};

struct MeasureResult {
    SynthResult synth;
    ProbTable zz_probs{};
    ProbTable xx_probs{};
    CountTable zz;
    CountTable xx;
};

struct SenseResult {
    ScanMode mode = ScanMode::common;
    std::vector<ScanPoint> points;
    std::array<FringeFit, 4> fits;  // (00, 01, 10, 11)
};

SynthResult run_synth(const RunConfig& cfg);
MeasureResult run_measure(const RunConfig& cfg);
PosteriorSummary run_tomo(const RunConfig& cfg, const std::vector<CountTable>& tables);
SenseResult run_sense(const RunConfig& cfg);

std::string sha256_file(const std::filesystem::path& path);

// Entry point of the `fbell` tool. Exit codes: 0 success, 2 config/input
// error, 3 degenerate physics, 4 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbell
