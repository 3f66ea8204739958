#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbell/core.hpp"
#include "fbell/rng.hpp"

namespace fbell {

// J_p(x) for integer order p (negative orders via J_-p = (-1)^p J_p).
double bessel_j(int p, double x);

// Modulation index at which J_0(m) == J_1(m) (~1.4347 rad); the phase
// modulator then splits a bin equally between itself and both neighbours.
double hadamard_modulation_index();
// J_0 at the Hadamard index (~0.548).
double hadamard_eta();

// Electro-optic phase modulator driven at the bin spacing:
// exp(i m sin(dw t + phi)).
struct EopmConfig {
    double mod_index = 0.0;
    double rf_phase = 0.0;
    bool enabled = false;

    static EopmConfig hadamard(double rf_phase = 0.0);
};

// J_p(m) e^{-i p phi} for |p| <= 1; OutOfModel otherwise. A disabled EOPM is
// the m = 0 case (identity).
cplx mixing_weight(const EopmConfig& cfg, int p);

enum class BasisKind { ZZ, XX };

struct MeasurementBasis {
    BasisKind kind = BasisKind::ZZ;
    EopmConfig eopm{};

    static MeasurementBasis zz() { return {}; }
    static MeasurementBasis xx(double rf_phase = 0.0) { return {BasisKind::XX, EopmConfig::hadamard(rf_phase)}; }
};

std::string to_string(BasisKind kind);
BasisKind parse_basis(const std::string& text);

// Output-bin k <- input-bin m weights W(k, m) = J_{k-m}(m) e^{-i(k-m)phi}
// restricted to the computational bins.
Eigen::Matrix2cd transfer_matrix(const MeasurementBasis& basis);

// Fraction of a single photon in a computational bin that stays inside the
// computational bins after the modulator: sum_k |W(k, m)|^2 (= J0^2 + J1^2
// for XX, 1 for ZZ; independent of m).
double computational_retention(const MeasurementBasis& basis);

struct DelayPair {
    double tau_s = 0.0;
    double tau_i = 0.0;

    double common() const noexcept { return 0.5 * (tau_s + tau_i); }
    double differential() const noexcept { return 0.5 * (tau_s - tau_i); }
};

// P[k][l]: coincidence probability between idler bin k and signal bin l.
using ProbTable = std::array<std::array<double, 2>, 2>;

// Detection amplitudes <vac| c_I,k c_S,l |psi> in (00, 01, 10, 11) order.
// Delays enter relative to bin 0 of each photon; the dropped factor
// exp(i(tau_I w_I,0 + tau_S w_S,0)) is a global phase.
Vector4c detection_amplitudes(const TwoQubitState& state, const MeasurementBasis& basis,
                              const FrequencyGrid& grid, const DelayPair& delays = {});

// Coincidence probabilities for a normalized state. XX probabilities are not
// renormalized: what leaks outside the four bins is loss.
ProbTable coincidence_probs(const TwoQubitState& state, const MeasurementBasis& basis,
                            const FrequencyGrid& grid, const DelayPair& delays = {});

// Same computation, intended for states carrying residual-carrier
// contamination; kept separate so the leakage accounting reads clearly.
ProbTable leakage_probs(const TwoQubitState& state_with_background, const MeasurementBasis& basis,
                        const FrequencyGrid& grid, const DelayPair& delays = {});

struct NoiseConfig {
    double pair_flux = 1e4;                 // desired coincidences per second at unit state norm
    double singles_background_factor = 1.0; // 1 for Psi-class pumping, 2 for Phi-class
    double coincidence_window = 0.0;        // seconds
    double detector_efficiency = 1.0;

    void validate() const;
    // Background factor implied by the pump geometry for a target class.
    static double background_factor_for(CorrelationClass cls) { return cls == CorrelationClass::Phi ? 2.0 : 1.0; }
};

using CountGrid = std::array<std::array<std::uint64_t, 2>, 2>;

struct CountTable {
    MeasurementBasis basis{};
    CountGrid counts{};
    CountGrid accidentals{};
    double integration_s = 0.0;

    std::uint64_t total() const noexcept;
    // counts - accidentals, clipped at zero.
    CountGrid subtracted() const noexcept;
};

// Expected true-coincidence and accidental means for each bin pair.
struct ExpectedCounts {
    ProbTable coincidences{};
    ProbTable accidentals{};
};
ExpectedCounts expected_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                               double integration_s);

// Raw coincidences are Poisson(true + accidental) and the accidentals column
// is an independent Poisson estimate of the accidental level, as obtained
// from a time-shifted histogram.
CountTable simulate_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                           double integration_s, Rng& rng);
CountTable simulate_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                           double integration_s, std::uint64_t seed);

// Desired / undesired ZZ counts for the class's correlation pattern
// (diagonal for Phi, anti-diagonal for Psi). +inf for a zero denominator.
double jsi_ratio(const CountTable& table, CorrelationClass cls, bool subtract_accidentals = false);
double jsi_ratio(const ProbTable& probs, CorrelationClass cls);

// Coincidences-to-accidentals ratio over the class's desired bins.
double coincidence_to_accidental_ratio(const CountTable& table, CorrelationClass cls);

// CSV with header `basis,idler_bin,signal_bin,counts,accidentals,integration_s`.
// XX rows are read back with the Hadamard preset at rf phase 0.
void write_count_csv(std::ostream& os, const std::vector<CountTable>& tables);
std::vector<CountTable> read_count_csv(std::istream& is, const std::string& source = "counts");
std::vector<CountTable> read_count_csv_file(const std::string& path);

}  // namespace fbell
