#pragma once

#include <array>

#include "fbell/core.hpp"

namespace fbell {

// Complex pump amplitudes (sqrt of power) at w_P,-1, w_P,0, w_P,+1.
struct PumpSpectrum {
    std::array<cplx, 3> alpha{};

    cplx& at(int k) { return alpha[k + 1]; }
    const cplx& at(int k) const { return alpha[k + 1]; }
    bool usable() const noexcept;
};

// beta_mn relative phase-matching coefficients, (00, 01, 10, 11) order.
// Default is flat: unit magnitude, zero phase.
struct PhaseMatching {
    std::array<cplx, 4> beta{cplx(1.0), cplx(1.0), cplx(1.0), cplx(1.0)};

    const cplx& operator()(int m, int n) const { return beta[TwoQubitState::index(m, n)]; }
};

enum class EoimMode { off, on };

// Intensity-modulator pump sculptor. In `off` mode a single carrier line is
// passed at carrier_mW. In `on` mode the modulator is biased at null and
// emits two first-order sidebands of sideband_mW each, with a residual
// carrier extinction_dB below a sideband.
struct EoimConfig {
    EoimMode mode = EoimMode::off;
    double carrier_mW = 6.2;
    double extinction_dB = 17.5;
    double sideband_mW = 7.0;
    double rf_phase = 0.0;
};

PumpSpectrum eoim_output(const EoimConfig& cfg);

// c00 = a_-1 b00, c01 = a_0 b01, c10 = a_0 b10, c11 = a_+1 b11. The result is
// not normalized. Throws DegenerateState if every coefficient vanishes.
TwoQubitState synthesize(const PumpSpectrum& pump, const PhaseMatching& pm = {});

// Per-bin pulse-shaper settings, ordered (I0, I1, S0, S1).
struct ShaperMask {
    std::array<double, 4> phase{};
    std::array<double, 4> amplitude{1.0, 1.0, 1.0, 1.0};

    static constexpr int I0 = 0, I1 = 1, S0 = 2, S1 = 3;

    static ShaperMask identity() { return {}; }
    // Phase `phi` on the idler/signal bins (I1, S1).
    static ShaperMask common_mode(double phi);
    // Phase `phi` on (S0, I1).
    static ShaperMask differential_mode(double phi);

    // Elementwise: phases add, amplitudes multiply.
    ShaperMask then(const ShaperMask& next) const;
};

TwoQubitState apply_mask(const TwoQubitState& state, const ShaperMask& mask);

// Relative phase of the pair that defines the label's class:
// arg(c10/c01) for Psi-class, arg(c11/c00) for Phi-class.
double bell_phase(const TwoQubitState& state, CorrelationClass cls);

// Pure-phase mask turning Psi^(kappa) (Phi^(nu)) into the canonical `label`
// state up to global phase. The correction is split evenly over (I1, S0) for
// Psi targets and (I1, S1) for Phi targets.
ShaperMask compensate(BellLabel label, double measured_phase);

// Wraps to (-pi, pi].
double wrap_phase(double phi) noexcept;

}  // namespace fbell
