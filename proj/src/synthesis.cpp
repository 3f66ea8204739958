#include "fbell/synthesis.hpp"

#include <cmath>

#include "fbell/errors.hpp"

namespace fbell {

bool PumpSpectrum::usable() const noexcept {
    for (const auto& a : alpha)
        if (std::abs(a) > 0.0) return true;
    return false;
}

PumpSpectrum eoim_output(const EoimConfig& cfg) {
    if (!(cfg.carrier_mW >= 0.0) || !(cfg.sideband_mW >= 0.0))
        throw ContractViolation("eoim_output: powers must be >= 0");
    if (!(cfg.extinction_dB >= 0.0)) throw ContractViolation("eoim_output: extinction_dB must be >= 0");

    PumpSpectrum p;
    if (cfg.mode == EoimMode::off) {
        p.at(0) = std::sqrt(cfg.carrier_mW);
        return p;
    }
    // Null-biased modulation: the +1 sideband carries e^{+i phi}, the -1
    // sideband -e^{-i phi} (J_-1 = -J_1).
    const double sb = std::sqrt(cfg.sideband_mW);
    p.at(1) = std::polar(sb, cfg.rf_phase);
    p.at(-1) = -std::polar(sb, -cfg.rf_phase);
    // 10^(-inf) == 0, so infinite extinction yields an exact zero carrier.
    p.at(0) = std::sqrt(cfg.sideband_mW * std::pow(10.0, -cfg.extinction_dB / 10.0));
    return p;
}

TwoQubitState synthesize(const PumpSpectrum& pump, const PhaseMatching& pm) {
    TwoQubitState s;
    s(0, 0) = pump.at(-1) * pm(0, 0);
    s(0, 1) = pump.at(0) * pm(0, 1);
    s(1, 0) = pump.at(0) * pm(1, 0);
    s(1, 1) = pump.at(1) * pm(1, 1);
    if (!(s.norm_squared() > 0.0)) throw DegenerateState("synthesize: pump and phase matching give an empty state");
    return s;
}

ShaperMask ShaperMask::common_mode(double phi) {
    ShaperMask m;
    m.phase[I1] = phi;
    m.phase[S1] = phi;
    return m;
}

ShaperMask ShaperMask::differential_mode(double phi) {
    ShaperMask m;
    m.phase[S0] = phi;
    m.phase[I1] = phi;
    return m;
}

ShaperMask ShaperMask::then(const ShaperMask& next) const {
    ShaperMask out;
    for (int i = 0; i < 4; ++i) {
        out.phase[i] = phase[i] + next.phase[i];
        out.amplitude[i] = amplitude[i] * next.amplitude[i];
    }
    return out;
}

TwoQubitState apply_mask(const TwoQubitState& state, const ShaperMask& mask) {
    for (double a : mask.amplitude)
        if (!(a >= 0.0 && a <= 1.0)) throw ContractViolation("apply_mask: amplitudes must lie in [0, 1]");
    TwoQubitState out;
    for (int m = 0; m < 2; ++m) {
        for (int n = 0; n < 2; ++n) {
            const int ib = ShaperMask::I0 + m;
            const int sb = ShaperMask::S0 + n;
            out(m, n) = state(m, n) * mask.amplitude[ib] * mask.amplitude[sb] *
                        std::polar(1.0, mask.phase[ib] + mask.phase[sb]);
        }
    }
    return out;
}

double bell_phase(const TwoQubitState& state, CorrelationClass cls) {
    const cplx a = cls == CorrelationClass::Psi ? state(0, 1) : state(0, 0);
    const cplx b = cls == CorrelationClass::Psi ? state(1, 0) : state(1, 1);
    if (a == cplx(0.0) || b == cplx(0.0))
        throw DegenerateState("bell_phase: state has no population in the requested class");
    return std::arg(b / a);
}

double wrap_phase(double phi) noexcept {
    double w = std::remainder(phi, kTwoPi);  // [-pi, pi]
    if (w <= -kPi) w += kTwoPi;
    return w;
}

ShaperMask compensate(BellLabel label, double measured_phase) {
    const double target = is_minus(label) ? kPi : 0.0;
    const double half = 0.5 * wrap_phase(target - measured_phase);
    ShaperMask m;
    m.phase[ShaperMask::I1] = half;
    if (correlation_class(label) == CorrelationClass::Psi)
        m.phase[ShaperMask::S0] = half;
    else
        m.phase[ShaperMask::S1] = half;
    return m;
}

}  // namespace fbell
