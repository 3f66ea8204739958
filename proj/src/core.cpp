#include "fbell/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "fbell/errors.hpp"

namespace fbell {

FrequencyGrid::FrequencyGrid(double pump_center, double bin_offset, double bin_spacing)
    : pump_center_(pump_center), bin_offset_(bin_offset), bin_spacing_(bin_spacing) {
    if (!std::isfinite(pump_center) || !std::isfinite(bin_offset) || !std::isfinite(bin_spacing))
        throw ContractViolation("FrequencyGrid: non-finite frequency");
    if (!(bin_spacing > 0.0)) throw ContractViolation("FrequencyGrid: bin_spacing must be > 0");
    if (!(bin_offset > bin_spacing))
        throw ContractViolation("FrequencyGrid: bin_offset must exceed bin_spacing");
    if (!(pump_center > 2.0 * (bin_offset + 2.0 * bin_spacing)))
        throw ContractViolation("FrequencyGrid: pump_center too small for the bin layout");
}

FrequencyGrid FrequencyGrid::from_hz(double pump_center_hz, double bin_offset_hz, double bin_spacing_hz) {
    return {kTwoPi * pump_center_hz, kTwoPi * bin_offset_hz, kTwoPi * bin_spacing_hz};
}

FrequencyGrid FrequencyGrid::reference() { return from_hz(384.15e12, 152.5e9, 25e9); }

double FrequencyGrid::bin_frequency(Photon photon, int index) const {
    if (index < -1 || index > 2) {
        std::ostringstream msg;
        msg << "bin index " << index << " outside the modelled range [-1, 2]";
        throw OutOfModel(msg.str());
    }
    const double half = 0.5 * pump_center_;
    if (photon == Photon::idler) return half - bin_offset_ + (index - 1) * bin_spacing_;
    return half + bin_offset_ + index * bin_spacing_;
}

double FrequencyGrid::pump_frequency(int k) const {
    if (k < -1 || k > 1) throw OutOfModel("pump line index outside {-1, 0, 1}");
    return pump_center_ + k * bin_spacing_;
}

double TwoQubitState::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : c) s += std::norm(a);
    return s;
}

bool TwoQubitState::is_normalized(double tol) const noexcept {
    return std::abs(norm_squared() - 1.0) <= tol;
}

TwoQubitState TwoQubitState::normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw DegenerateState("two-photon state has zero norm");
    TwoQubitState out = *this;
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : out.c) a *= inv;
    return out;
}

TwoQubitState TwoQubitState::with_global_phase(double theta) const {
    TwoQubitState out = *this;
    const cplx ph = std::polar(1.0, theta);
    for (auto& a : out.c) a *= ph;
    return out;
}

Vector4c TwoQubitState::vector() const { return Vector4c(c[0], c[1], c[2], c[3]); }

CorrelationClass correlation_class(BellLabel label) noexcept {
    return (label == BellLabel::PsiPlus || label == BellLabel::PsiMinus) ? CorrelationClass::Psi
                                                                         : CorrelationClass::Phi;
}

bool is_minus(BellLabel label) noexcept {
    return label == BellLabel::PsiMinus || label == BellLabel::PhiMinus;
}

std::string_view to_string(BellLabel label) noexcept {
    switch (label) {
        case BellLabel::PsiPlus: return "psi+";
        case BellLabel::PsiMinus: return "psi-";
        case BellLabel::PhiPlus: return "phi+";
        case BellLabel::PhiMinus: return "phi-";
    }
    return "?";
}

BellLabel parse_bell_label(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "psi+" || s == "psiplus") return BellLabel::PsiPlus;
    if (s == "psi-" || s == "psiminus") return BellLabel::PsiMinus;
    if (s == "phi+" || s == "phiplus") return BellLabel::PhiPlus;
    if (s == "phi-" || s == "phiminus") return BellLabel::PhiMinus;
    throw InputError("target", "unknown Bell state label '" + std::string(text) + "'");
}

TwoQubitState canonical_bell(BellLabel label) {
    const double r = 1.0 / std::sqrt(2.0);
    const double sign = is_minus(label) ? -1.0 : 1.0;
    TwoQubitState s;
    if (correlation_class(label) == CorrelationClass::Psi) {
        s(0, 1) = r;
        s(1, 0) = sign * r;
    } else {
        s(0, 0) = r;
        s(1, 1) = sign * r;
    }
    return s;
}

std::string density_matrix_defect(const Matrix4c& rho) {
    if (!rho.allFinite()) return "non-finite element";
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol) {
        std::ostringstream msg;
        msg << "not Hermitian (max deviation " << herm << ")";
        return msg.str();
    }
    const cplx tr = rho.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream msg;
        msg << "trace " << tr.real() << " differs from 1";
        return msg.str();
    }
    const Matrix4c h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(h, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < kEigenFloor) {
        std::ostringstream msg;
        msg << "negative eigenvalue " << lmin;
        return msg.str();
    }
    return {};
}

DensityMatrix::DensityMatrix(const Matrix4c& elements) : rho_(elements) {
    if (auto defect = density_matrix_defect(rho_); !defect.empty())
        throw ContractViolation("invalid density matrix: " + defect);
}

DensityMatrix DensityMatrix::pure(const TwoQubitState& state) {
    if (!state.is_normalized()) throw ContractViolation("pure(): state is not normalized");
    const Vector4c v = state.vector();
    Matrix4c rho = v * v.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(rho);
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Matrix4c::Identity() * 0.25); }

Eigen::Vector4d DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double fidelity(const Matrix4c& rho, const TwoQubitState& target) {
    if (!target.is_normalized()) throw ContractViolation("fidelity(): target state is not normalized");
    const Vector4c v = target.vector();
    const cplx f = v.dot(rho * v);  // dot() conjugates its left operand
    if (std::abs(f.imag()) >= 1e-10) throw NumericalFailure("fidelity(): complex overlap");
    return f.real();
}

double fidelity(const DensityMatrix& rho, const TwoQubitState& target) {
    return fidelity(rho.elements(), target);
}

}  // namespace fbell
