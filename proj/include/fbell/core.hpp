#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace fbell {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Vector4c = Eigen::Matrix<cplx, 4, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Validation tolerances for DensityMatrix and normalized states.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenFloor = -1e-10;
inline constexpr double kNormTol = 1e-10;

enum class Photon { idler, signal };

// Frequency-bin bookkeeping. All values are angular frequencies in rad/s.
//
// Idler bins sit below half the central pump frequency, signal bins above:
//   w_I,k = w_P0/2 - offset + (k-1) * spacing
//   w_S,l = w_P0/2 + offset + l * spacing
// so that w_I,0 + w_S,1 = w_I,1 + w_S,0 = w_P0.
class FrequencyGrid {
public:
    FrequencyGrid(double pump_center, double bin_offset, double bin_spacing);

    static FrequencyGrid from_hz(double pump_center_hz, double bin_offset_hz, double bin_spacing_hz);
    // 384.15 THz pump, 152.5 GHz offset, 25 GHz spacing.
    static FrequencyGrid reference();

    double pump_center() const noexcept { return pump_center_; }
    double bin_offset() const noexcept { return bin_offset_; }
    double bin_spacing() const noexcept { return bin_spacing_; }

    // Bin centre for index in {-1, 0, 1, 2}; the outer two are the immediate
    // neighbours outside the computational space. Throws OutOfModel otherwise.
    double bin_frequency(Photon photon, int index) const;

    // Pump line that drives pair (m, n): w_P,(m+n-1).
    double pump_frequency(int k) const;

private:
    double pump_center_;
    double bin_offset_;
    double bin_spacing_;
};

// Amplitudes c_mn on |I_m S_n>, stored in (00, 01, 10, 11) order. Not
// normalized implicitly; call normalized() when a physical state is needed.
struct TwoQubitState {
    std::array<cplx, 4> c{};

    static constexpr int index(int m, int n) noexcept { return 2 * m + n; }

    cplx& operator()(int m, int n) { return c[index(m, n)]; }
    const cplx& operator()(int m, int n) const { return c[index(m, n)]; }

    double norm_squared() const noexcept;
    bool is_normalized(double tol = kNormTol) const noexcept;
    // Throws DegenerateState for the zero vector.
    TwoQubitState normalized() const;
    TwoQubitState with_global_phase(double theta) const;
    Vector4c vector() const;
};

enum class BellLabel { PsiPlus, PsiMinus, PhiPlus, PhiMinus };
enum class CorrelationClass { Psi, Phi };

CorrelationClass correlation_class(BellLabel label) noexcept;
// True for the '-' states (relative phase pi).
bool is_minus(BellLabel label) noexcept;
std::string_view to_string(BellLabel label) noexcept;
// Accepts "psi+", "PsiPlus", "phi-", ... (case-insensitive). Throws InputError.
BellLabel parse_bell_label(std::string_view text);

TwoQubitState canonical_bell(BellLabel label);

// Validated 4x4 density operator: Hermitian, unit trace and positive
// semidefinite within the library tolerances. Violations throw
// ContractViolation; nothing is clipped or repaired.
class DensityMatrix {
public:
    explicit DensityMatrix(const Matrix4c& elements);

    static DensityMatrix pure(const TwoQubitState& state);
    static DensityMatrix maximally_mixed();

    const Matrix4c& elements() const noexcept { return rho_; }
    cplx operator()(int row, int col) const { return rho_(row, col); }
    Eigen::Vector4d eigenvalues() const;

private:
    Matrix4c rho_;
};

// Runs the DensityMatrix checks without constructing one; returns an empty
// string when valid, otherwise a description of the first failed check.
std::string density_matrix_defect(const Matrix4c& rho);

// <target|rho|target>. Target must be normalized (ContractViolation).
double fidelity(const DensityMatrix& rho, const TwoQubitState& target);
double fidelity(const Matrix4c& rho, const TwoQubitState& target);

}  // namespace fbell
