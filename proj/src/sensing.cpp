#include "fbell/sensing.hpp"

#include <cmath>
#include <ostream>

#include <boost/math/distributions/fisher_f.hpp>

#include "fbell/errors.hpp"
#include "fbell/json_io.hpp"
#include "fbell/omp.hpp"

namespace fbell {

std::string to_string(ScanMode mode) { return mode == ScanMode::common ? "common" : "differential"; }

ScanMode parse_scan_mode(const std::string& text) {
    if (text == "common") return ScanMode::common;
    if (text == "differential") return ScanMode::differential;
    throw InputError("scan.mode", "expected \"common\" or \"differential\", got '" + text + "'");
}

ShaperMask scan_mask(ScanMode mode, double phase) {
    return mode == ScanMode::common ? ShaperMask::common_mode(phase) : ShaperMask::differential_mode(phase);
}

void ScanConfig::validate() const {
    if (phase_grid.empty()) throw ContractViolation("scan: phase grid is empty");
    for (std::size_t i = 0; i < phase_grid.size(); ++i) {
        if (!std::isfinite(phase_grid[i])) throw ContractViolation("scan: non-finite phase");
        if (i > 0 && !(phase_grid[i] > phase_grid[i - 1]))
            throw ContractViolation("scan: phase grid must be strictly increasing");
    }
    if (!(counts_per_point >= 0.0) || !std::isfinite(counts_per_point))
        throw ContractViolation("scan: counts_per_point must be >= 0");
}

std::vector<double> ScanConfig::linear_grid(double start, double stop, int points) {
    if (points < 1) throw ContractViolation("scan: need at least one point");
    std::vector<double> g(points);
    const double step = (stop - start) / points;
    for (int i = 0; i < points; ++i) g[i] = start + i * step;
    return g;
}

double scan_integration_time(double counts_per_point, const NoiseConfig& noise) {
    noise.validate();
    const double retention = computational_retention(MeasurementBasis::xx());
    const double peak = 0.5 * retention * retention;  // 2 eta^4
    const double rate = noise.pair_flux * noise.detector_efficiency * noise.detector_efficiency * peak;
    if (!(rate > 0.0)) throw ContractViolation("scan: zero coincidence rate (pair_flux or efficiency is 0)");
    return counts_per_point / rate;
}

namespace {

ScanPoint scan_point(const ScanConfig& cfg, const NoiseConfig& noise, const FrequencyGrid& grid,
                     const TwoQubitState& base, double integration, std::size_t i) {
    ScanPoint pt;
    pt.phase = cfg.phase_grid[i];
    const TwoQubitState s = apply_mask(base, scan_mask(cfg.mode, pt.phase));
    const MeasurementBasis xx = MeasurementBasis::xx();
    pt.probs = coincidence_probs(s, xx, grid);
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    pt.table = simulate_counts(pt.probs, noise, xx, integration, rng);
    return pt;
}

}  // namespace

std::vector<ScanPoint> scan_serial(const ScanConfig& cfg, const NoiseConfig& noise, const FrequencyGrid& grid) {
    cfg.validate();
    const double t = scan_integration_time(cfg.counts_per_point, noise);
    const TwoQubitState base = canonical_bell(cfg.state_label);
    std::vector<ScanPoint> out(cfg.phase_grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scan_point(cfg, noise, grid, base, t, i);
    return out;
}

std::vector<ScanPoint> scan(const ScanConfig& cfg, const NoiseConfig& noise, const FrequencyGrid& grid) {
    cfg.validate();
    const double t = scan_integration_time(cfg.counts_per_point, noise);
    const TwoQubitState base = canonical_bell(cfg.state_label);
    const auto n = static_cast<long>(cfg.phase_grid.size());
    std::vector<ScanPoint> out(n);
    FBELL_OMP(parallel for schedule(static))
    for (long i = 0; i < n; ++i) out[i] = scan_point(cfg, noise, grid, base, t, static_cast<std::size_t>(i));
    return out;
}

std::vector<double> scan_column(const std::vector<ScanPoint>& points, int idler_bin, int signal_bin, bool use_probs) {
    if (idler_bin < 0 || idler_bin > 1 || signal_bin < 0 || signal_bin > 1)
        throw OutOfModel("scan_column: bin index outside {0, 1}");
    std::vector<double> col;
    col.reserve(points.size());
    for (const auto& p : points)
        col.push_back(use_probs ? p.probs[idler_bin][signal_bin]
                                : static_cast<double>(p.table.counts[idler_bin][signal_bin]));
    return col;
}

namespace {

constexpr double kFlatPValue = 1e-3;

using Vec4 = Eigen::Vector4d;  // (A, w, theta, B)

struct LmResult {
    Vec4 p;
    double rss;
    Eigen::Matrix4d jtj;
    bool converged;
    int iterations;
};

double residuals(std::span<const double> x, std::span<const double> y, const Vec4& p, Eigen::VectorXd* r,
                 Eigen::MatrixXd* jac) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = p(1) * x[i] + p(2);
        const double c = std::cos(u);
        const double model = p(0) * c * c + p(3);
        const double res = y[i] - model;
        rss += res * res;
        if (r) (*r)(i) = res;
        if (jac) {
            const double s2 = std::sin(2.0 * u);
            (*jac)(i, 0) = c * c;
            (*jac)(i, 1) = -p(0) * s2 * x[i];
            (*jac)(i, 2) = -p(0) * s2;
            (*jac)(i, 3) = 1.0;
        }
    }
    return rss;
}

LmResult levenberg_marquardt(std::span<const double> x, std::span<const double> y, Vec4 p, double scale) {
    constexpr int kMaxIter = 200;
    constexpr double kRelTol = 1e-10;
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd r(n);
    Eigen::MatrixXd jac(n, 4);
    double rss = residuals(x, y, p, &r, &jac);
    double lambda = 1e-3;
    bool converged = false;
    int it = 0;
    Eigen::Matrix4d jtj = jac.transpose() * jac;
    const double tiny = 1e-28 * scale * scale * static_cast<double>(n);
    for (; it < kMaxIter && !converged; ++it) {
        if (rss <= tiny) {
            converged = true;
            break;
        }
        jtj = jac.transpose() * jac;
        const Vec4 g = jac.transpose() * r;
        bool improved = false;
        while (lambda < 1e16) {
            Eigen::Matrix4d a = jtj;
            for (int d = 0; d < 4; ++d) a(d, d) += lambda * std::max(jtj(d, d), 1e-30);
            const Vec4 step = a.ldlt().solve(g);
            const Vec4 trial = p + step;
            const double trial_rss = residuals(x, y, trial, nullptr, nullptr);
            if (std::isfinite(trial_rss) && trial_rss < rss) {
                const double rel = (rss - trial_rss) / rss;
                p = trial;
                rss = residuals(x, y, p, &r, &jac);
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < kRelTol) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            converged = true;  // no descent direction left: local minimum
            break;
        }
    }
    jtj = jac.transpose() * jac;
    return {p, rss, jtj, converged, it};
}

// Frequency guess: best least-squares fit of y ~ a + b cos(2 w x) + c sin(2 w x)
// over a grid of w up to the sampling limit.
double periodogram_frequency(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double span = x.back() - x.front();
    const double h = span / static_cast<double>(n - 1);
    const double w_max = kPi / (2.0 * h);
    const double w_min = kPi / (4.0 * span);  // a quarter fringe across the scan
    constexpr int kCandidates = 4000;
    double best_w = w_min, best_rss = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd yy(n);
    for (std::size_t i = 0; i < n; ++i) yy(i) = y[i];
    for (int c = 0; c <= kCandidates; ++c) {
        const double w = w_min + (w_max - w_min) * c / kCandidates;
        for (std::size_t i = 0; i < n; ++i) {
            design(i, 0) = 1.0;
            design(i, 1) = std::cos(2.0 * w * x[i]);
            design(i, 2) = std::sin(2.0 * w * x[i]);
        }
        const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(yy);
        const double rss = (design * coef - yy).squaredNorm();
        if (rss < best_rss) {
            best_rss = rss;
            best_w = w;
        }
    }
    return best_w;
}

}  // namespace

FringeFit fit_fringe(std::span<const double> phases, std::span<const double> values) {
    if (phases.size() != values.size()) throw ContractViolation("fit_fringe: size mismatch");
    if (phases.size() < 8) throw ContractViolation("fit_fringe: need at least 8 points");
    for (std::size_t i = 1; i < phases.size(); ++i)
        if (!(phases[i] > phases[i - 1])) throw ContractViolation("fit_fringe: phases must be strictly increasing");

    double ymin = values[0], ymax = values[0], ysum = 0.0;
    for (double v : values) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
        ysum += v;
    }
    const auto n = static_cast<double>(values.size());
    const double scale = std::max(std::abs(ymax), std::abs(ymin));

    FringeFit fit;
    if (ymax - ymin <= 1e-12 * scale || scale == 0.0) {
        fit.offset = ysum / n;
        fit.flat = true;
        fit.converged = true;
        for (double v : values) fit.rss += (v - fit.offset) * (v - fit.offset);
        return fit;
    }

    const double w0 = periodogram_frequency(phases, values);
    LmResult best{};
    best.rss = std::numeric_limits<double>::infinity();
    for (double theta0 : {0.0, kPi / 4.0, kPi / 2.0, 3.0 * kPi / 4.0}) {
        const Vec4 start(ymax - ymin, w0, theta0, ymin);
        LmResult r = levenberg_marquardt(phases, values, start, scale);
        if (r.rss < best.rss) best = r;
    }

    double a = best.p(0), w = best.p(1), theta = best.p(2), b = best.p(3);
    if (a < 0.0) {
        b += a;
        a = -a;
        theta += kPi / 2.0;
    }
    if (w < 0.0) {
        w = -w;
        theta = -theta;
    }
    theta = std::fmod(theta, kPi);
    if (theta < 0.0) theta += kPi;

    fit.amplitude = a;
    fit.offset = b;
    fit.phase_offset = theta;
    fit.angular_frequency = w;
    fit.rss = best.rss;
    fit.converged = best.converged;
    fit.iterations = best.iterations;
    const double denom = a + 2.0 * b;
    fit.visibility = denom > 0.0 ? std::clamp(a / denom, 0.0, 1.0) : 0.0;

    if (values.size() > 4) {
        const double sigma2 = best.rss / (n - 4.0);
        const Eigen::Matrix4d cov = sigma2 * best.jtj.completeOrthogonalDecomposition().pseudoInverse();
        fit.amplitude_err = std::sqrt(std::max(0.0, cov(0, 0)));
        fit.angular_frequency_err = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    // F-test of the sinusoid against a constant
    double rss0 = 0.0;
    for (double v : values) rss0 += (v - ysum / n) * (v - ysum / n);
    bool insignificant = false;
    if (best.rss > 0.0) {
        const double f = std::max(0.0, (rss0 - best.rss) / 3.0) / (best.rss / (n - 4.0));
        const boost::math::fisher_f dist(3.0, n - 4.0);
        insignificant = boost::math::cdf(dist, f) < 1.0 - kFlatPValue;
    }
    if (a <= 1e-9 * scale || insignificant || (fit.amplitude_err > 0.0 && a < 3.0 * fit.amplitude_err)) {
        fit.flat = true;
        fit.angular_frequency = 0.0;
    }
    return fit;
}

double phase_to_delay(double phase, const FrequencyGrid& grid, ScanMode /*mode*/) {
    return phase / grid.bin_spacing();
}

DelayPair delays_for_phase(double phase, const FrequencyGrid& grid, ScanMode mode) {
    const double tau = phase / grid.bin_spacing();
    if (mode == ScanMode::common) return {tau, tau};
    return {-tau, tau};
}

void write_scan_csv(std::ostream& os, const std::vector<ScanPoint>& points) {
    os << "phase_rad,i_bin,s_bin,counts,accidentals\n";
    for (const auto& p : points)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                os << format_double(p.phase) << ',' << k << ',' << l << ',' << p.table.counts[k][l] << ','
                   << p.table.accidentals[k][l] << '\n';
}

nlohmann::json fringe_fit_to_json(const FringeFit& fit) {
    return nlohmann::json{
        {"amplitude", fit.amplitude},
        {"offset", fit.offset},
        {"phase_offset", fit.phase_offset},
        {"angular_frequency", fit.angular_frequency},
        {"visibility", fit.visibility},
        {"rss", fit.rss},
        {"amplitude_err", fit.amplitude_err},
        {"angular_frequency_err", fit.angular_frequency_err},
        {"flat", fit.flat},
        {"converged", fit.converged},
        {"iterations", fit.iterations},
    };
}

}  // namespace fbell
