#include "fbell/measurement.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fbell/errors.hpp"
#include "fbell/json_io.hpp"

namespace fbell {

double bessel_j(int p, double x) {
    const int order = p < 0 ? -p : p;
    const double sign = (p < 0 && (order % 2 == 1)) ? -1.0 : 1.0;
    if (x < 0.0) {
        // J_n(-x) = (-1)^n J_n(x)
        const double v = std::cyl_bessel_j(static_cast<double>(order), -x);
        return sign * ((order % 2 == 1) ? -v : v);
    }
    return sign * std::cyl_bessel_j(static_cast<double>(order), x);
}

double hadamard_modulation_index() {
    static const double root = [] {
        double lo = 1.3, hi = 1.6;  // J0 - J1 changes sign once on this bracket
        auto f = [](double m) { return bessel_j(0, m) - bessel_j(1, m); };
        double flo = f(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

double hadamard_eta() { return bessel_j(0, hadamard_modulation_index()); }

EopmConfig EopmConfig::hadamard(double rf_phase) { return {hadamard_modulation_index(), rf_phase, true}; }

cplx mixing_weight(const EopmConfig& cfg, int p) {
    if (p < -1 || p > 1) throw OutOfModel("mixing_weight: sideband order outside {-1, 0, 1}");
    if (!(cfg.mod_index >= 0.0)) throw ContractViolation("mixing_weight: modulation index must be >= 0");
    if (!cfg.enabled) return p == 0 ? cplx(1.0) : cplx(0.0);
    return bessel_j(p, cfg.mod_index) * std::polar(1.0, -p * cfg.rf_phase);
}

std::string to_string(BasisKind kind) { return kind == BasisKind::ZZ ? "ZZ" : "XX"; }

BasisKind parse_basis(const std::string& text) {
    if (text == "ZZ" || text == "zz") return BasisKind::ZZ;
    if (text == "XX" || text == "xx") return BasisKind::XX;
    throw InputError("basis", "unknown basis '" + text + "' (expected ZZ or XX)");
}

Eigen::Matrix2cd transfer_matrix(const MeasurementBasis& basis) {
    Eigen::Matrix2cd w;
    if (basis.kind == BasisKind::ZZ) return Eigen::Matrix2cd::Identity();
    for (int k = 0; k < 2; ++k)
        for (int m = 0; m < 2; ++m) w(k, m) = mixing_weight(basis.eopm, k - m);
    return w;
}

double computational_retention(const MeasurementBasis& basis) {
    const Eigen::Matrix2cd w = transfer_matrix(basis);
    return w.col(0).squaredNorm();
}

Vector4c detection_amplitudes(const TwoQubitState& state, const MeasurementBasis& basis, const FrequencyGrid& grid,
                              const DelayPair& delays) {
    const Eigen::Matrix2cd w = transfer_matrix(basis);
    const double dw = grid.bin_spacing();
    // b_I,m = a_I,m e^{i tau_I w_I,m}; only the m-dependent part matters.
    std::array<cplx, 4> delayed;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
            delayed[2 * m + n] = state(m, n) * std::polar(1.0, (delays.tau_i * m + delays.tau_s * n) * dw);

    Vector4c amp = Vector4c::Zero();
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) amp(2 * k + l) += w(k, m) * w(l, n) * delayed[2 * m + n];
    return amp;
}

ProbTable coincidence_probs(const TwoQubitState& state, const MeasurementBasis& basis, const FrequencyGrid& grid,
                            const DelayPair& delays) {
    if (!state.is_normalized()) throw ContractViolation("coincidence_probs: state is not normalized");
    ProbTable p{};
    if (basis.kind == BasisKind::ZZ) {
        // no bin mixing: delays only rotate each amplitude's phase
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) p[k][l] = std::norm(state(k, l));
        return p;
    }
    const Vector4c amp = detection_amplitudes(state, basis, grid, delays);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) p[k][l] = std::norm(amp(2 * k + l));
    return p;
}

ProbTable leakage_probs(const TwoQubitState& state_with_background, const MeasurementBasis& basis,
                        const FrequencyGrid& grid, const DelayPair& delays) {
    return coincidence_probs(state_with_background, basis, grid, delays);
}

void NoiseConfig::validate() const {
    if (!(pair_flux >= 0.0) || !std::isfinite(pair_flux)) throw ContractViolation("noise: pair_flux must be >= 0");
    if (!(singles_background_factor >= 0.0) || !std::isfinite(singles_background_factor))
        throw ContractViolation("noise: singles_background_factor must be >= 0");
    if (!(coincidence_window >= 0.0) || !std::isfinite(coincidence_window))
        throw ContractViolation("noise: coincidence_window must be >= 0");
    if (!(detector_efficiency >= 0.0 && detector_efficiency <= 1.0))
        throw ContractViolation("noise: detector_efficiency must lie in [0, 1]");
}

std::uint64_t CountTable::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (auto v : row) t += v;
    return t;
}

CountGrid CountTable::subtracted() const noexcept {
    CountGrid out{};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[k][l] = counts[k][l] > accidentals[k][l] ? counts[k][l] - accidentals[k][l] : 0;
    return out;
}

ExpectedCounts expected_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                               double integration_s) {
    noise.validate();
    if (!(integration_s >= 0.0) || !std::isfinite(integration_s))
        throw ContractViolation("simulate_counts: integration time must be >= 0");
    double sum = 0.0;
    for (const auto& row : probs)
        for (double v : row) {
            if (!(v >= 0.0)) throw ContractViolation("simulate_counts: probabilities must be >= 0");
            sum += v;
        }
    if (sum > 1.0 + 1e-12) throw ContractViolation("simulate_counts: probabilities sum above 1");

    // Single-photon marginals per bin. Photons that the modulator pushes out
    // of the computational bins still click on the partner's detector, so
    // divide the in-space marginal by the retention fraction.
    const double retention = computational_retention(basis);
    const double eff = noise.detector_efficiency;
    std::array<double, 2> singles_i{}, singles_s{};
    for (int k = 0; k < 2; ++k) {
        singles_i[k] = (probs[k][0] + probs[k][1]) / retention;
        singles_s[k] = (probs[0][k] + probs[1][k]) / retention;
    }
    const double rate_scale = noise.pair_flux * eff * noise.singles_background_factor;

    ExpectedCounts e;
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            e.coincidences[k][l] = noise.pair_flux * integration_s * probs[k][l] * eff * eff;
            const double ri = rate_scale * singles_i[k];
            const double rs = rate_scale * singles_s[l];
            e.accidentals[k][l] = ri * rs * noise.coincidence_window * integration_s;
        }
    }
    return e;
}

CountTable simulate_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                           double integration_s, Rng& rng) {
    const ExpectedCounts e = expected_counts(probs, noise, basis, integration_s);
    CountTable t;
    t.basis = basis;
    t.integration_s = integration_s;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            t.counts[k][l] = rng.poisson(e.coincidences[k][l] + e.accidentals[k][l]);
            t.accidentals[k][l] = rng.poisson(e.accidentals[k][l]);
        }
    return t;
}

CountTable simulate_counts(const ProbTable& probs, const NoiseConfig& noise, const MeasurementBasis& basis,
                           double integration_s, std::uint64_t seed) {
    Rng rng(seed);
    return simulate_counts(probs, noise, basis, integration_s, rng);
}

namespace {

template <typename Grid>
double class_ratio(const Grid& g, CorrelationClass cls) {
    const double diag = static_cast<double>(g[0][0]) + static_cast<double>(g[1][1]);
    const double anti = static_cast<double>(g[0][1]) + static_cast<double>(g[1][0]);
    const double desired = cls == CorrelationClass::Phi ? diag : anti;
    const double undesired = cls == CorrelationClass::Phi ? anti : diag;
    if (undesired == 0.0) return std::numeric_limits<double>::infinity();
    return desired / undesired;
}

}  // namespace

double jsi_ratio(const CountTable& table, CorrelationClass cls, bool subtract_accidentals) {
    return subtract_accidentals ? class_ratio(table.subtracted(), cls) : class_ratio(table.counts, cls);
}

double jsi_ratio(const ProbTable& probs, CorrelationClass cls) { return class_ratio(probs, cls); }

double coincidence_to_accidental_ratio(const CountTable& table, CorrelationClass cls) {
    double c = 0.0, a = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            const bool desired = cls == CorrelationClass::Phi ? k == l : k != l;
            if (!desired) continue;
            c += static_cast<double>(table.counts[k][l]);
            a += static_cast<double>(table.accidentals[k][l]);
        }
    if (a == 0.0) return std::numeric_limits<double>::infinity();
    return c / a;
}

void write_count_csv(std::ostream& os, const std::vector<CountTable>& tables) {
    os << "basis,idler_bin,signal_bin,counts,accidentals,integration_s\n";
    for (const auto& t : tables)
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                os << to_string(t.basis.kind) << ',' << k << ',' << l << ',' << t.counts[k][l] << ','
                   << t.accidentals[k][l] << ',' << format_double(t.integration_s) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::uint64_t parse_count(const std::string& s, const std::string& where) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(where, "expected a non-negative integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw InputError(where, "integer out of range '" + s + "'");
    }
}

}  // namespace

std::vector<CountTable> read_count_csv(std::istream& is, const std::string& source) {
    static const std::string kHeader = "basis,idler_bin,signal_bin,counts,accidentals,integration_s";
    std::string line;
    int line_no = 0;
    auto at = [&](int n) { return source + ":line " + std::to_string(n); };

    if (!std::getline(is, line)) throw InputError(source, "empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw InputError(at(line_no), "expected header '" + kHeader + "'");

    std::vector<CountTable> tables;
    std::map<BasisKind, std::size_t> index;
    std::map<BasisKind, std::array<bool, 4>> seen;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 6) throw InputError(at(line_no), "expected 6 columns");
        BasisKind kind;
        try {
            kind = parse_basis(cells[0]);
        } catch (const InputError& e) {
            throw InputError(at(line_no), e.what());
        }
        if (cells[1] != "0" && cells[1] != "1") throw InputError(at(line_no), "idler_bin must be 0 or 1");
        if (cells[2] != "0" && cells[2] != "1") throw InputError(at(line_no), "signal_bin must be 0 or 1");
        const int k = cells[1][0] - '0';
        const int l = cells[2][0] - '0';
        const std::uint64_t n = parse_count(cells[3], at(line_no) + " counts");
        const std::uint64_t a = parse_count(cells[4], at(line_no) + " accidentals");
        double t = 0.0;
        try {
            std::size_t pos = 0;
            t = std::stod(cells[5], &pos);
            if (pos != cells[5].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw InputError(at(line_no), "integration_s is not a number");
        }
        if (!(t >= 0.0) || !std::isfinite(t)) throw InputError(at(line_no), "integration_s must be >= 0");

        auto it = index.find(kind);
        if (it == index.end()) {
            CountTable fresh;
            fresh.basis = kind == BasisKind::ZZ ? MeasurementBasis::zz() : MeasurementBasis::xx();
            fresh.integration_s = t;
            tables.push_back(fresh);
            it = index.emplace(kind, tables.size() - 1).first;
            seen[kind].fill(false);
        }
        auto& flags = seen[kind];
        if (flags[2 * k + l]) throw InputError(at(line_no), "duplicate row for this basis and bin pair");
        flags[2 * k + l] = true;
        CountTable& tab = tables[it->second];
        tab.counts[k][l] = n;
        tab.accidentals[k][l] = a;
    }
    if (tables.empty()) throw InputError(source, "no data rows");
    for (const auto& [kind, flags] : seen)
        for (bool f : flags)
            if (!f) throw InputError(source, "basis " + to_string(kind) + " is missing bin pairs");
    return tables;
}

std::vector<CountTable> read_count_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path, "cannot open file");
    return read_count_csv(in, path);
}

}  // namespace fbell
