#include <algorithm>
#include <cmath>
#include <limits>

#include "fbell/errors.hpp"
#include "fbell/json_io.hpp"
#include "fbell/omp.hpp"
#include "fbell/tomography.hpp"

namespace fbell {

void ChainSettings::validate() const {
    if (n_samples < 1) throw ContractViolation("chain: n_samples must be >= 1");
    if (burn_in < 0) throw ContractViolation("chain: burn_in must be >= 0");
    if (thin < 1) throw ContractViolation("chain: thin must be >= 1");
    if (chains < 1) throw ContractViolation("chain: chains must be >= 1");
    if (!(step_scale > 0.0 && step_scale <= 1.0)) throw ContractViolation("chain: step_scale must lie in (0, 1]");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
        throw ContractViolation("chain: target_acceptance must lie in (0, 1)");
}

namespace {

constexpr int kAdaptWindow = 100;
constexpr double kMinStep = 1e-6;
constexpr int kMaxStartDraws = 10000;
constexpr double kAnnealStart = 1e-4;

struct ChainResult {
    std::vector<Matrix4c> samples;
    std::vector<double> fidelities;
    long accepted = 0;
    long proposals = 0;
    double final_step = 0.0;
};

double overlap(const Matrix4c& rho, const Vector4c& v) { return v.dot(rho * v).real(); }

ChainResult run_chain(const LikelihoodModel& model, const Vector4c& target, const ChainSettings& s, int retained,
                      std::uint64_t seed) {
    Rng rng(seed);
    ChainResult out;
    out.samples.reserve(retained);
    out.fidelities.reserve(retained);

    BuresParameterVector x = BuresParameterVector::draw(rng);
    Matrix4c rho = bures_matrix(x);
    double ll = model(rho);
    for (int tries = 1; !std::isfinite(ll); ++tries) {
        if (tries >= kMaxStartDraws) throw NumericalFailure("sample_posterior: no prior draw with positive likelihood");
        x = BuresParameterVector::draw(rng);
        rho = bures_matrix(x);
        ll = model(rho);
    }

    double beta = s.step_scale;
    int window_accepted = 0, window_n = 0;
    const long total = static_cast<long>(s.burn_in) + static_cast<long>(retained) * s.thin;
    // likelihood exponent ramps geometrically from kAnnealStart to 1 over the first half of burn-in
    const long anneal_len = s.anneal ? s.burn_in / 2 : 0;
    BuresParameterVector prop;
    for (long it = 0; it < total; ++it) {
        const double temper =
            it < anneal_len ? kAnnealStart * std::pow(1.0 / kAnnealStart, static_cast<double>(it) / anneal_len) : 1.0;
        const double keep = std::sqrt(1.0 - beta * beta);
        for (int i = 0; i < BuresParameterVector::kSize; ++i) prop.x[i] = keep * x.x[i] + beta * rng.normal();
        const Matrix4c rho_prop = bures_matrix(prop);
        const double ll_prop = model(rho_prop);
        const double log_u = std::log(rng.uniform_open());
        const bool accept = std::isfinite(ll_prop) && log_u < temper * (ll_prop - ll);
        if (accept) {
            x = prop;
            rho = rho_prop;
            ll = ll_prop;
        }

        if (it < s.burn_in) {
            window_accepted += accept;
            if (++window_n == kAdaptWindow) {
                if (s.adapt) {
                    const double rate = static_cast<double>(window_accepted) / window_n;
                    beta = std::clamp(beta * std::exp(2.0 * (rate - s.target_acceptance)), kMinStep, 1.0);
                }
                window_accepted = window_n = 0;
            }
            continue;
        }
        ++out.proposals;
        out.accepted += accept;
        if ((it - s.burn_in + 1) % s.thin == 0) {
            out.samples.push_back(rho);
            out.fidelities.push_back(overlap(rho, target));
        }
    }
    out.final_step = beta;
    return out;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

struct Plan {
    LikelihoodModel model;
    Vector4c target;
    std::vector<int> retained;
    std::vector<std::uint64_t> seeds;
};

Plan make_plan(const std::vector<CountTable>& tables, const TwoQubitState& target, const ChainSettings& s,
               std::uint64_t seed) {
    s.validate();
    if (!target.is_normalized()) throw ContractViolation("sample_posterior: target state is not normalized");
    const auto data = s.subtract_accidentals ? subtract_accidentals(tables) : tables;
    Plan plan{LikelihoodModel(data), target.vector(), {}, {}};
    for (int c = 0; c < s.chains; ++c) {
        plan.retained.push_back(s.n_samples / s.chains + (c < s.n_samples % s.chains ? 1 : 0));
        plan.seeds.push_back(derive_seed(seed, static_cast<std::uint64_t>(c)));
    }
    return plan;
}

PosteriorSummary merge(std::vector<ChainResult>& chains, const ChainSettings& s) {
    PosteriorSummary out;
    Matrix4c mean = Matrix4c::Zero();
    std::vector<double> fids;
    long accepted = 0, proposals = 0;
    double ess = 0.0;
    for (auto& c : chains) {
        for (const auto& r : c.samples) mean += r;
        fids.insert(fids.end(), c.fidelities.begin(), c.fidelities.end());
        accepted += c.accepted;
        proposals += c.proposals;
        if (!c.fidelities.empty()) ess += effective_sample_size(c.fidelities);
        out.final_step_scales.push_back(c.final_step);
    }
    const auto n = static_cast<double>(fids.size());
    mean /= n;
    mean = 0.5 * (mean + mean.adjoint()).eval();
    mean /= mean.trace().real();
    out.mean_rho = DensityMatrix(mean);
    double fsum = 0.0;
    for (double f : fids) fsum += f;
    out.fidelity_mean = fsum / n;
    out.fidelity_ci = {quantile(fids, 0.05), quantile(fids, 0.95)};
    out.n_samples = static_cast<int>(fids.size());
    out.acceptance_rate = proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    out.effective_sample_size = ess;
    if (s.keep_samples) {
        for (auto& c : chains) out.samples.insert(out.samples.end(), c.samples.begin(), c.samples.end());
        out.fidelities = std::move(fids);
    }
    return out;
}

}  // namespace

PosteriorSummary sample_posterior_serial(const std::vector<CountTable>& tables, const TwoQubitState& target,
                                         const ChainSettings& settings, std::uint64_t seed) {
    const Plan plan = make_plan(tables, target, settings, seed);
    std::vector<ChainResult> results(settings.chains);
    for (int c = 0; c < settings.chains; ++c)
        results[c] = run_chain(plan.model, plan.target, settings, plan.retained[c], plan.seeds[c]);
    return merge(results, settings);
}

PosteriorSummary sample_posterior(const std::vector<CountTable>& tables, const TwoQubitState& target,
                                  const ChainSettings& settings, std::uint64_t seed) {
    const Plan plan = make_plan(tables, target, settings, seed);
    std::vector<ChainResult> results(settings.chains);
    std::vector<std::string> errors(settings.chains);
    FBELL_OMP(parallel for schedule(dynamic, 1))
    for (int c = 0; c < settings.chains; ++c) {
        try {
            results[c] = run_chain(plan.model, plan.target, settings, plan.retained[c], plan.seeds[c]);
        } catch (const std::exception& e) {
            errors[c] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalFailure(e);
    return merge(results, settings);
}

ProbTable posterior_predictive(const PosteriorSummary& summary, const MeasurementBasis& basis) {
    return povm_probs(build_povm(basis), summary.mean_rho.elements());
}

double effective_sample_size(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (!(c0 > 0.0)) return static_cast<double>(n);
    // Geyer: sum consecutive pairs of autocorrelations while positive and
    // non-increasing.
    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
    }
    tau = std::max(tau, 1.0 / static_cast<double>(n));
    return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

nlohmann::json summary_to_json(const PosteriorSummary& summary, BellLabel target) {
    return nlohmann::json{
        {"target", std::string(to_string(target))},
        {"mean_rho", density_to_json(summary.mean_rho)},
        {"fidelity_mean", summary.fidelity_mean},
        {"fidelity_ci", {summary.fidelity_ci.first, summary.fidelity_ci.second}},
        {"n_samples", summary.n_samples},
        {"acceptance_rate", summary.acceptance_rate},
        {"effective_sample_size", summary.effective_sample_size},
        {"final_step_scales", summary.final_step_scales},
    };
}

}  // namespace fbell
