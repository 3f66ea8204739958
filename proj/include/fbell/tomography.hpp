#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbell/core.hpp"
#include "fbell/measurement.hpp"
#include "fbell/rng.hpp"

namespace fbell {

// Unconstrained parameters of the Bures-ensemble map. The first 32 entries
// are the real then imaginary parts (row-major) of a Ginibre matrix G, the
// last 32 those of a second Ginibre matrix Z whose Gram-Schmidt
// orthonormalization is a Haar unitary U. With every entry iid N(0, 1),
//   rho = (I + U) G G^+ (I + U)^+ / Tr[...]
// is Bures-distributed.
struct BuresParameterVector {
    static constexpr int kSize = 64;
    std::array<double, kSize> x{};

    static BuresParameterVector draw(Rng& rng);
};

// Gram-Schmidt on the columns of `z`; the R factor has a positive real
// diagonal, which makes the map Haar-measure preserving.
Matrix4c haar_unitary(const Matrix4c& z);
// The map above without validation (exactly Hermitian, unit trace up to rounding).
Matrix4c bures_matrix(const BuresParameterVector& params);
DensityMatrix bures_density(const BuresParameterVector& params);

// Measurement operators for one basis, outcome (k, l) at index 2k + l. XX
// elements are 4 eta^4 times projectors onto the +/- product states; the
// remainder element carries the probability that leaves the four bins.
struct PovmSet {
    MeasurementBasis basis{};
    std::array<Matrix4c, 4> elements{};
    Matrix4c remainder = Matrix4c::Zero();
    // elements[i] == vectors[i] * vectors[i]^+
    std::array<Vector4c, 4> vectors{};
};

PovmSet build_povm(const MeasurementBasis& basis);
// Tr[E_kl rho] for the four coincidence outcomes.
ProbTable povm_probs(const PovmSet& povm, const Matrix4c& rho);

// Replaces counts by accidental-subtracted counts (clipped at zero) and
// zeroes the accidentals column.
std::vector<CountTable> subtract_accidentals(const std::vector<CountTable>& tables);

// Multinomial log-likelihood conditioned on detection within each table:
//   sum_tables sum_kl n_kl log(p_kl / sum p), p_kl = Tr[E_kl rho].
// Returns -inf when a positive count meets a zero probability.
class LikelihoodModel {
public:
    explicit LikelihoodModel(const std::vector<CountTable>& tables);

    double operator()(const Matrix4c& rho) const;
    bool empty() const noexcept { return terms_.empty(); }

private:
    struct Term {
        std::array<Vector4c, 4> vectors;
        std::array<double, 4> counts;
    };
    std::vector<Term> terms_;
};

double log_likelihood(const std::vector<CountTable>& tables, const DensityMatrix& rho);

struct ChainSettings {
    int n_samples = 2000;     // retained, summed over chains
    int burn_in = 1000;       // per chain
    int thin = 10;
    double step_scale = 0.05; // pCN mixing ratio beta, initial value when adapting
    int chains = 4;
    // Retune beta during burn-in toward `target_acceptance`; frozen afterwards.
    bool adapt = true;
    double target_acceptance = 0.3;
    // Temper the likelihood during the first half of burn-in so chains
    // settle before the full posterior applies.
    bool anneal = true;
    bool subtract_accidentals = true;
    bool keep_samples = false;

    void validate() const;
};

struct PosteriorSummary {
    DensityMatrix mean_rho = DensityMatrix::maximally_mixed();
    double fidelity_mean = 0.0;
    std::pair<double, double> fidelity_ci{0.0, 0.0};  // 90% equal-tailed
    int n_samples = 0;
    double acceptance_rate = 0.0;
    double effective_sample_size = 0.0;
    std::vector<double> final_step_scales;
    // Filled when ChainSettings::keep_samples is set, in chain order.
    std::vector<Matrix4c> samples;
    std::vector<double> fidelities;
};

// Metropolis-Hastings with a preconditioned Crank-Nicolson proposal
//   x' = sqrt(1 - beta^2) x + beta xi,  xi ~ N(0, I),
// which keeps the N(0, I) parameter prior (hence the Bures prior) invariant,
// so acceptance depends on the likelihood ratio alone. Chains run in
// parallel with streams derived from (seed, chain index); the result is
// identical to sample_posterior_serial.
PosteriorSummary sample_posterior(const std::vector<CountTable>& tables, const TwoQubitState& target,
                                  const ChainSettings& settings, std::uint64_t seed);
PosteriorSummary sample_posterior_serial(const std::vector<CountTable>& tables, const TwoQubitState& target,
                                         const ChainSettings& settings, std::uint64_t seed);

ProbTable posterior_predictive(const PosteriorSummary& summary, const MeasurementBasis& basis);

// Initial-positive-sequence estimate for one chain.
double effective_sample_size(const std::vector<double>& series);

nlohmann::json summary_to_json(const PosteriorSummary& summary, BellLabel target);

}  // namespace fbell
