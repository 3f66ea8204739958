#include <doctest.h>

#include "fbell/omp.hpp"
#include "fbell/sensing.hpp"
#include "fbell/tomography.hpp"

using namespace fbell;

namespace {

std::vector<CountTable> tables_for(BellLabel label) {
    const auto grid = FrequencyGrid::reference();
    const NoiseConfig noise{};
    std::vector<CountTable> out;
    for (const auto& b : {MeasurementBasis::zz(), MeasurementBasis::xx()})
        out.push_back(simulate_counts(coincidence_probs(canonical_bell(label), b, grid), noise, b, 4.0, out.size() + 40));
    return out;
}

}  // namespace

TEST_CASE("parallel posterior equals the serial reference bit for bit") {
    ChainSettings s;
    s.n_samples = 403;  // uneven split across chains
    s.burn_in = 600;
    s.chains = 5;
    s.keep_samples = true;
    for (int threads : {1, 2, 4}) {
        parallel::set_threads(threads);
        for (auto label : {BellLabel::PsiMinus, BellLabel::PhiPlus}) {
            const auto tables = tables_for(label);
            const auto a = sample_posterior(tables, canonical_bell(label), s, 99);
            const auto b = sample_posterior_serial(tables, canonical_bell(label), s, 99);
            CHECK(a.fidelity_mean == b.fidelity_mean);
            CHECK(a.fidelity_ci == b.fidelity_ci);
            CHECK(a.acceptance_rate == b.acceptance_rate);
            CHECK(a.final_step_scales == b.final_step_scales);
            CHECK(a.mean_rho.elements() == b.mean_rho.elements());
            REQUIRE(a.samples.size() == b.samples.size());
            for (std::size_t i = 0; i < a.samples.size(); ++i) REQUIRE(a.samples[i] == b.samples[i]);
        }
    }
}

TEST_CASE("parallel scan equals the serial reference bit for bit") {
    const NoiseConfig noise{};
    for (int threads : {1, 3, 8}) {
        parallel::set_threads(threads);
        for (auto mode : {ScanMode::common, ScanMode::differential}) {
            ScanConfig cfg;
            cfg.state_label = BellLabel::PhiMinus;
            cfg.mode = mode;
            cfg.phase_grid = ScanConfig::linear_grid(-kPi, kPi, 97);
            cfg.seed = 5;
            const auto a = scan(cfg, noise);
            const auto b = scan_serial(cfg, noise);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                REQUIRE(a[i].phase == b[i].phase);
                REQUIRE(a[i].probs == b[i].probs);
                REQUIRE(a[i].table.counts == b[i].table.counts);
                REQUIRE(a[i].table.accidentals == b[i].table.accidentals);
            }
        }
    }
}
