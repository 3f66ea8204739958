#include "fbell/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "fbell/errors.hpp"
#include "fbell/json_io.hpp"
#include "fbell/omp.hpp"

namespace fbell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Stream : std::uint64_t { kZZStream = 1, kXXStream = 2, kTomoStream = 3, kScanStream = 4 };

json prob_table_json(const ProbTable& p) { return json{{p[0][0], p[0][1]}, {p[1][0], p[1][1]}}; }

json ratio_json(double r) { return std::isfinite(r) ? json(r) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string(), "cannot open for writing");
    out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json mask_json(const ShaperMask& m) {
    return json{{"phase_rad", {{"I0", m.phase[0]}, {"I1", m.phase[1]}, {"S0", m.phase[2]}, {"S1", m.phase[3]}}},
                {"amplitude", {{"I0", m.amplitude[0]}, {"I1", m.amplitude[1]}, {"S0", m.amplitude[2]}, {"S1", m.amplitude[3]}}}};
}

json synth_json(const SynthResult& s, const RunConfig& cfg) {
    const CorrelationClass cls = correlation_class(cfg.target);
    double desired = 0.0, undesired = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) ((cls == CorrelationClass::Phi) == (k == l) ? desired : undesired) += s.zz[k][l];
    return json{
        {"target", std::string(to_string(cfg.target))},
        {"raw_state", state_to_json(s.raw)},
        {"state", state_to_json(s.state)},
        {"measured_phase_rad", s.measured_phase},
        {"compensation_mask", mask_json(s.mask)},
        {"fidelity_to_target", s.fidelity},
        {"leakage",
         {{"desired_fraction", desired}, {"undesired_fraction", undesired}, {"ratio", ratio_json(s.leakage_ratio)}}},
    };
}

std::string csv_of(const std::vector<CountTable>& tables) {
    std::ostringstream os;
    write_count_csv(os, tables);
    return os.str();
}

struct Paths {
    fs::path out;
    std::vector<std::pair<std::string, fs::path>> artifacts;

    fs::path add(const std::string& name) {
        artifacts.emplace_back(name, out / name);
        return out / name;
    }
};

void do_synth(const RunConfig& cfg, Paths& paths, std::ostream& out) {
    const SynthResult s = run_synth(cfg);
    write_json(paths.add("state.json"), synth_json(s, cfg));
    out << "synth: target " << to_string(cfg.target) << ", fidelity " << s.fidelity << ", leakage ratio "
        << s.leakage_ratio << "\n";
}

std::vector<CountTable> do_measure(const RunConfig& cfg, const std::string& basis, Paths& paths, std::ostream& out) {
    const MeasureResult m = run_measure(cfg);
    std::vector<CountTable> tables;
    const bool zz = basis == "both" || basis == "ZZ" || basis == "zz";
    const bool xx = basis == "both" || basis == "XX" || basis == "xx";
    if (!zz && !xx) throw InputError("--basis", "expected ZZ, XX or both");
    if (zz) {
        write_text(paths.add("counts_zz.csv"), csv_of({m.zz}));
        tables.push_back(m.zz);
    }
    if (xx) {
        write_text(paths.add("counts_xx.csv"), csv_of({m.xx}));
        tables.push_back(m.xx);
    }
    write_json(paths.add("probs.json"),
               json{{"target", std::string(to_string(cfg.target))},
                    {"state", state_to_json(m.synth.state)},
                    {"ZZ", prob_table_json(m.zz_probs)},
                    {"XX", prob_table_json(m.xx_probs)}});
    const CorrelationClass cls = correlation_class(cfg.target);
    out << "measure: ZZ total " << m.zz.total() << " (CAR " << coincidence_to_accidental_ratio(m.zz, cls)
        << "), XX total " << m.xx.total() << "\n";
    return tables;
}

void do_tomo(const RunConfig& cfg, const std::vector<CountTable>& tables, Paths& paths, std::ostream& out) {
    const PosteriorSummary s = run_tomo(cfg, tables);
    json j = summary_to_json(s, cfg.target);
    j["posterior_predictive"] = {{"ZZ", prob_table_json(posterior_predictive(s, MeasurementBasis::zz()))},
                                 {"XX", prob_table_json(posterior_predictive(s, MeasurementBasis::xx()))}};
    write_json(paths.add("posterior.json"), j);
    out << "tomo: fidelity " << s.fidelity_mean << " [" << s.fidelity_ci.first << ", " << s.fidelity_ci.second
        << "], acceptance " << s.acceptance_rate << "\n";
}

void do_sense(const RunConfig& cfg, Paths& paths, std::ostream& out) {
    const SenseResult r = run_sense(cfg);
    std::ostringstream csv;
    write_scan_csv(csv, r.points);
    write_text(paths.add("scan.csv"), csv.str());
    json fits = json::array();
    for (int i = 0; i < 4; ++i) {
        json f = fringe_fit_to_json(r.fits[i]);
        f["i_bin"] = i / 2;
        f["s_bin"] = i % 2;
        fits.push_back(f);
    }
    write_json(paths.add("fit.json"),
               json{{"target", std::string(to_string(cfg.target))}, {"mode", to_string(r.mode)}, {"fits", fits}});
    out << "sense: " << to_string(r.mode) << " scan, P00 fringe ";
    if (r.fits[0].flat)
        out << "flat\n";
    else
        out << "w_f = " << r.fits[0].angular_frequency << ", visibility " << r.fits[0].visibility << "\n";
}

void write_manifest(const RunConfig& cfg, const Paths& paths, const std::vector<std::string>& inputs) {
    json artifacts = json::object();
    for (const auto& [name, path] : paths.artifacts) artifacts[name] = sha256_file(path);
    json in = json::array();
    for (const auto& p : inputs) in.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    write_json(paths.out / "manifest.json",
               json{{"seed", cfg.seed}, {"config", cfg.to_json()}, {"inputs", in}, {"artifacts", artifacts}});

    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    write_json(paths.out / "metadata.json", json{{"created_utc", ts.str()}, {"threads", parallel::max_threads()}});
}

}  // namespace

SynthResult run_synth(const RunConfig& cfg) {
    SynthResult r;
    r.raw = synthesize(eoim_output(cfg.resolved_eoim()), cfg.beta);
    const TwoQubitState norm = r.raw.normalized();
    r.measured_phase = bell_phase(norm, correlation_class(cfg.target));
    r.mask = compensate(cfg.target, r.measured_phase);
    r.state = apply_mask(norm, r.mask).normalized();
    r.zz = leakage_probs(r.state, MeasurementBasis::zz(), cfg.grid);
    r.leakage_ratio = jsi_ratio(r.zz, correlation_class(cfg.target));
    r.fidelity = fidelity(DensityMatrix::pure(r.state), canonical_bell(cfg.target));
    return r;
}

MeasureResult run_measure(const RunConfig& cfg) {
    MeasureResult m;
    m.synth = run_synth(cfg);
    const NoiseConfig noise = cfg.resolved_noise();
    const MeasurementBasis zz = MeasurementBasis::zz();
    const MeasurementBasis xx = MeasurementBasis::xx();
    m.zz_probs = coincidence_probs(m.synth.state, zz, cfg.grid);
    m.xx_probs = coincidence_probs(m.synth.state, xx, cfg.grid);
    m.zz = simulate_counts(m.zz_probs, noise, zz, cfg.integration_s, derive_seed(cfg.seed, kZZStream));
    m.xx = simulate_counts(m.xx_probs, noise, xx, cfg.integration_s, derive_seed(cfg.seed, kXXStream));
    return m;
}

PosteriorSummary run_tomo(const RunConfig& cfg, const std::vector<CountTable>& tables) {
    if (tables.empty()) throw InputError("counts", "no count tables supplied");
    return sample_posterior(tables, canonical_bell(cfg.target), cfg.tomography, derive_seed(cfg.seed, kTomoStream));
}

SenseResult run_sense(const RunConfig& cfg) {
    SenseResult r;
    r.mode = cfg.resolved_scan_mode();
    ScanConfig sc;
    sc.state_label = cfg.target;
    sc.mode = r.mode;
    sc.phase_grid = ScanConfig::linear_grid(cfg.scan.start_rad, cfg.scan.stop_rad, cfg.scan.points);
    sc.counts_per_point = cfg.scan.counts_per_point;
    sc.seed = derive_seed(cfg.seed, kScanStream);
    r.points = scan(sc, cfg.resolved_noise(), cfg.grid);
    for (int i = 0; i < 4; ++i) r.fits[i] = fit_fringe(sc.phase_grid, scan_column(r.points, i / 2, i % 2));
    return r;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string(), "cannot open for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw NumericalFailure("sha256: context allocation failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frequency-bin Bell-state synthesis, measurement, tomography and delay-sensing simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "fbell_out", target, eoim, basis = "both";
    std::uint64_t seed = 0;
    double extinction_db = 0.0;
    std::vector<std::string> count_files;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "RNG seed (overrides config)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--target", target, "psi+, psi-, phi+ or phi-");
        sub->add_option("--extinction-db", extinction_db, "residual carrier extinction in dB");
        sub->add_option("--eoim", eoim, "intensity modulator mode: on or off");
    };
    CLI::App* synth = app.add_subcommand("synth", "synthesize the target Bell state and report leakage");
    CLI::App* measure = app.add_subcommand("measure", "simulate ZZ and XX coincidence tables");
    CLI::App* tomo = app.add_subcommand("tomo", "Bayesian density-matrix reconstruction from count CSVs");
    CLI::App* sense = app.add_subcommand("sense", "common/differential-mode phase scan and fringe fits");
    CLI::App* pipeline = app.add_subcommand("pipeline", "run everything into one reproducible run directory");
    for (CLI::App* sub : {synth, measure, tomo, sense, pipeline}) common(sub);
    measure->add_option("--basis", basis, "ZZ, XX or both");
    tomo->add_option("--counts", count_files, "count table CSV (repeatable)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg;
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) cfg = load_config(config_path);
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--target")) cfg.target = parse_bell_label(target);
        if (sub->count("--extinction-db")) {
            if (!(extinction_db >= 0.0)) throw InputError("--extinction-db", "must be >= 0");
            cfg.eoim.extinction_dB = extinction_db;
        }
        if (sub->count("--eoim")) {
            if (eoim == "on")
                cfg.eoim_mode = EoimMode::on;
            else if (eoim == "off")
                cfg.eoim_mode = EoimMode::off;
            else
                throw InputError("--eoim", "expected on or off");
        }

        Paths paths{fs::path(out_dir), {}};
        fs::create_directories(paths.out);

        if (sub == synth) {
            do_synth(cfg, paths, out);
        } else if (sub == measure) {
            do_measure(cfg, basis, paths, out);
        } else if (sub == tomo) {
            std::vector<CountTable> tables;
            for (const auto& f : count_files) {
                auto t = read_count_csv_file(f);
                tables.insert(tables.end(), t.begin(), t.end());
            }
            do_tomo(cfg, tables, paths, out);
        } else if (sub == sense) {
            do_sense(cfg, paths, out);
        } else {
            write_json(paths.add("config.json"), cfg.to_json());
            do_synth(cfg, paths, out);
            const auto tables = do_measure(cfg, "both", paths, out);
            do_tomo(cfg, tables, paths, out);
            do_sense(cfg, paths, out);
            std::vector<std::string> inputs;
            if (!config_path.empty()) inputs.push_back(config_path);
            write_manifest(cfg, paths, inputs);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace fbell
