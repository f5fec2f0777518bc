// syk-sd: stationary saddle points of the dissipative large-N bosonic SYK model.
//
// Verbs:
//   solve  discover every distinct saddle at one (gamma, v), write solution files
//   scan   continuation scan in v at fixed gamma          -> branches.csv
//   phase  survey the (gamma, v) grid                     -> phase.csv
//   free   closed-form J=0 Green's function + Heisenberg  -> free_green.csv
//   fit    re-fit decay rates/frequencies of stored solution files
//
// Exit codes: 0 success, 1 configuration/usage error, 2 no qualifying solution.

#include "CLI11.hpp"

#include "syksd/io.hpp"
#include "syksd/observables.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

using namespace syksd;
namespace fs = std::filesystem;

namespace {

std::string enforce_desc(const EnforceSet& e) {
    if (e.kms && e.conj) return "KMS+CONJ";
    if (e.kms) return "KMS";
    if (e.conj) return "CONJ";
    return "none";
}

int resolve_workers(bool flag_set, int flag_value, int cfg_workers) {
    if (flag_set) return flag_value;
    if (const char* env = std::getenv("SYK_SD_WORKERS")) {
        char* end = nullptr;
        const long w = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && w > 0) return static_cast<int>(w);
    }
    if (cfg_workers > 0) return cfg_workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

int run_solve(const RunConfig& cfg) {
    const TimeGrid g = cfg.grid();
    const auto recs = discover_point(cfg.params, cfg.sweep, cfg.solver, g, cfg.base_seed);

    int written = 0, flagged = 0;
    double worst = 0.0;
    for (const auto& rec : recs) {
        const bool counted = rec.converged && rec.stationarity &&
                             *rec.stationarity < cfg.sweep.stationarity_threshold;
        if (!counted) {
            ++flagged;
            if (rec.stationarity) worst = std::max(worst, *rec.stationarity);
            continue;
        }
        const auto fits = extract_all(rec);
        write_solution(cfg.output_dir, written, rec, fits, cfg.sweep.scheme,
                       cfg.sweep.window_fraction);
        const cxd S = rec.action.value_or(cxd(0, 0));
        std::printf("solution-%d  %-4s Re S = %-14.8g Im S = %-11.4g stationarity = %-9.3g "
                    "iters = %d (%s)\n",
                    written, label_name(rec.label->label).c_str(), S.real(), S.imag(),
                    *rec.stationarity, rec.iterations, enforce_desc(rec.config.enforce).c_str());
        ++written;
    }
    if (flagged)
        std::printf("flagged %d non-stationary record%s (worst metric %.3g), not written\n",
                    flagged, flagged == 1 ? "" : "s", worst);
    std::printf("%d stationary solution%s at gamma = %g, v = %g -> %s\n", written,
                written == 1 ? "" : "s", cfg.params.gamma, cfg.params.v,
                cfg.output_dir.c_str());
    return written ? 0 : 2;
}

int run_scan(const RunConfig& cfg) {
    const TimeGrid g = cfg.grid();
    const auto branches =
        continuation_scan(cfg.params, cfg.sweep, cfg.params.gamma, cfg.solver, g, cfg.base_seed);
    write_branches_csv(fs::path(cfg.output_dir) / "branches.csv", branches);

    std::size_t total = 0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        total += br.points.size();
        if (br.points.empty()) continue;
        std::printf("branch %zu  %-4s v in [%g, %g]  %zu point%s%s\n", b,
                    label_name(br.label).c_str(),
                    br.points.front().first, br.points.back().first, br.points.size(),
                    br.points.size() == 1 ? "" : "s",
                    br.provenance == Branch::Provenance::SYMMETRY_SEEDED ? "  (endpoint only)"
                                                                         : "");
    }
    std::printf("%zu branch%s at gamma = %g -> branches.csv\n", branches.size(),
                branches.size() == 1 ? "" : "es", cfg.params.gamma);
    return total ? 0 : 2;
}

int run_phase(const RunConfig& cfg) {
    const TimeGrid g = cfg.grid();
    const auto pts = phase_diagram(cfg.params, cfg.sweep, cfg.solver, g, cfg.base_seed,
                                   cfg.workers);
    write_phase_csv(fs::path(cfg.output_dir) / "phase.csv", pts);

    int populated = 0;
    for (const auto& pt : pts) {
        if (pt.solution_count > 0) ++populated;
        std::string labs;
        for (std::size_t i = 0; i < pt.labels.size(); ++i)
            labs += std::string(i ? "+" : "") + label_name(pt.labels[i]);
        std::printf("gamma = %-4g v = %-5g count = %d  [%s]  dominant %s%s\n", pt.gamma, pt.v,
                    pt.solution_count, labs.c_str(), label_name(pt.dominant_label).c_str(),
                    pt.dominance_switch ? "  <- switch" : "");
    }
    std::printf("%zu grid points (%d populated) -> phase.csv\n", pts.size(), populated);
    return populated ? 0 : 2;
}

int run_free(const RunConfig& cfg) {
    if (cfg.params.v <= 0) {
        std::fprintf(stderr, "free: the closed form needs v > 0 (got v = %g)\n", cfg.params.v);
        return 1;
    }
    const TimeGrid g = cfg.grid();
    write_free_csv(fs::path(cfg.output_dir) / "free_green.csv", cfg.params, g, cfg.free_init);
    std::printf("free Green's function and Heisenberg trajectories -> free_green.csv\n");
    return 0;
}

int run_fit(const RunConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    std::vector<fs::path> files;
    if (fs::is_directory(dir))
        for (const auto& e : fs::directory_iterator(dir)) {
            const std::string name = e.path().filename().string();
            if (name.rfind("solution-", 0) == 0 && e.path().extension() == ".json")
                files.push_back(e.path());
        }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::fprintf(stderr, "fit: no solution-*.json under %s\n", dir.string().c_str());
        return 2;
    }
    for (const auto& f : files) {
        const SolutionRecord rec = read_solution(f);
        const auto fits = extract_all(rec);
        rewrite_fits(f, fits);
        std::printf("%s:", f.filename().string().c_str());
        static const char* comp[4] = {"pp", "pm", "mp", "mm"};
        for (int c = 0; c < 4; ++c) {
            if (!fits[c]) {
                std::printf("  G%s -", comp[c]);
                continue;
            }
            if (fits[c]->frequency)
                std::printf("  G%s Gamma=%.6g Omega=%.6g", comp[c], fits[c]->decay_rate,
                            *fits[c]->frequency);
            else
                std::printf("  G%s Gamma=%.6g", comp[c], fits[c]->decay_rate);
        }
        std::printf("\n");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary saddle points of the dissipative large-N bosonic SYK model"};
    app.require_subcommand(1);

    std::string config_file;
    app.add_option("--config", config_file, "JSON run configuration file");

    double v = 0, gamma = 0, J = 0, m = 0, T = 0;
    int q = 0, n_points = 0;
    auto* ov = app.add_option("--v", v, "harmonic coefficient");
    auto* ogamma = app.add_option("--gamma", gamma, "dissipation strength");
    auto* oJ = app.add_option("--J", J, "disorder strength");
    auto* om = app.add_option("--m", m, "mass");
    auto* oq = app.add_option("--q", q, "interaction order (even)");
    auto* oT = app.add_option("--T", T, "contour period");
    auto* on = app.add_option("--n-points", n_points, "grid points (even)");

    double mixing = 0, tol = 0, amplitude = 0, tau = 0, regularizer = 0;
    int max_iterations = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> enforce;
    auto* omix = app.add_option("--mixing", mixing, "update mixing weight in (0,1]");
    auto* omax = app.add_option("--max-iterations", max_iterations, "iteration cap");
    auto* otol = app.add_option("--convergence-tol", tol, "max-abs update tolerance");
    auto* oseed = app.add_option("--seed", seed, "random-ansatz seed");
    auto* oamp = app.add_option("--amplitude", amplitude, "random-ansatz amplitude");
    auto* otau = app.add_option("--envelope-tau", tau, "random-ansatz envelope decay time");
    auto* oreg = app.add_option("--regularizer", regularizer, "near-singular kernel shift");
    auto* oenf = app.add_option("--enforce", enforce,
                                "symmetries projected each iteration: KMS, CONJ, or NONE");

    std::vector<double> v_values, gamma_values;
    int seeds_per_point = 0;
    double refine_step = 0, dedup_tol = 0, threshold = 0, window_fraction = 0;
    std::string scheme, continuation;
    auto* ovv = app.add_option("--v-values", v_values, "sweep v grid")->delimiter(',');
    auto* ogv = app.add_option("--gamma-values", gamma_values, "sweep gamma grid")->delimiter(',');
    auto* ospp = app.add_option("--seeds-per-point", seeds_per_point,
                                "random starts per enforcement subset");
    auto* ocont = app.add_option("--continuation", continuation, "NONE or BIDIRECTIONAL");
    auto* ostep = app.add_option("--refine-step", refine_step, "continuation ladder spacing");
    auto* odedup = app.add_option("--dedup-tol", dedup_tol, "orbit dedup tolerance");
    auto* othr = app.add_option("--stationarity-threshold", threshold,
                                "late-time weight above which a record is not counted");
    auto* owin = app.add_option("--window-fraction", window_fraction, "stationarity window");
    auto* oscheme = app.add_option("--scheme", scheme, "action scheme: RAW or FREE_SUBTRACTED");

    std::string output_dir;
    std::uint64_t base_seed = 0;
    int workers = 0;
    auto* oout = app.add_option("--output-dir", output_dir, "directory for all outputs");
    auto* obase = app.add_option("--base-seed", base_seed, "seed for the per-trial seed stream");
    auto* oworkers =
        app.add_option("--workers", workers, "row-parallel threads (SYK_SD_WORKERS fallback)");

    auto* c_solve =
        app.add_subcommand("solve", "find every distinct stationary saddle at one (gamma, v)");
    auto* c_scan =
        app.add_subcommand("scan", "continuation scan in v at fixed gamma -> branches.csv");
    auto* c_phase = app.add_subcommand("phase", "survey the (gamma, v) grid -> phase.csv");
    auto* c_free = app.add_subcommand(
        "free", "closed-form J=0 Green's function and Heisenberg trajectories");
    auto* c_fit = app.add_subcommand("fit", "re-fit stored solution files in the output directory");
    for (auto* sub : {c_solve, c_scan, c_phase, c_free, c_fit}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_file.empty() ? default_config() : load_config(config_file);

        if (ov->count()) cfg.params.v = v;
        if (ogamma->count()) cfg.params.gamma = gamma;
        if (oJ->count()) cfg.params.J = J;
        if (om->count()) cfg.params.m = m;
        if (oq->count()) cfg.params.q = q;
        if (oT->count()) cfg.T = T;
        if (on->count()) cfg.n_points = n_points;
        if (omix->count()) cfg.solver.mixing = mixing;
        if (omax->count()) cfg.solver.max_iterations = max_iterations;
        if (otol->count()) cfg.solver.convergence_tol = tol;
        if (oseed->count()) cfg.solver.seed = seed;
        if (oamp->count()) cfg.solver.amplitude = amplitude;
        if (otau->count()) cfg.solver.envelope_tau = tau;
        if (oreg->count()) cfg.solver.regularizer = regularizer;
        if (oenf->count()) {
            EnforceSet e;
            for (const auto& s : enforce) {
                if (s == "KMS") e.kms = true;
                else if (s == "CONJ") e.conj = true;
                else if (s != "NONE")
                    throw ConfigError("config: --enforce: unknown relation '" + s + "'");
            }
            cfg.solver.enforce = e;
        }
        if (ovv->count()) cfg.sweep.v_values = v_values;
        if (ogv->count()) cfg.sweep.gamma_values = gamma_values;
        if (ospp->count()) cfg.sweep.seeds_per_point = seeds_per_point;
        if (ocont->count()) {
            if (continuation == "NONE") cfg.sweep.continuation = SweepSpec::Continuation::NONE;
            else if (continuation == "BIDIRECTIONAL")
                cfg.sweep.continuation = SweepSpec::Continuation::BIDIRECTIONAL;
            else
                throw ConfigError("config: --continuation: expected NONE or BIDIRECTIONAL");
        }
        if (ostep->count()) cfg.sweep.refine_step = refine_step;
        if (odedup->count()) cfg.sweep.dedup_tol = dedup_tol;
        if (othr->count()) cfg.sweep.stationarity_threshold = threshold;
        if (owin->count()) cfg.sweep.window_fraction = window_fraction;
        if (oscheme->count()) {
            if (scheme == "RAW") cfg.sweep.scheme = ActionScheme::RAW;
            else if (scheme == "FREE_SUBTRACTED")
                cfg.sweep.scheme = ActionScheme::FREE_SUBTRACTED;
            else
                throw ConfigError("config: --scheme: expected RAW or FREE_SUBTRACTED");
        }
        if (oout->count()) cfg.output_dir = output_dir;
        if (obase->count()) cfg.base_seed = base_seed;
        cfg.workers = resolve_workers(oworkers->count() > 0, workers, cfg.workers);

        cfg.params.validate();
        cfg.solver.validate();
        cfg.sweep.validate();
        (void)cfg.grid();

        if (c_fit->parsed()) return run_fit(cfg);  // operates inside an existing run directory

        fs::create_directories(cfg.output_dir);
        save_config(cfg, fs::path(cfg.output_dir) / "config.json");

        if (c_solve->parsed()) return run_solve(cfg);
        if (c_scan->parsed()) return run_scan(cfg);
        if (c_phase->parsed()) return run_phase(cfg);
        if (c_free->parsed()) return run_free(cfg);
        std::fprintf(stderr, "no verb given\n");
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
