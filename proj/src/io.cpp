#include "syksd/io.hpp"

#include "syksd/observables.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace syksd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) fail(where, "unknown field '" + it.key() + "'");
    }
}

double num_field(const json& j, const std::string& where, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& f = j.at(key);
    if (!f.is_number()) fail(where + "." + key, "expected a number");
    return f.get<double>();
}

int int_field(const json& j, const std::string& where, const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& f = j.at(key);
    if (!f.is_number_integer()) fail(where + "." + key, "expected an integer");
    return f.get<int>();
}

std::uint64_t seed_field(const json& j, const std::string& where, const char* key,
                         std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& f = j.at(key);
    if (!f.is_number_integer()) fail(where + "." + key, "expected an integer");
    return f.get<std::uint64_t>();
}

bool bool_field(const json& j, const std::string& where, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& f = j.at(key);
    if (!f.is_boolean()) fail(where + "." + key, "expected true/false");
    return f.get<bool>();
}

std::string str_field(const json& j, const std::string& where, const char* key,
                      const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    const json& f = j.at(key);
    if (!f.is_string()) fail(where + "." + key, "expected a string");
    return f.get<std::string>();
}

std::vector<double> num_list(const json& f, const std::string& where) {
    if (!f.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : f) {
        if (!x.is_number()) fail(where, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json enforce_to_json(const EnforceSet& e) {
    json a = json::array();
    if (e.kms) a.push_back("KMS");
    if (e.conj) a.push_back("CONJ");
    return a;
}

EnforceSet enforce_from_json(const json& f, const std::string& where) {
    if (!f.is_array()) fail(where, "expected an array of \"KMS\"/\"CONJ\"");
    EnforceSet e;
    for (const auto& s : f) {
        if (!s.is_string()) fail(where, "expected \"KMS\" or \"CONJ\" entries");
        const std::string name = s.get<std::string>();
        if (name == "KMS") e.kms = true;
        else if (name == "CONJ") e.conj = true;
        else fail(where, "unknown relation '" + name + "'");
    }
    return e;
}

json scheme_to_json(ActionScheme s) {
    return s == ActionScheme::RAW ? "RAW" : "FREE_SUBTRACTED";
}

ActionScheme scheme_from_json(const json& f, const std::string& where) {
    if (!f.is_string()) fail(where, "expected \"RAW\" or \"FREE_SUBTRACTED\"");
    const std::string name = f.get<std::string>();
    if (name == "RAW") return ActionScheme::RAW;
    if (name == "FREE_SUBTRACTED") return ActionScheme::FREE_SUBTRACTED;
    fail(where, "unknown scheme '" + name + "'");
}

Label label_from_name(const std::string& s, const std::string& where) {
    for (Label l : {Label::KC, Label::K, Label::C, Label::NONE})
        if (s == label_name(l)) return l;
    fail(where, "unknown symmetry label '" + s + "'");
}

SolverConfig solver_from_json(const json& f, const std::string& where) {
    check_keys(f, where,
               {"mixing", "max_iterations", "convergence_tol", "enforce", "seed",
                "amplitude", "envelope_tau", "regularizer"});
    SolverConfig c;
    c.mixing = num_field(f, where, "mixing", c.mixing);
    c.max_iterations = int_field(f, where, "max_iterations", c.max_iterations);
    c.convergence_tol = num_field(f, where, "convergence_tol", c.convergence_tol);
    if (f.contains("enforce")) c.enforce = enforce_from_json(f.at("enforce"), where + ".enforce");
    c.seed = seed_field(f, where, "seed", c.seed);
    c.amplitude = num_field(f, where, "amplitude", c.amplitude);
    c.envelope_tau = num_field(f, where, "envelope_tau", c.envelope_tau);
    c.regularizer = num_field(f, where, "regularizer", c.regularizer);
    return c;
}

json solver_to_json(const SolverConfig& c) {
    return json{{"mixing", c.mixing},
                {"max_iterations", c.max_iterations},
                {"convergence_tol", c.convergence_tol},
                {"enforce", enforce_to_json(c.enforce)},
                {"seed", c.seed},
                {"amplitude", c.amplitude},
                {"envelope_tau", c.envelope_tau},
                {"regularizer", c.regularizer}};
}

ModelParams model_from_json(const json& f, const std::string& where, ModelParams p) {
    check_keys(f, where, {"m", "v", "gamma", "J", "q"});
    p.m = num_field(f, where, "m", p.m);
    p.v = num_field(f, where, "v", p.v);
    p.gamma = num_field(f, where, "gamma", p.gamma);
    p.J = num_field(f, where, "J", p.J);
    p.q = int_field(f, where, "q", p.q);
    return p;
}

json model_to_json(const ModelParams& p) {
    return json{{"m", p.m}, {"v", p.v}, {"gamma", p.gamma}, {"J", p.J}, {"q", p.q}};
}

cxd cxd_from_json(const json& f, const std::string& where) {
    if (!f.is_array() || f.size() != 2 || !f[0].is_number() || !f[1].is_number())
        fail(where, "expected [re, im]");
    return cxd(f[0].get<double>(), f[1].get<double>());
}

json cxd_to_json(cxd z) { return json::array({z.real(), z.imag()}); }

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + file.string() + " for writing");
    out << text;
    if (!out) throw ConfigError("write failed for " + file.string());
}

json parse_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

const char* comp_name(int c) {
    static const char* names[4] = {"pp", "pm", "mp", "mm"};
    return names[c];
}

json fit_to_json(const std::optional<DecayFit>& f, int c) {
    if (!f) return nullptr;
    json j{{"component", comp_name(c)},
           {"oscillatory", f->oscillatory},
           {"amplitude", f->amplitude},
           {"decay_rate", f->decay_rate},
           {"frequency", f->frequency ? json(*f->frequency) : json(nullptr)},
           {"fit_residual", f->fit_residual},
           {"maxima_used", f->maxima_used}};
    j["imag_decay_rate"] = f->imag_decay_rate ? json(*f->imag_decay_rate) : json(nullptr);
    j["imag_frequency"] = f->imag_frequency ? json(*f->imag_frequency) : json(nullptr);
    return j;
}

} // namespace

RunConfig default_config() {
    RunConfig cfg;
    cfg.params.m = 1.0;
    cfg.params.v = 1.0;
    cfg.params.gamma = 4.0;
    cfg.params.J = 5.0;
    cfg.params.q = 4;
    for (int i = -5; i <= 5; ++i) cfg.sweep.v_values.push_back(i);
    cfg.sweep.gamma_values = {0.5, 1.0, 2.0, 3.0, 4.0};
    return cfg;
}

RunConfig load_config(const fs::path& file) {
    const json j = parse_file(file);
    if (!j.is_object()) fail(file.string(), "top level must be an object");
    check_keys(j, "top level",
               {"model", "grid", "solver", "sweep", "free_init", "output_dir",
                "base_seed", "workers"});

    RunConfig cfg = default_config();
    if (j.contains("model")) cfg.params = model_from_json(j.at("model"), "model", cfg.params);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"T", "n_points"});
        cfg.T = num_field(g, "grid", "T", cfg.T);
        cfg.n_points = int_field(g, "grid", "n_points", cfg.n_points);
    }
    if (j.contains("solver")) cfg.solver = solver_from_json(j.at("solver"), "solver");
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(s, "sweep",
                   {"v_values", "gamma_values", "seeds_per_point", "enforcement_set",
                    "continuation", "refine_step", "dedup_tol", "stationarity_threshold",
                    "window_fraction", "scheme"});
        if (s.contains("v_values"))
            cfg.sweep.v_values = num_list(s.at("v_values"), "sweep.v_values");
        if (s.contains("gamma_values"))
            cfg.sweep.gamma_values = num_list(s.at("gamma_values"), "sweep.gamma_values");
        cfg.sweep.seeds_per_point =
            int_field(s, "sweep", "seeds_per_point", cfg.sweep.seeds_per_point);
        if (s.contains("enforcement_set")) {
            const json& es = s.at("enforcement_set");
            if (!es.is_array()) fail("sweep.enforcement_set", "expected an array of relation lists");
            cfg.sweep.enforcement_set.clear();
            for (const auto& e : es)
                cfg.sweep.enforcement_set.push_back(
                    enforce_from_json(e, "sweep.enforcement_set"));
        }
        if (s.contains("continuation")) {
            const std::string c = str_field(s, "sweep", "continuation", "");
            if (c == "NONE") cfg.sweep.continuation = SweepSpec::Continuation::NONE;
            else if (c == "BIDIRECTIONAL")
                cfg.sweep.continuation = SweepSpec::Continuation::BIDIRECTIONAL;
            else fail("sweep.continuation", "expected \"NONE\" or \"BIDIRECTIONAL\"");
        }
        cfg.sweep.refine_step = num_field(s, "sweep", "refine_step", cfg.sweep.refine_step);
        cfg.sweep.dedup_tol = num_field(s, "sweep", "dedup_tol", cfg.sweep.dedup_tol);
        cfg.sweep.stationarity_threshold =
            num_field(s, "sweep", "stationarity_threshold", cfg.sweep.stationarity_threshold);
        cfg.sweep.window_fraction =
            num_field(s, "sweep", "window_fraction", cfg.sweep.window_fraction);
        if (s.contains("scheme"))
            cfg.sweep.scheme = scheme_from_json(s.at("scheme"), "sweep.scheme");
    }
    if (j.contains("free_init")) {
        const json& f = j.at("free_init");
        check_keys(f, "free_init", {"Xp", "Pm", "Xm", "Pp"});
        const char* keys[4] = {"Xp", "Pm", "Xm", "Pp"};
        for (int i = 0; i < 4; ++i)
            if (f.contains(keys[i]))
                cfg.free_init[i] =
                    cxd_from_json(f.at(keys[i]), std::string("free_init.") + keys[i]);
    }
    cfg.output_dir = str_field(j, "top level", "output_dir", cfg.output_dir);
    cfg.base_seed = seed_field(j, "top level", "base_seed", cfg.base_seed);
    cfg.workers = int_field(j, "top level", "workers", cfg.workers);

    try {
        cfg.params.validate();
        cfg.solver.validate();
        cfg.sweep.validate();
        (void)cfg.grid();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.workers < 0) fail("workers", "must be >= 0");
    return cfg;
}

void save_config(const RunConfig& cfg, const fs::path& file) {
    json j;
    j["model"] = model_to_json(cfg.params);
    j["grid"] = json{{"T", cfg.T}, {"n_points", cfg.n_points}};
    j["solver"] = solver_to_json(cfg.solver);
    json es = json::array();
    for (const auto& e : cfg.sweep.enforcement_set) es.push_back(enforce_to_json(e));
    j["sweep"] = json{
        {"v_values", cfg.sweep.v_values},
        {"gamma_values", cfg.sweep.gamma_values},
        {"seeds_per_point", cfg.sweep.seeds_per_point},
        {"enforcement_set", es},
        {"continuation",
         cfg.sweep.continuation == SweepSpec::Continuation::NONE ? "NONE" : "BIDIRECTIONAL"},
        {"refine_step", cfg.sweep.refine_step},
        {"dedup_tol", cfg.sweep.dedup_tol},
        {"stationarity_threshold", cfg.sweep.stationarity_threshold},
        {"window_fraction", cfg.sweep.window_fraction},
        {"scheme", scheme_to_json(cfg.sweep.scheme)}};
    j["free_init"] = json{{"Xp", cxd_to_json(cfg.free_init[0])},
                          {"Pm", cxd_to_json(cfg.free_init[1])},
                          {"Xm", cxd_to_json(cfg.free_init[2])},
                          {"Pp", cxd_to_json(cfg.free_init[3])}};
    j["output_dir"] = cfg.output_dir;
    j["base_seed"] = cfg.base_seed;
    j["workers"] = cfg.workers;
    write_text(file, j.dump(2) + "\n");
}

std::string format_sig(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_solution(const fs::path& dir, int id, const SolutionRecord& rec,
                    const std::array<std::optional<DecayFit>, 4>& fits,
                    ActionScheme scheme, double window_fraction) {
    fs::create_directories(dir);
    const std::string stem = "solution-" + std::to_string(id);
    const TimeGrid& g = rec.G.grid;

    std::ostringstream csv;
    csv << "t,re_Gpp,im_Gpp,re_Gpm,im_Gpm,re_Gmp,im_Gmp,re_Gmm,im_Gmm\n";
    for (int k = 0; k < g.n; ++k) {
        csv << format_sig(g.time(k));
        for (int c = 0; c < 4; ++c) {
            const cxd z = rec.G.comp[c][k];
            csv << ',' << format_sig(z.real()) << ',' << format_sig(z.imag());
        }
        csv << '\n';
    }
    write_text(dir / (stem + ".csv"), csv.str());

    json j;
    j["id"] = id;
    j["csv"] = stem + ".csv";
    j["model"] = model_to_json(rec.params);
    j["grid"] = json{{"T", g.T}, {"n_points", g.n}};
    j["solver"] = solver_to_json(rec.config);
    j["warm_started"] = rec.warm_started;
    j["converged"] = rec.converged;
    j["iterations"] = rec.iterations;
    j["final_update"] = rec.final_update;
    if (rec.label) {
        j["label"] = label_name(rec.label->label);
        j["violations"] = json{{"kms", rec.label->nu_kms}, {"conj", rec.label->nu_conj}};
    } else {
        j["label"] = nullptr;
        j["violations"] = nullptr;
    }
    if (rec.action)
        j["action"] = json{{"re", rec.action->real()},
                           {"im", rec.action->imag()},
                           {"scheme", scheme_to_json(scheme)}};
    else
        j["action"] = nullptr;
    j["stationarity"] = rec.stationarity ? json(*rec.stationarity) : json(nullptr);
    j["window_fraction"] = window_fraction;
    json fj = json::array();
    for (int c = 0; c < 4; ++c) fj.push_back(fit_to_json(fits[c], c));
    j["fits"] = fj;
    write_text(dir / (stem + ".json"), j.dump(2) + "\n");
}

SolutionRecord read_solution(const fs::path& json_file) {
    const json j = parse_file(json_file);
    const std::string where = json_file.string();
    if (!j.is_object()) fail(where, "top level must be an object");

    const json& gj = j.at("grid");
    TimeGrid g(num_field(gj, "grid", "T", 0.0), int_field(gj, "grid", "n_points", 0));
    SolutionRecord rec(g);
    rec.params = model_from_json(j.at("model"), "model", ModelParams{});
    rec.config = solver_from_json(j.at("solver"), "solver");
    rec.warm_started = bool_field(j, where, "warm_started", false);
    rec.converged = bool_field(j, where, "converged", false);
    rec.iterations = int_field(j, where, "iterations", 0);
    rec.final_update = num_field(j, where, "final_update", 0.0);
    if (j.contains("label") && !j.at("label").is_null()) {
        SymmetryLabel lab;
        lab.label = label_from_name(j.at("label").get<std::string>(), where + ".label");
        const json& vj = j.at("violations");
        lab.nu_kms = num_field(vj, "violations", "kms", 0.0);
        lab.nu_conj = num_field(vj, "violations", "conj", 0.0);
        rec.label = lab;
    }
    if (j.contains("action") && !j.at("action").is_null()) {
        const json& aj = j.at("action");
        rec.action = cxd(num_field(aj, "action", "re", 0.0), num_field(aj, "action", "im", 0.0));
    }
    if (j.contains("stationarity") && !j.at("stationarity").is_null())
        rec.stationarity = j.at("stationarity").get<double>();

    const fs::path csv_file = json_file.parent_path() / j.at("csv").get<std::string>();
    std::ifstream in(csv_file);
    if (!in) throw ConfigError("cannot open " + csv_file.string());
    std::string line;
    if (!std::getline(in, line)) fail(csv_file.string(), "empty file");
    int k = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (k >= g.n) fail(csv_file.string(), "more rows than grid points");
        std::istringstream row(line);
        double val[9];
        char sep;
        for (int c = 0; c < 9; ++c) {
            if (!(row >> val[c])) fail(csv_file.string(), "bad row " + std::to_string(k));
            if (c < 8) row >> sep;
        }
        for (int c = 0; c < 4; ++c)
            rec.G.comp[c][k] = cxd(val[1 + 2 * c], val[2 + 2 * c]);
        ++k;
    }
    if (k != g.n) fail(csv_file.string(), "expected " + std::to_string(g.n) + " rows");
    return rec;
}

void rewrite_fits(const fs::path& json_file,
                  const std::array<std::optional<DecayFit>, 4>& fits) {
    json j = parse_file(json_file);
    json fj = json::array();
    for (int c = 0; c < 4; ++c) fj.push_back(fit_to_json(fits[c], c));
    j["fits"] = fj;
    write_text(json_file, j.dump(2) + "\n");
}

void write_branches_csv(const fs::path& file, const std::vector<Branch>& branches) {
    std::ostringstream out;
    out << "branch_id,label,v,Re_action,Im_action,Gamma_pp,Omega_pp,Gamma_pm,Omega_pm,"
           "stationarity,converged\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t b = 0; b < branches.size(); ++b) {
        for (const auto& [v, rec] : branches[b].points) {
            const auto fits = extract_all(rec);
            const Label lab = rec.label ? rec.label->label : branches[b].label;
            double gpp = nan, opp = nan, gpm = nan, opm = nan;
            if (fits[0]) {
                gpp = fits[0]->decay_rate;
                if (fits[0]->frequency) opp = *fits[0]->frequency;
            }
            if (fits[1]) {
                gpm = fits[1]->decay_rate;
                if (fits[1]->frequency) opm = *fits[1]->frequency;
            }
            const cxd act = rec.action.value_or(cxd(nan, nan));
            out << b << ',' << label_name(lab) << ',' << format_sig(v) << ','
                << format_sig(act.real()) << ',' << format_sig(act.imag()) << ','
                << format_sig(gpp) << ',' << format_sig(opp) << ',' << format_sig(gpm) << ','
                << format_sig(opm) << ',' << format_sig(rec.stationarity.value_or(nan)) << ','
                << (rec.converged ? 1 : 0) << '\n';
        }
    }
    write_text(file, out.str());
}

void write_phase_csv(const fs::path& file, const std::vector<PhasePoint>& points) {
    std::ostringstream out;
    out << "gamma,v,solution_count,labels,dominant,dominance_switch\n";
    for (const auto& pt : points) {
        out << format_sig(pt.gamma) << ',' << format_sig(pt.v) << ',' << pt.solution_count << ',';
        for (std::size_t i = 0; i < pt.labels.size(); ++i)
            out << (i ? "+" : "") << label_name(pt.labels[i]);
        out << ',' << label_name(pt.dominant_label) << ',' << (pt.dominance_switch ? 1 : 0)
            << '\n';
    }
    write_text(file, out.str());
}

void write_free_csv(const fs::path& file, const ModelParams& p, const TimeGrid& g,
                    const std::array<cxd, 4>& free_init) {
    std::ostringstream out;
    out << "t,re_Gpp,im_Gpp,re_Gpm,im_Gpm,re_Gmp,im_Gmp,re_Gmm,im_Gmm,"
           "re_Xp,im_Xp,re_Pm,im_Pm,re_Xm,im_Xm,re_Pp,im_Pp\n";
    HeisenbergState init{free_init[0], free_init[1], free_init[2], free_init[3]};
    for (int k = 0; k < g.n; ++k) {
        out << format_sig(g.time(k));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const cxd z = free_green(p, a, b, g.wrapped_time(k));
                out << ',' << format_sig(z.real()) << ',' << format_sig(z.imag());
            }
        const HeisenbergState s = heisenberg_evolve(p, init, g.time(k));
        for (cxd z : {s.Xp, s.Pm, s.Xm, s.Pp})
            out << ',' << format_sig(z.real()) << ',' << format_sig(z.imag());
        out << '\n';
    }
    write_text(file, out.str());
}

} // namespace syksd
