#include "syksd/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

namespace syksd {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void finalize(SolutionRecord& rec, const SweepSpec& spec) {
    rec.label = classify(rec.G);
    rec.stationarity = stationarity(rec.G, spec.window_fraction).value;
    if (rec.converged) {
        try {
            rec.action = on_shell_action(rec, spec.scheme).density;
        } catch (const std::exception&) {
            // unwrappable or singular kernels leave the action empty
        }
    }
    rec.sigma.reset();  // recomputable from G; keeps bulk storage light
}

bool is_stationary(const SolutionRecord& r, const SweepSpec& spec) {
    return r.converged && r.stationarity &&
           *r.stationarity < spec.stationarity_threshold;
}

// keep the better of two orbit-duplicates: stationary wins, then smaller update
void insert_dedup(std::vector<SolutionRecord>& out, SolutionRecord&& rec,
                  const SweepSpec& spec) {
    for (auto& r : out) {
        if (orbit_distance(r.G, rec.G) < spec.dedup_tol) {
            const bool rs = is_stationary(r, spec), ns = is_stationary(rec, spec);
            if ((ns && !rs) || (ns == rs && rec.final_update < r.final_update))
                r = std::move(rec);
            return;
        }
    }
    out.push_back(std::move(rec));
}

std::vector<double> refined_ladder(const std::vector<double>& v_values, double step) {
    const double lo = *std::min_element(v_values.begin(), v_values.end());
    const double hi = *std::max_element(v_values.begin(), v_values.end());
    std::vector<double> lad;
    const int count = std::max(0, static_cast<int>(std::lround((hi - lo) / step)));
    for (int i = 0; i <= count; ++i) lad.push_back(lo + i * step);
    if (!lad.empty()) lad.back() = hi;
    for (double v : v_values) {
        bool present = false;
        for (double x : lad)
            if (std::abs(x - v) < 1e-9) { present = true; break; }
        if (!present) lad.push_back(v);
    }
    std::sort(lad.begin(), lad.end());
    return lad;
}

bool subset_allowed(const EnforceSet& e, Label l) {
    const bool k = l == Label::KC || l == Label::K;
    const bool c = l == Label::KC || l == Label::C;
    return (!e.kms || k) && (!e.conj || c);
}

int label_rank(Label l) {
    switch (l) {
        case Label::KC: return 3;
        case Label::C: return 2;
        case Label::K: return 1;
        default: return 0;
    }
}

using Pass = std::vector<std::optional<SolutionRecord>>;

Pass march(const ModelParams& p, const SweepSpec& spec, const SolverConfig& base,
           const TimeGrid& g, const std::vector<double>& ladder, std::size_t start,
           int direction, const SolutionRecord& seed_rec, const EnforceSet& enf,
           std::uint64_t pass_seed) {
    Pass out(ladder.size());
    out[start] = seed_rec;
    TwoPointFunction G = seed_rec.G;
    for (std::size_t i = start + direction; i < ladder.size();
         i += direction) {  // unsigned wrap ends the loop at either edge
        ModelParams pv = p;
        pv.v = ladder[i];
        SolverConfig cfg = base;
        cfg.enforce = enf;
        cfg.warm_start = G;
        perturb(*cfg.warm_start, derive_seed(pass_seed, i, 0, 1), 1e-8);
        try {
            SolutionRecord rec = iterate(pv, cfg, g);
            if (rec.converged) {
                G = rec.G;  // next rung continues from the converged state
                finalize(rec, spec);
                out[i] = std::move(rec);
            }
            // non-converged rung: gap; keep marching from the last good state
        } catch (const std::exception&) {
            // divergence / singular kernel: gap
        }
    }
    return out;
}

// cut a pass into branches at gaps, label changes, and continuity violations
void split_into_branches(const std::vector<double>& ladder, Pass&& pass,
                         Branch::Provenance prov, std::vector<Branch>& out) {
    Branch cur;
    cur.provenance = prov;
    auto flush = [&]() {
        if (!cur.points.empty()) out.push_back(std::move(cur));
        cur = Branch{};
        cur.provenance = prov;
    };
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!pass[i]) {
            flush();
            continue;
        }
        SolutionRecord& rec = *pass[i];
        const Label l = rec.label ? rec.label->label : Label::NONE;
        if (!cur.points.empty()) {
            const TwoPointFunction& prevG = cur.points.back().second.G;
            const double jump = l2_diff(prevG, rec.G);
            const double bound = 0.5 * std::max(prevG.l2(), rec.G.l2());
            if (l != cur.label || jump > bound) flush();
        }
        if (cur.points.empty()) cur.label = l;
        cur.points.emplace_back(ladder[i], std::move(rec));
    }
    flush();
}

// two branches are the same object if they agree (orbit-wise) at every shared v
bool same_branch(const Branch& a, const Branch& b, double tol) {
    if (a.label != b.label) return false;
    bool shared = false;
    for (const auto& [va, ra] : a.points)
        for (const auto& [vb, rb] : b.points) {
            if (std::abs(va - vb) > 1e-9) continue;
            shared = true;
            if (orbit_distance(ra.G, rb.G) >= tol) return false;
        }
    return shared;
}

void merge_branch(Branch& into, Branch&& from, const SweepSpec& spec) {
    for (auto& [v, rec] : from.points) {
        bool found = false;
        for (auto& [vi, ri] : into.points) {
            if (std::abs(vi - v) > 1e-9) continue;
            found = true;
            const bool rs = is_stationary(ri, spec), ns = is_stationary(rec, spec);
            if ((ns && !rs) || (ns == rs && rec.final_update < ri.final_update))
                ri = std::move(rec);
            break;
        }
        if (!found) into.points.emplace_back(v, std::move(rec));
    }
    std::sort(into.points.begin(), into.points.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                          std::uint64_t subset, std::uint64_t trial) {
    return splitmix(splitmix(splitmix(splitmix(base) ^ point) ^ subset) ^ trial);
}

void SweepSpec::validate() const {
    if (seeds_per_point < 1)
        throw std::invalid_argument("SweepSpec: seeds_per_point must be >= 1");
    if (enforcement_set.empty())
        throw std::invalid_argument("SweepSpec: enforcement_set must be non-empty");
    if (!(refine_step > 0.0))
        throw std::invalid_argument("SweepSpec: refine_step must be > 0");
    if (!(dedup_tol > 0.0) || !(stationarity_threshold > 0.0))
        throw std::invalid_argument("SweepSpec: tolerances must be > 0");
    if (!(window_fraction > 0.0 && window_fraction < 0.5))
        throw std::invalid_argument("SweepSpec: window_fraction must be in (0, 0.5)");
    if (continuation != Continuation::NONE && v_values.size() >= 2) {
        const bool inc = v_values[1] > v_values[0];
        for (std::size_t i = 1; i < v_values.size(); ++i) {
            const bool step_inc = v_values[i] > v_values[i - 1];
            if (step_inc != inc || v_values[i] == v_values[i - 1])
                throw std::invalid_argument(
                    "SweepSpec: v_values must be strictly monotone under continuation");
        }
    }
}

std::vector<SolutionRecord> solve_point(const ModelParams& p, const SweepSpec& spec,
                                        const SolverConfig& base, const TimeGrid& g,
                                        std::uint64_t base_seed,
                                        std::uint64_t point_index) {
    p.validate();
    spec.validate();
    std::vector<SolutionRecord> out;
    for (std::size_t si = 0; si < spec.enforcement_set.size(); ++si) {
        for (int t = 0; t < spec.seeds_per_point; ++t) {
            SolverConfig cfg = base;
            cfg.enforce = spec.enforcement_set[si];
            cfg.warm_start.reset();
            cfg.seed = derive_seed(base_seed, point_index, si, static_cast<std::uint64_t>(t));
            try {
                SolutionRecord rec = iterate(p, cfg, g);
                if (!rec.converged) continue;
                finalize(rec, spec);
                insert_dedup(out, std::move(rec), spec);
            } catch (const std::exception&) {
                // divergent or singular trials are simply not solutions
            }
        }
    }
    return out;
}

std::vector<Branch> continuation_scan(const ModelParams& p, const SweepSpec& spec,
                                      double gamma, const SolverConfig& base,
                                      const TimeGrid& g, std::uint64_t base_seed) {
    spec.validate();
    if (spec.continuation == SweepSpec::Continuation::NONE)
        throw std::invalid_argument("continuation_scan: spec.continuation is NONE");
    if (spec.v_values.empty())
        throw std::invalid_argument("continuation_scan: empty v_values");

    ModelParams pr = p;
    pr.gamma = gamma;
    const std::vector<double> ladder = refined_ladder(spec.v_values, spec.refine_step);

    std::vector<Branch> branches;
    const bool single = ladder.size() == 1;
    for (int side = 0; side < (single ? 1 : 2); ++side) {
        const std::size_t idx = side == 0 ? 0 : ladder.size() - 1;
        ModelParams pe = pr;
        pe.v = ladder[idx];
        const auto sols = solve_point(pe, spec, base, g, base_seed, idx);
        for (std::size_t s = 0; s < sols.size(); ++s) {
            const Label l = sols[s].label ? sols[s].label->label : Label::NONE;
            if (single) {
                Pass pass(1);
                pass[0] = sols[s];
                split_into_branches(ladder, std::move(pass),
                                    Branch::Provenance::SYMMETRY_SEEDED, branches);
                continue;
            }
            for (std::size_t si = 0; si < spec.enforcement_set.size(); ++si) {
                if (!subset_allowed(spec.enforcement_set[si], l)) continue;
                const std::uint64_t pass_seed =
                    derive_seed(base_seed, 0xC0DE + idx, s, si);
                Pass pass = march(pr, spec, base, g, ladder, idx, side == 0 ? 1 : -1,
                                  sols[s], spec.enforcement_set[si], pass_seed);
                split_into_branches(ladder, std::move(pass),
                                    Branch::Provenance::CONTINUATION, branches);
            }
        }
    }

    // deduplicate branches that traced the same object from different starts
    std::vector<Branch> unique;
    for (auto& b : branches) {
        bool merged = false;
        for (auto& u : unique) {
            if (same_branch(u, b, spec.dedup_tol)) {
                merge_branch(u, std::move(b), spec);
                merged = true;
                break;
            }
        }
        if (!merged) unique.push_back(std::move(b));
    }
    std::sort(unique.begin(), unique.end(), [](const Branch& a, const Branch& b) {
        if (a.points.size() != b.points.size()) return a.points.size() > b.points.size();
        if (a.points.front().first != b.points.front().first)
            return a.points.front().first < b.points.front().first;
        return label_rank(a.label) > label_rank(b.label);
    });
    return unique;
}

std::vector<SolutionRecord> discover_point(const ModelParams& p, const SweepSpec& spec,
                                           const SolverConfig& base, const TimeGrid& g,
                                           std::uint64_t base_seed) {
    SweepSpec sc = spec;
    if (sc.v_values.empty()) sc.v_values = {std::min(-5.0, p.v), std::max(5.0, p.v)};
    if (std::none_of(sc.v_values.begin(), sc.v_values.end(),
                     [&](double v) { return std::abs(v - p.v) < 1e-9; })) {
        sc.v_values.push_back(p.v);
        std::sort(sc.v_values.begin(), sc.v_values.end());
    }

    std::vector<SolutionRecord> out = solve_point(p, sc, base, g, base_seed, 0x501E);
    if (sc.continuation != SweepSpec::Continuation::NONE && sc.v_values.size() > 1) {
        auto branches = continuation_scan(p, sc, p.gamma, base, g, base_seed);
        for (auto& b : branches)
            for (auto& [v, rec] : b.points)
                if (std::abs(v - p.v) < 1e-9)
                    insert_dedup(out, std::move(rec), sc);
    }

    std::sort(out.begin(), out.end(), [&](const SolutionRecord& a, const SolutionRecord& b) {
        const bool sa = is_stationary(a, sc), sb = is_stationary(b, sc);
        if (sa != sb) return sa;
        const int ra = a.label ? label_rank(a.label->label) : 0;
        const int rb = b.label ? label_rank(b.label->label) : 0;
        if (ra != rb) return ra > rb;
        const double xa = a.action ? a.action->real() : 0.0;
        const double xb = b.action ? b.action->real() : 0.0;
        return xa < xb;
    });
    return out;
}

std::vector<PhasePoint> phase_diagram(const ModelParams& p, const SweepSpec& spec,
                                      const SolverConfig& base, const TimeGrid& g,
                                      std::uint64_t base_seed, int workers,
                                      std::vector<Branch>* branches_out) {
    spec.validate();
    if (spec.gamma_values.empty() || spec.v_values.empty())
        throw std::invalid_argument("phase_diagram: empty grid");

    const std::size_t rows = spec.gamma_values.size();
    std::vector<std::vector<PhasePoint>> row_points(rows);
    std::vector<std::vector<Branch>> row_branches(rows);
    std::vector<std::string> row_errors(rows);

    auto run_row = [&](std::size_t r) {
        try {
            const double gamma = spec.gamma_values[r];
            const std::uint64_t row_seed = derive_seed(base_seed, 0xFADE, r, 0);
            std::vector<Branch> branches;
            if (spec.continuation != SweepSpec::Continuation::NONE &&
                spec.v_values.size() > 1)
                branches = continuation_scan(p, spec, gamma, base, g, row_seed);

            const std::vector<double> ladder =
                refined_ladder(spec.v_values, spec.refine_step);
            std::vector<PhasePoint> pts;
            for (std::size_t vi = 0; vi < spec.v_values.size(); ++vi) {
                const double v = spec.v_values[vi];
                ModelParams pv = p;
                pv.gamma = gamma;
                pv.v = v;

                std::vector<SolutionRecord> recs;
                // endpoint multi-starts already ran inside the scan with the
                // same seeds; rerunning them would only reproduce duplicates
                std::size_t lad_idx = 0;
                for (std::size_t i = 0; i < ladder.size(); ++i)
                    if (std::abs(ladder[i] - v) < 1e-9) lad_idx = i;
                const bool endpoint =
                    !branches.empty() &&
                    (lad_idx == 0 || lad_idx == ladder.size() - 1);
                if (!endpoint)
                    recs = solve_point(pv, spec, base, g, row_seed, lad_idx);
                for (const auto& b : branches)
                    for (const auto& [vb, rec] : b.points)
                        if (std::abs(vb - v) < 1e-9) {
                            SolutionRecord copy = rec;
                            insert_dedup(recs, std::move(copy), spec);
                        }

                PhasePoint pt;
                pt.gamma = gamma;
                pt.v = v;
                std::vector<const SolutionRecord*> stat;
                for (const auto& rec : recs)
                    if (is_stationary(rec, spec)) stat.push_back(&rec);
                pt.solution_count = static_cast<int>(stat.size());
                std::sort(stat.begin(), stat.end(), [](const auto* a, const auto* b) {
                    const int ra = a->label ? label_rank(a->label->label) : 0;
                    const int rb = b->label ? label_rank(b->label->label) : 0;
                    return ra > rb;
                });
                for (const auto* rp : stat)
                    pt.labels.push_back(rp->label ? rp->label->label : Label::NONE);

                std::vector<const SolutionRecord*> with_action;
                for (const auto* rp : stat)
                    if (rp->action) with_action.push_back(rp);
                if (!with_action.empty()) {
                    const auto dom = dominant(with_action);
                    pt.dominant_label = with_action[dom.index]->label
                                            ? with_action[dom.index]->label->label
                                            : Label::NONE;
                }
                pts.push_back(std::move(pt));
            }
            for (std::size_t vi = 1; vi < pts.size(); ++vi)
                pts[vi].dominance_switch =
                    pts[vi].solution_count > 0 && pts[vi - 1].solution_count > 0 &&
                    pts[vi].dominant_label != pts[vi - 1].dominant_label;
            row_points[r] = std::move(pts);
            row_branches[r] = std::move(branches);
        } catch (const std::exception& e) {
            row_errors[r] = e.what();
        }
    };

    const int nw = std::max(1, std::min<int>(workers, static_cast<int>(rows)));
    std::size_t next = 0;
    while (next < rows) {
        std::vector<std::thread> batch;
        for (int w = 0; w < nw && next < rows; ++w, ++next)
            batch.emplace_back(run_row, next);
        for (auto& t : batch) t.join();
    }
    for (const auto& err : row_errors)
        if (!err.empty()) throw std::runtime_error("phase_diagram row failed: " + err);

    std::vector<PhasePoint> out;
    for (std::size_t r = 0; r < rows; ++r)
        for (auto& pt : row_points[r]) out.push_back(std::move(pt));
    if (branches_out) {
        branches_out->clear();
        for (std::size_t r = 0; r < rows; ++r)
            for (auto& b : row_branches[r]) branches_out->push_back(std::move(b));
    }
    return out;
}

} // namespace syksd
