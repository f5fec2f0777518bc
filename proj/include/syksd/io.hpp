// io.hpp - JSON run configuration; JSON/CSV persistence of solutions and sweep tables
#pragma once

#include "syksd/sweep.hpp"

#include <filesystem>
#include <string>

namespace syksd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ModelParams params;            // m, v, gamma, J, q
    double T = 50.0;
    int n_points = 4096;
    SolverConfig solver;
    SweepSpec sweep;
    std::array<cxd, 4> free_init = {cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(0, 0)};  // X+, P-, X-, P+
    std::string output_dir = "out";
    std::uint64_t base_seed = 1;
    int workers = 0;               // 0 = hardware parallelism

    TimeGrid grid() const { return TimeGrid(T, n_points); }
};

// Fully resolved defaults: J=5 q=4 m=1 gamma=4 v=1, T=50 n=4096, the
// 5 x 11 desk-scale phase grid, 8 seeds x 4 enforcement subsets.
RunConfig default_config();

// Strict parse: unknown keys and type mismatches raise ConfigError naming the
// offending field; JSON syntax errors carry the parser's line/column text.
RunConfig load_config(const std::filesystem::path& file);

// Writes the fully expanded configuration (every default made explicit).
void save_config(const RunConfig& cfg, const std::filesystem::path& file);

// Locale-free decimal with 17 significant digits (round-trips any double).
std::string format_sig(double x);

// solution-<id>.json (metadata: params, label, violations, action, stationarity,
// fits) next to solution-<id>.csv (t plus Re/Im of all four components, one row
// per grid sample in index order).
void write_solution(const std::filesystem::path& dir, int id, const SolutionRecord& rec,
                    const std::array<std::optional<DecayFit>, 4>& fits,
                    ActionScheme scheme, double window_fraction);

// Re-ingests a solution pair written by write_solution.
SolutionRecord read_solution(const std::filesystem::path& json_file);

// Replaces only the fits block of an existing solution JSON, leaving the rest
// of the file (and its sibling CSV) untouched.
void rewrite_fits(const std::filesystem::path& json_file,
                  const std::array<std::optional<DecayFit>, 4>& fits);

void write_branches_csv(const std::filesystem::path& file, const std::vector<Branch>& branches);
void write_phase_csv(const std::filesystem::path& file, const std::vector<PhasePoint>& points);

// Closed-form J=0 Green's function columns plus the Heisenberg trajectory of
// free_init, all on the same time grid.
void write_free_csv(const std::filesystem::path& file, const ModelParams& p,
                    const TimeGrid& g, const std::array<cxd, 4>& free_init);

} // namespace syksd
