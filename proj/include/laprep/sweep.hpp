// Experiment harness: wall-connectivity and k sweeps over gridworlds,
// deterministic per seed and parallelizable across cells, with CSV output.
#pragma once

#include "laprep/bounds.hpp"
#include "laprep/gdo.hpp"
#include "laprep/tomlmini.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace laprep::bench {

struct SweepConfig {
    int n = 15;
    int m = 15;
    std::vector<int> walls;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> k_values;
    gdo::GdoConfig gdo;
    std::string output_path;

    void validate() const;
    static SweepConfig from_toml(const toml::Table& table);
};

struct SweepRecord {
    int n = 0;
    int m = 0;
    int w = 0;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    double lambda2 = 0.0;
    double lambda_k = 0.0;
    double lambda_k1 = 0.0;
    double epsilon = 0.0;
    double err_exact = 0.0;
    double err_gdo = 0.0;
    double trunc_bound = 0.0;
    bounds::BoundValue est_bound;
    bounds::BoundValue total_bound;
    double runtime_ms = 0.0;
};

struct CellError {
    int w = 0;
    std::uint64_t seed = 0;
    std::string message;
};

struct SweepResult {
    std::vector<SweepRecord> records; // sorted by (w, seed, k)
    std::vector<CellError> errors;
};

// One full pipeline evaluation of a (w, seed) cell at every requested k.
std::vector<SweepRecord> run_cell(int n, int m, int w, std::uint64_t seed,
                                  const std::vector<std::size_t>& k_values,
                                  const gdo::GdoConfig& gdo_template);

// Wall sweep: every (w, seed) cell at each k in k_values. Per-cell
// failures are recorded, never fatal.
SweepResult run_wall_sweep(const SweepConfig& config, std::size_t workers = 1);

// Same engine with walls held as configured and k ranging (1..60 when
// k_values is empty).
SweepResult run_k_sweep(const SweepConfig& config, std::size_t workers = 1);

extern const char* const kCsvHeader;

void write_csv(const SweepResult& result, const std::string& path, const SweepConfig& config);
SweepResult read_csv(const std::string& path);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace laprep::bench
