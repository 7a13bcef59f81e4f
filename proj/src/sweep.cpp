#include "laprep/sweep.hpp"

#include "laprep/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace laprep::bench {

const char* const kCsvHeader =
    "n,m,w,seed,k,lambda2,lambda_k,lambda_k1,epsilon,err_exact,err_gdo,"
    "trunc_bound,est_bound,total_bound,runtime_ms";

void SweepConfig::validate() const {
    if (n < 2 || m < 2) throw InvalidSize("sweep: need at least a 2x2 grid");
    if (walls.empty()) throw SchemaError("sweep: no wall counts configured");
    if (seeds.empty()) throw SchemaError("sweep: no seeds configured");
    if (k_values.empty()) throw SchemaError("sweep: no k values configured");
    const long spare = static_cast<long>(n) * (m - 1) + static_cast<long>(m) * (n - 1) -
                       (static_cast<long>(n) * m - 1);
    for (int w : walls)
        if (w < 0 || w > spare)
            throw TooManyWalls("sweep: w = " + std::to_string(w) +
                               " violates the spanning-tree margin " + std::to_string(spare));
    const std::size_t states = static_cast<std::size_t>(n) * m;
    for (std::size_t k : k_values)
        if (k == 0 || k >= states) throw DimensionMismatch("sweep: need 1 <= k < |S|");
}

SweepConfig SweepConfig::from_toml(const toml::Table& table) {
    SweepConfig config;
    config.n = static_cast<int>(toml::require(table, "n").as_int());
    config.m = static_cast<int>(toml::require(table, "m").as_int());
    for (std::int64_t w : toml::require(table, "walls").as_int_array())
        config.walls.push_back(static_cast<int>(w));
    for (std::int64_t s : toml::require(table, "seeds").as_int_array())
        config.seeds.push_back(static_cast<std::uint64_t>(s));
    if (toml::contains(table, "k_values"))
        for (std::int64_t k : toml::require(table, "k_values").as_int_array())
            config.k_values.push_back(static_cast<std::size_t>(k));
    if (toml::contains(table, "output_path"))
        config.output_path = toml::require(table, "output_path").as_string();

    if (toml::contains(table, "gdo.k"))
        config.gdo.k = static_cast<std::size_t>(toml::require(table, "gdo.k").as_int());
    if (toml::contains(table, "gdo.beta")) config.gdo.beta = toml::require(table, "gdo.beta").as_double();
    if (toml::contains(table, "gdo.step_size"))
        config.gdo.step_size = toml::require(table, "gdo.step_size").as_double();
    if (toml::contains(table, "gdo.iterations"))
        config.gdo.iterations =
            static_cast<std::size_t>(toml::require(table, "gdo.iterations").as_int());
    if (toml::contains(table, "gdo.seed"))
        config.gdo.seed = static_cast<std::uint64_t>(toml::require(table, "gdo.seed").as_int());
    if (toml::contains(table, "gdo.batch"))
        config.gdo.batch = static_cast<std::size_t>(toml::require(table, "gdo.batch").as_int());
    if (toml::contains(table, "gdo.mode")) {
        const std::string& mode = toml::require(table, "gdo.mode").as_string();
        if (mode == "full")
            config.gdo.mode = gdo::Mode::FullGradient;
        else if (mode == "stochastic")
            config.gdo.mode = gdo::Mode::Stochastic;
        else
            throw SchemaError("sweep: gdo.mode must be 'full' or 'stochastic'");
    }
    if (config.k_values.empty() && toml::contains(table, "gdo.k"))
        config.k_values.push_back(config.gdo.k);
    return config;
}

std::vector<SweepRecord> run_cell(int n, int m, int w, std::uint64_t seed,
                                  const std::vector<std::size_t>& k_values,
                                  const gdo::GdoConfig& gdo_template) {
    // Independent streams so GDO settings never change the environment.
    const grid::GridEnv env =
        grid::carve_walls(grid::build_grid(n, m), static_cast<std::size_t>(w),
                          derive_seed(seed, 0));
    const grid::ErgodicChain cell_chain = grid::to_chain(env);
    const chain::ValueSolution value = chain::solve_poisson(cell_chain.P, cell_chain.r);
    const DenseMatrix laplacian = spectral::build_laplacian(cell_chain.P, value.phi);
    const spectral::SpectralBundle bundle = spectral::spectrum(laplacian, value.phi);

    std::vector<std::size_t> ks = k_values;
    std::sort(ks.begin(), ks.end());

    std::vector<SweepRecord> records;
    records.reserve(ks.size());
    for (std::size_t k : ks) {
        const auto start = std::chrono::steady_clock::now();
        gdo::GdoConfig cfg = gdo_template;
        cfg.k = k;
        cfg.seed = derive_seed(seed, 1);
        const gdo::Representation rep =
            gdo::learn_representation(cell_chain, laplacian, value.phi, bundle.lambdas, cfg);
        const bounds::BoundReport report = bounds::make_report(cell_chain, bundle, rep, value, k);
        const auto stop = std::chrono::steady_clock::now();

        SweepRecord rec;
        rec.n = n;
        rec.m = m;
        rec.w = w;
        rec.seed = seed;
        rec.k = k;
        rec.lambda2 = report.lambda2;
        rec.lambda_k = report.lambda_k;
        rec.lambda_k1 = report.lambda_k1;
        rec.epsilon = report.epsilon;
        rec.err_exact = report.err_exact_basis;
        rec.err_gdo = report.err_learned_basis;
        rec.trunc_bound = report.truncation_bound;
        rec.est_bound = report.estimation_bound;
        rec.total_bound = report.total_bound;
        rec.runtime_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        records.push_back(rec);
    }
    return records;
}

namespace {

SweepResult run_cells(const SweepConfig& config, std::size_t workers) {
    config.validate();
    struct Cell {
        int w;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (int w : config.walls)
        for (std::uint64_t seed : config.seeds) cells.push_back({w, seed});

    std::vector<std::vector<SweepRecord>> slots(cells.size());
    std::vector<std::unique_ptr<CellError>> error_slots(cells.size());
    std::atomic<std::size_t> next{0};

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            try {
                slots[i] = run_cell(config.n, config.m, cells[i].w, cells[i].seed,
                                    config.k_values, config.gdo);
            } catch (const std::exception& e) {
                error_slots[i] =
                    std::make_unique<CellError>(CellError{cells[i].w, cells[i].seed, e.what()});
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, cells.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    SweepResult result;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        result.records.insert(result.records.end(), slots[i].begin(), slots[i].end());
        if (error_slots[i]) result.errors.push_back(*error_slots[i]);
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const SweepRecord& a, const SweepRecord& b) {
                  return std::tie(a.w, a.seed, a.k) < std::tie(b.w, b.seed, b.k);
              });
    std::sort(result.errors.begin(), result.errors.end(), [](const CellError& a, const CellError& b) {
        return std::tie(a.w, a.seed) < std::tie(b.w, b.seed);
    });
    return result;
}

}  // namespace

SweepResult run_wall_sweep(const SweepConfig& config, std::size_t workers) {
    return run_cells(config, workers);
}

SweepResult run_k_sweep(const SweepConfig& config, std::size_t workers) {
    SweepConfig cfg = config;
    if (cfg.k_values.empty())
        for (std::size_t k = 1; k <= 60; ++k) cfg.k_values.push_back(k);
    return run_cells(cfg, workers);
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string format_bound(const bounds::BoundValue& b) {
    return b.finite ? format_double(b.value) : std::string("inf");
}

}  // namespace

void write_csv(const SweepResult& result, const std::string& path, const SweepConfig& config) {
    if (result.records.empty()) throw IoError("write_csv: no records");
    // Re-check the report invariants at write time.
    for (const SweepRecord& r : result.records) {
        if (r.epsilon < 0.0 || r.err_exact > r.trunc_bound + 1e-9 ||
            (r.total_bound.finite && r.err_gdo > r.total_bound.value + 1e-9))
            throw InvariantViolated("write_csv: record (w=" + std::to_string(r.w) +
                                    ", seed=" + std::to_string(r.seed) +
                                    ", k=" + std::to_string(r.k) + ") violates its bounds");
    }
    std::ostringstream out;
    out << "# format_version 1\n";
    out << "# gdo beta=" << format_double(config.gdo.beta)
        << " step_size=" << format_double(config.gdo.step_size)
        << " iterations=" << config.gdo.iterations
        << " mode=" << (config.gdo.mode == gdo::Mode::FullGradient ? "full" : "stochastic")
        << " batch=" << config.gdo.batch << "\n";
    for (const CellError& e : result.errors)
        out << "# error w=" << e.w << " seed=" << e.seed << ": " << e.message << "\n";
    out << kCsvHeader << "\n";
    for (const SweepRecord& r : result.records) {
        out << r.n << ',' << r.m << ',' << r.w << ',' << r.seed << ',' << r.k << ','
            << format_double(r.lambda2) << ',' << format_double(r.lambda_k) << ','
            << format_double(r.lambda_k1) << ',' << format_double(r.epsilon) << ','
            << format_double(r.err_exact) << ',' << format_double(r.err_gdo) << ','
            << format_double(r.trunc_bound) << ',' << format_bound(r.est_bound) << ','
            << format_bound(r.total_bound) << ',' << format_double(r.runtime_ms) << "\n";
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("write_csv: cannot open " + path);
    file << out.str();
    if (!file) throw IoError("write_csv: write failed for " + path);
}

namespace {

bounds::BoundValue parse_bound(const std::string& token) {
    if (token == "inf") return bounds::BoundValue::infinite();
    return bounds::BoundValue::of(std::strtod(token.c_str(), nullptr));
}

}  // namespace

SweepResult read_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("read_csv: cannot open " + path);
    SweepResult result;
    std::string line;
    bool header_seen = false;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw SchemaError("read_csv: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        std::vector<std::string> tokens;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ',')) tokens.push_back(token);
        if (tokens.size() != 15)
            throw SchemaError("read_csv: expected 15 columns, got " +
                              std::to_string(tokens.size()));
        SweepRecord r;
        r.n = std::atoi(tokens[0].c_str());
        r.m = std::atoi(tokens[1].c_str());
        r.w = std::atoi(tokens[2].c_str());
        r.seed = std::strtoull(tokens[3].c_str(), nullptr, 10);
        r.k = static_cast<std::size_t>(std::strtoull(tokens[4].c_str(), nullptr, 10));
        r.lambda2 = std::strtod(tokens[5].c_str(), nullptr);
        r.lambda_k = std::strtod(tokens[6].c_str(), nullptr);
        r.lambda_k1 = std::strtod(tokens[7].c_str(), nullptr);
        r.epsilon = std::strtod(tokens[8].c_str(), nullptr);
        r.err_exact = std::strtod(tokens[9].c_str(), nullptr);
        r.err_gdo = std::strtod(tokens[10].c_str(), nullptr);
        r.trunc_bound = std::strtod(tokens[11].c_str(), nullptr);
        r.est_bound = parse_bound(tokens[12]);
        r.total_bound = parse_bound(tokens[13]);
        r.runtime_ms = std::strtod(tokens[14].c_str(), nullptr);
        result.records.push_back(r);
    }
    if (!header_seen) throw SchemaError("read_csv: missing header");
    return result;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DimensionMismatch("spearman: need two equal-length series");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> rank(n, 0.0);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Degenerate("spearman: constant series");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace laprep::bench
