// Command-line front end: environment generation, spectra, GDO training,
// the connectivity sweeps, plotting and the self-check suite.
#include "laprep/bounds.hpp"
#include "laprep/chain.hpp"
#include "laprep/gdo.hpp"
#include "laprep/gridworld.hpp"
#include "laprep/plots.hpp"
#include "laprep/spectral.hpp"
#include "laprep/sweep.hpp"
#include "laprep/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <thread>

namespace {

using namespace laprep;

int cmd_grid(const std::string& out, int rows, int cols, int walls, std::uint64_t seed) {
    grid::GridEnv env = grid::build_grid(rows, cols);
    env = grid::carve_walls(env, static_cast<std::size_t>(walls), seed);
    grid::save_env(env, out);
    std::printf("wrote %s (%d x %d, %d walls, %zu edges remain)\n", out.c_str(), rows, cols,
                walls, grid::present_edges(env).size());
    return 0;
}

int cmd_spectrum(const std::string& env_path, const std::string& out) {
    const grid::GridEnv env = grid::load_env(env_path);
    const grid::ErgodicChain cell = grid::to_chain(env);
    const Vector phi = chain::stationary_distribution(cell.P);
    const DenseMatrix l = spectral::build_laplacian(cell.P, phi);
    const spectral::SpectralBundle bundle = spectral::spectrum(l, phi);

    std::ofstream file(out, std::ios::binary);
    if (!file) throw IoError("spectrum: cannot open " + out);
    file << "# format_version 1\n";
    file << "index,lambda\n";
    char buf[64];
    for (std::size_t i = 0; i < bundle.lambdas.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i + 1, bundle.lambdas[i]);
        file << buf;
    }
    std::printf("wrote %s (|S| = %zu, lambda_2 = %.6g)\n", out.c_str(), bundle.lambdas.size(),
                bundle.lambdas.size() > 1 ? bundle.lambdas[1] : 0.0);
    return 0;
}

int cmd_gdo(const std::string& env_path, const std::string& out, std::size_t k, double beta,
            std::size_t iters, std::uint64_t seed, double step, bool stochastic,
            std::size_t batch) {
    const grid::GridEnv env = grid::load_env(env_path);
    const grid::ErgodicChain cell = grid::to_chain(env);
    const Vector phi = chain::stationary_distribution(cell.P);
    const DenseMatrix l = spectral::build_laplacian(cell.P, phi);
    const spectral::SpectralBundle bundle = spectral::spectrum(l, phi);

    gdo::GdoConfig cfg;
    cfg.k = k;
    cfg.beta = beta;
    cfg.iterations = iters;
    cfg.seed = seed;
    cfg.step_size = step;
    cfg.mode = stochastic ? gdo::Mode::Stochastic : gdo::Mode::FullGradient;
    cfg.batch = batch;
    const gdo::Representation rep = gdo::learn_representation(cell, l, phi, bundle.lambdas, cfg);
    gdo::write_trace_csv(rep.optimizer_trace, out);
    std::printf("wrote %s (k = %zu, epsilon = %.6g, final loss = %.9g)\n", out.c_str(), k,
                rep.epsilon, rep.optimizer_trace.back().second);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::size_t workers,
              bool k_mode) {
    bench::SweepConfig config = bench::SweepConfig::from_toml(toml::parse_file(config_path));
    if (!out.empty()) config.output_path = out;
    if (config.output_path.empty()) throw SchemaError("sweep: no output path configured");
    if (config.k_values.empty() && !k_mode)
        throw SchemaError("sweep: k_values missing from the config");
    const bench::SweepResult result = k_mode ? bench::run_k_sweep(config, workers)
                                             : bench::run_wall_sweep(config, workers);
    bench::write_csv(result, config.output_path, config);
    std::printf("wrote %s (%zu records, %zu cell errors)\n", config.output_path.c_str(),
                result.records.size(), result.errors.size());
    return result.errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplacian representations of average-reward gridworld MDPs"};
    app.require_subcommand(1);

    auto* grid_cmd = app.add_subcommand("grid", "Generate a gridworld environment JSON");
    int rows = 15, cols = 15, walls = 0;
    std::uint64_t grid_seed = 0;
    std::string grid_out = "env.json";
    grid_cmd->add_option("--rows", rows, "Grid rows")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--cols", cols, "Grid columns")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--walls", walls, "Edges to remove");
    grid_cmd->add_option("--seed", grid_seed, "Carving seed");
    grid_cmd->add_option("--out", grid_out, "Output JSON path");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Laplacian spectrum of an environment");
    std::string spec_env, spec_out = "spectrum.csv";
    spectrum_cmd->add_option("--env", spec_env, "Environment JSON")->required();
    spectrum_cmd->add_option("--out", spec_out, "Output CSV path");

    auto* gdo_cmd = app.add_subcommand("gdo", "Train tabular GDO features on an environment");
    std::string gdo_env, gdo_out = "rep.csv";
    std::size_t gdo_k = 20, gdo_iters = 20000, gdo_batch = 32;
    double gdo_beta = 5.0, gdo_step = 0.05;
    std::uint64_t gdo_seed = 0;
    bool gdo_stochastic = false;
    gdo_cmd->add_option("--env", gdo_env, "Environment JSON")->required();
    gdo_cmd->add_option("--k", gdo_k, "Number of features");
    gdo_cmd->add_option("--beta", gdo_beta, "Orthonormality penalty weight");
    gdo_cmd->add_option("--iters", gdo_iters, "Gradient iterations");
    gdo_cmd->add_option("--seed", gdo_seed, "Init seed");
    gdo_cmd->add_option("--step", gdo_step, "Base step size");
    gdo_cmd->add_flag("--stochastic", gdo_stochastic, "Sampled-pairs mode");
    gdo_cmd->add_option("--batch", gdo_batch, "Stochastic batch size");
    gdo_cmd->add_option("--out", gdo_out, "Optimizer trace CSV path");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run the wall-connectivity sweep");
    std::string sweep_config, sweep_out;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    sweep_cmd->add_option("--config", sweep_config, "Sweep TOML config")->required();
    sweep_cmd->add_option("--out", sweep_out, "Results CSV (overrides config)");
    sweep_cmd->add_option("--workers", workers, "Parallel workers");

    auto* kswep_cmd = app.add_subcommand("kswep", "Run the k sweep (walls fixed, k ranging)");
    std::string kswep_config, kswep_out;
    std::size_t kswep_workers = std::max(1u, std::thread::hardware_concurrency());
    kswep_cmd->add_option("--config", kswep_config, "Sweep TOML config")->required();
    kswep_cmd->add_option("--out", kswep_out, "Results CSV (overrides config)");
    kswep_cmd->add_option("--workers", kswep_workers, "Parallel workers");

    auto* plot_cmd = app.add_subcommand("plot", "Render the five sweep figures as SVG");
    std::string plot_in, plot_dir = "figs";
    plot_cmd->add_option("--in", plot_in, "Results CSV")->required();
    plot_cmd->add_option("--out-dir", plot_dir, "Output directory");

    auto* verify_cmd = app.add_subcommand("verify", "Run the property self-check suite");
    bool fast = false;
    verify_cmd->add_flag("--fast", fast, "Reduced trial counts");

    CLI11_PARSE(app, argc, argv);

    try {
        if (grid_cmd->parsed()) return cmd_grid(grid_out, rows, cols, walls, grid_seed);
        if (spectrum_cmd->parsed()) return cmd_spectrum(spec_env, spec_out);
        if (gdo_cmd->parsed())
            return cmd_gdo(gdo_env, gdo_out, gdo_k, gdo_beta, gdo_iters, gdo_seed, gdo_step,
                           gdo_stochastic, gdo_batch);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_config, sweep_out, workers, false);
        if (kswep_cmd->parsed()) return cmd_sweep(kswep_config, kswep_out, kswep_workers, true);
        if (plot_cmd->parsed()) {
            laprep::bench::render_plots(plot_in, plot_dir);
            std::printf("wrote 5 figures to %s\n", plot_dir.c_str());
            return 0;
        }
        if (verify_cmd->parsed()) return laprep::bench::verify(fast) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
