// Command-line front end: tabulate PSDs, synthesize noise traces, emit
// transfer functions, run the Monte Carlo scenarios and the validation suite.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-tolerance failure
// in `validate`.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sgnoise/sgnoise.hpp"
#include "sgnoise/validation.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path = "-";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t trials = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* copt = cmd->add_option("--config", args.config_path, "scenario configuration (JSON)");
    if (needs_config) copt->required();
    cmd->add_option("--out", args.out_path, "output path ('-' = stdout)");
    cmd->add_option("--format", args.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", args.seed, "override the config master seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--trials", args.trials, "override the config trial count");
}

sgn::ScenarioConfig load_config(const CommonArgs& args) {
    sgn::ScenarioConfig config = sgn::load_scenario_file(args.config_path);
    if (args.seed_set) config.master_seed = args.seed;
    if (args.trials > 0) config.n_trials = args.trials;
    config.validate();
    return config;
}

void write_text(const std::string& path, const std::string& payload) {
    if (path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sgn::config_error("cannot open output path '" + path + "'");
    out << payload;
}

std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_scenario(const CommonArgs& args, const sgn::ScenarioConfig& config,
                   const sgn::ScenarioReport& report) {
    if (args.out_path == "-") {
        if (args.format == "csv")
            std::cout << sgn::results_to_csv(config, report);
        else
            std::cout << sgn::results_to_json(config, report).dump(2) << "\n";
        return;
    }
    sgn::emit_results(config, report, args.format, args.out_path);
}

int run_psd(const CommonArgs& args, double w_max, std::size_t n_points) {
    const auto config = load_config(args);
    const double hi = w_max > 0.0 ? w_max : sgn::support_cutoff(config.psd, 1e-6);
    std::string payload = "omega,psd\n";
    for (std::size_t k = 0; k < n_points; ++k) {
        const double w = hi * double(k) / double(n_points - 1);
        payload += csv_number(w) + "," + csv_number(sgn::evaluate_psd(config.psd, w)) + "\n";
    }
    write_text(args.out_path, payload);
    return 0;
}

int run_synth(const CommonArgs& args, std::size_t n_traces) {
    const auto config = load_config(args);
    const double t_f = config.resolved_t_final();
    const double dt = config.resolved_dt();
    std::string payload = "t";
    for (std::size_t j = 0; j < n_traces; ++j) payload += ",trace_" + std::to_string(j);
    payload += "\n";
    std::vector<sgn::NoiseTrace> traces;
    traces.reserve(n_traces);
    for (std::size_t j = 0; j < n_traces; ++j)
        traces.push_back(sgn::synthesize(config.psd, t_f, dt,
                                         sgn::mix_seed(config.master_seed, j), config.synthesis));
    for (std::size_t k = 0; k < traces.front().samples.size(); ++k) {
        payload += csv_number(dt * double(k));
        for (const auto& trace : traces) payload += "," + csv_number(trace.samples[k]);
        payload += "\n";
    }
    write_text(args.out_path, payload);
    return 0;
}

int run_transfer(const CommonArgs& args, double w_max, bool closed_form) {
    const auto config = load_config(args);
    const sgn::PhysParams& p = config.params;
    const double hi = w_max > 0.0 ? w_max : 5.0 * p.omega0;
    std::string payload = "omega,transfer\n";
    if (closed_form) {
        const std::size_t n_points = 2000;
        for (std::size_t k = 0; k < n_points; ++k) {
            const double w = hi * double(k) / double(n_points - 1);
            payload +=
                csv_number(w) + "," + csv_number(sgn::transfer_closed_form_FN(p, w)) + "\n";
        }
    } else {
        const auto arms =
            sgn::ideal_trajectories(p, config.resolved_t_final(), p.period() / 256.0);
        const auto transfer = sgn::transfer_from_trajectories(arms.first, arms.second, hi);
        for (std::size_t j = 0; j < transfer.omegas.size(); ++j)
            payload += csv_number(transfer.omegas[j]) + "," + csv_number(transfer.values[j]) + "\n";
    }
    write_text(args.out_path, payload);
    return 0;
}

int run_trajectories(const CommonArgs& args) {
    const auto config = load_config(args);
    const auto arms = sgn::ideal_trajectories(config.params, config.resolved_t_final(),
                                              config.resolved_dt());
    std::string payload = "t,x_plus,v_plus,x_minus,v_minus\n";
    for (std::size_t k = 0; k < arms.first.size(); ++k)
        payload += csv_number(arms.first.times[k]) + "," + csv_number(arms.first.x[k]) + "," +
                   csv_number(arms.first.v[k]) + "," + csv_number(arms.second.x[k]) + "," +
                   csv_number(arms.second.v[k]) + "\n";
    write_text(args.out_path, payload);
    return 0;
}

int run_master(const CommonArgs& args, double half_width, std::size_t grid_points,
               std::size_t stride) {
    const auto config = load_config(args);
    const sgn::PhysParams& p = config.params;
    auto rho0 = sgn::coherent_density(p, {0.0, 0.0},
                                      sgn::make_position_grid(half_width, grid_points));
    std::string payload = "t,x1,x2,re_rho,im_rho\n";
    auto dump = [&payload, &rho0](double t, const sgn::PositionDensityMatrix& rho) {
        const std::size_t n = rho.grid.size();
        const std::size_t step = std::max<std::size_t>(1, n / 32);
        for (std::size_t i = 0; i < n; i += step)
            for (std::size_t j = 0; j < n; j += step)
                payload += csv_number(t) + "," + csv_number(rho.grid[i]) + "," +
                           csv_number(rho.grid[j]) + "," +
                           csv_number(rho.rho(long(i), long(j)).real()) + "," +
                           csv_number(rho.rho(long(i), long(j)).imag()) + "\n";
        (void)rho0;
    };
    sgn::MasterEvolveOptions opt;
    opt.snapshot_stride = stride;
    opt.observer = dump;
    const double dt = std::min(config.resolved_dt(), 0.01 / p.omega0);
    const auto rho_f = sgn::master_evolve(p, rho0, config.psd, config.resolved_t_final(), dt, opt);
    dump(config.resolved_t_final(), rho_f);
    write_text(args.out_path, payload);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stern-Gerlach interferometer noise and decoherence toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    double w_max = 0.0;
    std::size_t n_points = 512;
    std::size_t n_traces = 4;
    bool closed_form = false;
    double half_width = 5.6;
    std::size_t grid_points = 128;
    std::size_t stride = 0;
    std::vector<int> only_criteria;
    bool verbose = false;

    auto* psd_cmd = app.add_subcommand("psd", "tabulate the configured PSD");
    add_common(psd_cmd, args, true);
    psd_cmd->add_option("--w-max", w_max, "upper frequency (rad/s)");
    psd_cmd->add_option("--points", n_points, "number of grid points");

    auto* synth_cmd = app.add_subcommand("synth", "emit synthesized noise traces");
    add_common(synth_cmd, args, true);
    synth_cmd->add_option("--traces", n_traces, "number of traces");

    auto* transfer_cmd = app.add_subcommand("transfer", "emit the dephasing filter F(omega)");
    add_common(transfer_cmd, args, true);
    transfer_cmd->add_option("--w-max", w_max, "upper frequency (rad/s)");
    transfer_cmd->add_flag("--closed-form", closed_form, "use the closed form instead of the FFT");

    auto* traj_cmd = app.add_subcommand("trajectories", "emit the ideal arm trajectories");
    add_common(traj_cmd, args, true);

    auto* dephase_cmd = app.add_subcommand("dephase", "Monte Carlo dephasing scenario");
    add_common(dephase_cmd, args, true);
    auto* contrast_cmd = app.add_subcommand("contrast", "Monte Carlo contrast-loss scenario");
    add_common(contrast_cmd, args, true);
    auto* witness_cmd = app.add_subcommand("witness", "Monte Carlo witness scenario");
    add_common(witness_cmd, args, true);
    auto* quadratic_cmd = app.add_subcommand("quadratic", "Monte Carlo quadratic-noise scenario");
    add_common(quadratic_cmd, args, true);

    auto* master_cmd = app.add_subcommand("master", "master-equation evolution");
    add_common(master_cmd, args, true);
    master_cmd->add_option("--half-width", half_width, "grid half width (m)");
    master_cmd->add_option("--grid", grid_points, "grid points");
    master_cmd->add_option("--stride", stride, "snapshot stride in steps (0 = final only)");

    auto* validate_cmd = app.add_subcommand("validate", "run the full numerical invariant suite");
    add_common(validate_cmd, args, false);
    validate_cmd->add_option("--criterion", only_criteria, "restrict to specific criteria (1-12)");
    validate_cmd->add_flag("--verbose", verbose, "print detail lines for passing criteria too");

    CLI11_PARSE(app, argc, argv);

    try {
        if (psd_cmd->parsed()) return run_psd(args, w_max, n_points);
        if (synth_cmd->parsed()) return run_synth(args, n_traces);
        if (transfer_cmd->parsed()) return run_transfer(args, w_max, closed_form);
        if (traj_cmd->parsed()) return run_trajectories(args);
        if (master_cmd->parsed()) return run_master(args, half_width, grid_points, stride);
        if (validate_cmd->parsed()) {
            const auto results = sgn::validation::run_all(only_criteria);
            return sgn::validation::print_and_return_exit_code(results, std::cout, verbose);
        }
        // the Monte Carlo scenario commands share one code path; they differ
        // in which quantities the caller typically inspects
        const auto config = load_config(args);
        if (quadratic_cmd->parsed() && config.noise_kind != sgn::NoiseKind::quadratic)
            throw sgn::config_error("quadratic subcommand requires noise_kind = 'quadratic'");
        const auto report = sgn::run_any_scenario(config);
        emit_scenario(args, config, report);
        return 0;
    } catch (const sgn::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const sgn::grid_mismatch_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
