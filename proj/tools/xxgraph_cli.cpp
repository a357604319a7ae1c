// xxgraph command-line driver. Options come from an optional JSON config
// (--config) and are then overridden by flags.
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xxgraph/experiment.hpp"

namespace {

using namespace xxgraph;

struct Overrides {
    std::string config_path;
    std::optional<std::string> mode, target, guess, schedule, out;
    std::optional<int> sites, slices, restarts, max_iterations, samples, steps, c1, c2, workers;
    std::optional<double> duration, b0, sigma, coupling, t_min, t_max, field_sigma, delta_r, peak_floor;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> position_sigma;
    bool no_decay = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--mode", o.mode, "ideal | rydberg");
    cmd->add_option("--n", o.sites, "number of atoms");
    cmd->add_option("--t", o.duration, "evolution time (1/J or us)");
    cmd->add_option("--target", o.target, "literal | cz");
    cmd->add_option("--guess", o.guess, "gaussian | random");
    cmd->add_option("--b0", o.b0, "guess amplitude (rad/us, or units of J)");
    cmd->add_option("--sigma", o.sigma, "gaussian guess width (fraction of T)");
    cmd->add_option("--slices", o.slices, "number of time slices");
    cmd->add_option("--seed", o.seed, "guess / noise base seed");
    cmd->add_option("--restarts", o.restarts, "optimizer starting points");
    cmd->add_option("--max-iterations", o.max_iterations, "iteration cap per start");
    cmd->add_option("--coupling", o.coupling, "ideal-chain J");
    cmd->add_option("--workers", o.workers, "threads for ensembles");
    cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c;
    if (!o.config_path.empty()) {
        const nlohmann::json j = read_json_file(o.config_path);
        c = config_from_json(j);
        if (!j.contains("workers")) c.workers = worker_count();
    } else {
        c.workers = worker_count();
    }
    if (o.mode) c.mode = *o.mode;
    if (o.sites) c.sites = *o.sites;
    if (o.duration) c.duration = *o.duration;
    if (o.target) c.target = parse_target(*o.target);
    if (o.guess) c.guess.kind = parse_guess(*o.guess);
    if (o.b0) c.guess_amplitude = *o.b0;
    if (o.sigma) c.guess.sigma = *o.sigma;
    if (o.slices) c.guess.slices = *o.slices;
    if (o.seed) {
        c.guess.seed = *o.seed;
        c.noise.base_seed = *o.seed;
    }
    if (o.restarts) c.learning.restarts = *o.restarts;
    if (o.max_iterations) c.learning.max_iterations = *o.max_iterations;
    if (o.coupling) c.coupling = *o.coupling;
    if (o.workers) c.workers = *o.workers;
    if (o.out) c.output_dir = *o.out;
    if (o.schedule) c.schedule_path = *o.schedule;
    if (o.samples) c.noise.samples = *o.samples;
    if (o.field_sigma) c.noise.field_sigma = *o.field_sigma;
    if (o.delta_r) c.noise.delta_r_nm = *o.delta_r;
    if (o.position_sigma) {
        if (o.position_sigma->size() != 3) throw Error("--position-sigma takes three comma-separated values");
        c.noise.position_sigma_nm = {(*o.position_sigma)[0], (*o.position_sigma)[1], (*o.position_sigma)[2]};
    }
    if (o.t_min) c.scan.t_min = *o.t_min;
    if (o.t_max) c.scan.t_max = *o.t_max;
    if (o.steps) c.scan.steps = *o.steps;
    if (o.peak_floor) c.scan.peak_floor = *o.peak_floor;
    if (o.c1) c.analytic_c1 = *o.c1;
    if (o.c2) c.analytic_c2 = *o.c2;
    if (o.no_decay) c.decay = false;
    c.validate();
    return c;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// Resolved config plus wall-clock times; kept apart from the numeric files
// so those stay reproducible.
void add_manifest(ArtifactSet& out, const ExperimentConfig& c, const std::string& command, const std::string& started) {
    nlohmann::json m = {{"command", command}, {"config", to_json(c)}, {"started_at", started}, {"finished_at", utc_now()}};
    provenance(c).stamp(m);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : out.files()) files.push_back(f.first);
    m["files"] = files;
    out.add("manifest.json", m.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complete-graph-state preparation in XX spin chains"};
    app.require_subcommand(1);
    Overrides o;
    int table = 0;

    auto* opt = app.add_subcommand("optimize", "GRAPE optimization of B(t)");
    add_common(opt, o);

    auto* tab = app.add_subcommand("table", "reproduce a summary table (1, 2 or 3)");
    add_common(tab, o);
    tab->add_option("which", table, "table number")->required()->check(CLI::Range(1, 3));

    auto* noise = app.add_subcommand("noise", "disorder ensemble on a fixed schedule");
    add_common(noise, o);
    noise->add_option("--schedule", o.schedule, "schedule JSON (optimized if absent)");
    noise->add_option("--position-sigma", o.position_sigma, "x,y,z standard deviation in nm")->delimiter(',');
    noise->add_option("--field-sigma", o.field_sigma, "per-slice field noise (rad/us)");
    noise->add_option("--samples", o.samples, "ensemble size");
    noise->add_option("--delta-r", o.delta_r, "deterministic spacing change (nm)");

    auto* scan = app.add_subcommand("scan-t", "optimum population versus evolution time");
    add_common(scan, o);
    scan->add_option("--t-min", o.t_min);
    scan->add_option("--t-max", o.t_max);
    scan->add_option("--steps", o.steps, "grid points (default spacing 1e-3)");
    scan->add_option("--peak-floor", o.peak_floor);

    auto* master = app.add_subcommand("master", "Lindblad evolution with spontaneous decay");
    add_common(master, o);
    master->add_option("--schedule", o.schedule, "schedule JSON (optimized if absent)");
    master->add_flag("--no-decay", o.no_decay, "drop the jump operators");

    auto* analytic = app.add_subcommand("analytic", "constant-field three-atom solution");
    add_common(analytic, o);
    analytic->add_option("--c1", o.c1);
    analytic->add_option("--c2", o.c2);

    auto* protocol = app.add_subcommand("protocol", "staged preparation and read-out mapping");
    add_common(protocol, o);
    protocol->add_option("--schedule", o.schedule, "schedule JSON (optimized if absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string started = utc_now();
        const ExperimentConfig c = resolve(o);
        ArtifactSet out(c.output_dir);
        std::string command;
        if (opt->parsed()) {
            command = "optimize";
            const auto r = cmd_optimize(c, out);
            std::printf("final population %.6f  iterations %d  converged %s\n", r.result.final_population,
                        r.result.iterations, r.result.converged ? "yes" : "no");
        } else if (tab->parsed()) {
            command = "table " + std::to_string(table);
            std::cout << cmd_table(table, c, out).text();
        } else if (noise->parsed()) {
            command = "noise";
            const auto e = cmd_noise(c, out);
            std::printf("mean final population %.6f  std %.6f  (%d samples)\n", e.mean_final, e.std_final, c.noise.samples);
        } else if (scan->parsed()) {
            command = "scan-t";
            const auto s = cmd_scan_t(c, out);
            for (auto i : s.peaks) std::printf("peak T = %.4f  population %.6f\n", s.durations[i], s.populations[i]);
        } else if (master->parsed()) {
            command = "master";
            const auto m = cmd_master(c, out);
            std::printf("closed %.6f  open %.6f  delta %.6f\n", m.closed, m.open, m.closed - m.open);
        } else if (analytic->parsed()) {
            command = "analytic";
            const auto a = cmd_analytic(c, out);
            std::printf("B = %.10f  t* = %.10f  population %.12f (propagated %.12f)\n", a.solution.field,
                        a.solution.t_star, a.closed_form_population, a.propagated_population);
        } else if (protocol->parsed()) {
            command = "protocol";
            const auto r = cmd_protocol(c, out);
            std::printf("psi1 %.5f  psi2 %.5f  psi3 %.5f  psi4 %.5f  total %.5f us\n", r.boundary_population(0),
                        r.boundary_population(1), r.boundary_population(2), r.boundary_population(3), r.total_duration);
        }
        add_manifest(out, c, command, started);
        for (const auto& path : out.commit()) std::fprintf(stderr, "wrote %s\n", path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
