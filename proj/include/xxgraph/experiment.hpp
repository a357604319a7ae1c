#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xxgraph/analytic.hpp"
#include "xxgraph/dynamics/ensemble.hpp"
#include "xxgraph/dynamics/master.hpp"
#include "xxgraph/grape.hpp"
#include "xxgraph/persistence.hpp"
#include "xxgraph/protocol.hpp"

namespace xxgraph {

inline constexpr std::string_view kToolVersion = "xxgraph 0.1.0";

struct ScanSettings {
    double t_min = 0.05;
    double t_max = 0.75;
    int steps = 0;  // 0: one point per 1e-3 time units
    double peak_floor = 0.9;

    int resolved_steps() const {
        if (steps > 0) return steps;
        return static_cast<int>(std::lround((t_max - t_min) / 1e-3)) + 1;
    }
};

/// Everything a command needs. Loaded from a JSON file, then overridden by
/// command-line flags.
struct ExperimentConfig {
    std::string mode = "ideal";  // "ideal" | "rydberg"
    int sites = 3;
    double coupling = 1.0;       // ideal mode J
    TargetForm target = TargetForm::LiteralEq1;
    GuessSpec guess;
    std::optional<double> guess_amplitude;  // default: J (ideal), 2π×1 MHz (rydberg)
    LearningSpec learning;
    std::optional<double> duration;
    ScanSettings scan;
    NoiseSpec noise;
    bool decay = true;
    int analytic_c1 = 0;
    int analytic_c2 = 0;
    std::string schedule_path;
    std::string output_dir = "out";
    PhysicalConstants constants;
    int workers = 1;

    bool rydberg() const { return mode == "rydberg"; }

    ModelKind model() const {
        if (rydberg()) return RydbergModel{ChainGeometry::regular(sites, constants)};
        return IdealModel{coupling};
    }

    GuessSpec resolved_guess() const {
        GuessSpec g = guess;
        g.amplitude = guess_amplitude.value_or(rydberg() ? constants.guess_amplitude : coupling);
        return g;
    }

    void validate() const {
        if (mode != "ideal" && mode != "rydberg") throw Error("mode must be 'ideal' or 'rydberg'");
        if (sites < 2 || sites > 7) throw Error("N must lie in [2, 7]");
        if (!(scan.t_max > scan.t_min) || !(scan.t_min > 0.0)) throw Error("scan range must satisfy 0 < t_min < t_max");
        if (workers < 1) throw Error("workers must be >= 1");
        if (duration && !(*duration > 0.0)) throw Error("T must be positive");
        learning.validate();
        noise.validate();
    }
};

inline std::string target_name(TargetForm f) { return f == TargetForm::LiteralEq1 ? "literal" : "cz"; }

inline TargetForm parse_target(const std::string& s) {
    if (s == "literal") return TargetForm::LiteralEq1;
    if (s == "cz") return TargetForm::CzCircuit;
    throw Error("target must be 'literal' or 'cz', got '" + s + "'");
}

inline GuessKind parse_guess(const std::string& s) {
    if (s == "gaussian") return GuessKind::Gaussian;
    if (s == "random") return GuessKind::Random;
    throw Error("guess must be 'gaussian' or 'random', got '" + s + "'");
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["mode"] = c.mode;
    j["N"] = c.sites;
    j["coupling"] = c.coupling;
    j["target"] = target_name(c.target);
    j["guess"] = {{"type", c.guess.kind == GuessKind::Gaussian ? "gaussian" : "random"},
                  {"sigma", c.guess.sigma},
                  {"seed", c.guess.seed},
                  {"slices", c.guess.slices}};
    if (c.guess_amplitude) j["guess"]["b0"] = *c.guess_amplitude;
    j["learning"] = {{"initial_rate", c.learning.initial_rate}, {"backtrack", c.learning.backtrack},
                     {"growth", c.learning.growth},             {"min_rate", c.learning.min_rate},
                     {"max_iterations", c.learning.max_iterations}, {"tolerance", c.learning.tolerance},
                     {"patience", c.learning.patience},         {"restarts", c.learning.restarts}};
    if (c.duration) j["T"] = *c.duration;
    j["scan"] = {{"t_min", c.scan.t_min}, {"t_max", c.scan.t_max}, {"steps", c.scan.steps}, {"peak_floor", c.scan.peak_floor}};
    j["noise"] = {{"position_sigma_nm", c.noise.position_sigma_nm},
                  {"field_sigma", c.noise.field_sigma},
                  {"samples", c.noise.samples},
                  {"base_seed", c.noise.base_seed}};
    if (c.noise.delta_r_nm) j["noise"]["delta_r_nm"] = *c.noise.delta_r_nm;
    j["decay"] = c.decay;
    j["analytic"] = {{"c1", c.analytic_c1}, {"c2", c.analytic_c2}};
    j["schedule"] = c.schedule_path;
    j["output_dir"] = c.output_dir;
    const auto& k = c.constants;
    j["constants"] = {{"c3", k.c3},
                      {"c6_up", k.c6_up},
                      {"c6_down", k.c6_down},
                      {"spacing", k.spacing},
                      {"lifetime_up", k.lifetime_up},
                      {"lifetime_down", k.lifetime_down},
                      {"rabi_two_photon", k.rabi_two_photon},
                      {"rabi_mw_a", k.rabi_mw_a},
                      {"rabi_mw_b", k.rabi_mw_b},
                      {"guess_amplitude", k.guess_amplitude}};
    return j;
}

/// Reads a config document; unknown keys are rejected so typos surface.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"mode",  "N",     "coupling", "target",   "guess",
                                                   "learning", "T",  "scan",     "noise",    "decay",
                                                   "analytic", "schedule", "output_dir", "constants", "workers"};
    if (!j.is_object()) throw Error("config: top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw Error("config: unknown key '" + key + "'");
    }
    ExperimentConfig c;
    try {
        c.mode = j.value("mode", c.mode);
        c.sites = j.value("N", c.sites);
        c.coupling = j.value("coupling", c.coupling);
        if (j.contains("target")) c.target = parse_target(j["target"].get<std::string>());
        if (j.contains("guess")) {
            const auto& g = j["guess"];
            if (g.contains("type")) c.guess.kind = parse_guess(g["type"].get<std::string>());
            c.guess.sigma = g.value("sigma", c.guess.sigma);
            c.guess.seed = g.value("seed", c.guess.seed);
            c.guess.slices = g.value("slices", c.guess.slices);
            if (g.contains("b0")) c.guess_amplitude = g["b0"].get<double>();
        }
        if (j.contains("learning")) {
            const auto& l = j["learning"];
            c.learning.initial_rate = l.value("initial_rate", c.learning.initial_rate);
            c.learning.backtrack = l.value("backtrack", c.learning.backtrack);
            c.learning.growth = l.value("growth", c.learning.growth);
            c.learning.min_rate = l.value("min_rate", c.learning.min_rate);
            c.learning.max_iterations = l.value("max_iterations", c.learning.max_iterations);
            c.learning.tolerance = l.value("tolerance", c.learning.tolerance);
            c.learning.patience = l.value("patience", c.learning.patience);
            c.learning.restarts = l.value("restarts", c.learning.restarts);
        }
        if (j.contains("T")) c.duration = j["T"].get<double>();
        if (j.contains("scan")) {
            const auto& s = j["scan"];
            c.scan.t_min = s.value("t_min", c.scan.t_min);
            c.scan.t_max = s.value("t_max", c.scan.t_max);
            c.scan.steps = s.value("steps", c.scan.steps);
            c.scan.peak_floor = s.value("peak_floor", c.scan.peak_floor);
        }
        if (j.contains("noise")) {
            const auto& n = j["noise"];
            if (n.contains("position_sigma_nm")) c.noise.position_sigma_nm = n["position_sigma_nm"].get<std::array<double, 3>>();
            c.noise.field_sigma = n.value("field_sigma", c.noise.field_sigma);
            c.noise.samples = n.value("samples", c.noise.samples);
            c.noise.base_seed = n.value("base_seed", c.noise.base_seed);
            if (n.contains("delta_r_nm")) c.noise.delta_r_nm = n["delta_r_nm"].get<double>();
        }
        c.decay = j.value("decay", c.decay);
        if (j.contains("analytic")) {
            c.analytic_c1 = j["analytic"].value("c1", c.analytic_c1);
            c.analytic_c2 = j["analytic"].value("c2", c.analytic_c2);
        }
        c.schedule_path = j.value("schedule", c.schedule_path);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.workers = j.value("workers", c.workers);
        if (j.contains("constants")) {
            const auto& k = j["constants"];
            auto& p = c.constants;
            p.c3 = k.value("c3", p.c3);
            p.c6_up = k.value("c6_up", p.c6_up);
            p.c6_down = k.value("c6_down", p.c6_down);
            p.spacing = k.value("spacing", p.spacing);
            p.lifetime_up = k.value("lifetime_up", p.lifetime_up);
            p.lifetime_down = k.value("lifetime_down", p.lifetime_down);
            p.rabi_two_photon = k.value("rabi_two_photon", p.rabi_two_photon);
            p.rabi_mw_a = k.value("rabi_mw_a", p.rabi_mw_a);
            p.rabi_mw_b = k.value("rabi_mw_b", p.rabi_mw_b);
            p.guess_amplitude = k.value("guess_amplitude", p.guess_amplitude);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Durations used throughout for each chain length.
inline double table1_duration(int sites) {
    switch (sites) {
        case 3: return 2.3;
        case 4: return 2.808;
        case 5: return 3.386;
        case 6: return 3.952;
        default: throw Error("no tabulated ideal duration for N = " + std::to_string(sites));
    }
}

inline double table2_duration(int sites) {
    switch (sites) {
        case 3: return 0.141;
        case 4: return 0.172;
        case 5: return 0.203;
        case 6: return 0.233;
        default: throw Error("no tabulated Rydberg duration for N = " + std::to_string(sites));
    }
}

inline double resolved_duration(const ExperimentConfig& c) {
    if (c.duration) return *c.duration;
    return c.rydberg() ? table2_duration(c.sites) : table1_duration(c.sites);
}

inline GrapeConfig grape_config(const ExperimentConfig& c) {
    GrapeConfig g;
    g.model = c.model();
    g.sites = c.sites;
    g.duration = resolved_duration(c);
    g.target = c.target;
    g.guess = c.resolved_guess();
    g.learning = c.learning;
    return g;
}

/// Provenance stamped into every artifact.
struct Provenance {
    std::string config_hash;
    std::string constants_version{kConstantsVersion};
    std::string tool_version{kToolVersion};

    std::string csv_header() const {
        return "# config_hash=" + config_hash + " constants_version=" + constants_version + " tool=" + tool_version + "\n";
    }
    void stamp(nlohmann::json& j) const {
        j["config_hash"] = config_hash;
        j["constants_version"] = constants_version;
        j["tool_version"] = tool_version;
    }
};

/// Hash of everything that affects results; where the files go does not.
inline std::string experiment_hash(const ExperimentConfig& c) {
    nlohmann::json j = to_json(c);
    j.erase("output_dir");
    return config_hash(j);
}

inline Provenance provenance(const ExperimentConfig& c) { return {experiment_hash(c)}; }

/// Collects artifacts in memory and writes them only once a command has
/// finished, so failures leave no partial output.
class ArtifactSet {
public:
    explicit ArtifactSet(std::string dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

    std::vector<std::string> commit() const {
        std::filesystem::create_directories(dir_);
        std::vector<std::string> paths;
        for (const auto& [name, contents] : files_) {
            const std::string path = (std::filesystem::path(dir_) / name).string();
            write_text_file(path, contents);
            paths.push_back(path);
        }
        return paths;
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline std::string fmt(double v, int digits = 17) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

// ---------------------------------------------------------------- commands

struct OptimizeOutcome {
    GrapeResult result;
    ScheduleRecord record;
};

inline OptimizeOutcome run_optimize(const ExperimentConfig& c) {
    const GrapeResult r = optimize(grape_config(c), plus_product_state(c.sites, 1.0));
    return {r, make_record(c.mode, c.sites, r)};
}

inline OptimizeOutcome cmd_optimize(const ExperimentConfig& c, ArtifactSet& out) {
    OptimizeOutcome o = run_optimize(c);
    const Provenance p = provenance(c);
    nlohmann::json j = to_json(o.record);
    p.stamp(j);
    j["iterations"] = o.result.iterations;
    j["converged"] = o.result.converged;
    j["start_index"] = o.result.start_index;
    out.add("schedule.json", j.dump(2) + "\n");
    std::string csv = p.csv_header() + "iteration,phi\n";
    for (std::size_t i = 0; i < o.result.phi_history.size(); ++i) csv += std::to_string(i) + "," + fmt(o.result.phi_history[i]) + "\n";
    out.add("convergence.csv", csv);
    return o;
}

/// Schedule from `schedule_path` when given, otherwise optimized on demand.
inline ControlSchedule schedule_for(const ExperimentConfig& c) {
    if (!c.schedule_path.empty()) {
        const ScheduleRecord r = schedule_record_from_json(read_json_file(c.schedule_path));
        if (r.sites != c.sites || r.mode != c.mode) throw Error("schedule file does not match the configured mode/N");
        return r.schedule;
    }
    return run_optimize(c).result.schedule;
}

inline EnsembleResult cmd_noise(const ExperimentConfig& c, ArtifactSet& out) {
    const ControlSchedule s = schedule_for(c);
    const EnsembleResult e = ensemble_average(c.model(), s, c.noise, plus_product_state(c.sites, 1.0),
                                              graph_target(c.sites, c.target), c.workers);
    const Provenance p = provenance(c);
    std::string csv = p.csv_header() + "time,mean,min,max";
    for (std::size_t k = 0; k < e.traces.size(); ++k) csv += ",sample" + std::to_string(k);
    csv += "\n";
    for (std::size_t t = 0; t < e.times.size(); ++t) {
        csv += fmt(e.times[t]) + "," + fmt(e.mean[t]) + "," + fmt(e.min[t]) + "," + fmt(e.max[t]);
        for (const auto& tr : e.traces) csv += "," + fmt(tr[t]);
        csv += "\n";
    }
    out.add("ensemble.csv", csv);
    nlohmann::json j = {{"mean_final", e.mean_final}, {"std_final", e.std_final}, {"samples", c.noise.samples}, {"seeds", e.seeds}};
    p.stamp(j);
    out.add("ensemble.json", j.dump(2) + "\n");
    return e;
}

inline DurationScan cmd_scan_t(const ExperimentConfig& c, ArtifactSet& out) {
    const DurationScan scan = scan_duration(grape_config(c), plus_product_state(c.sites, 1.0), c.scan.t_min, c.scan.t_max,
                                            c.scan.resolved_steps(), c.scan.peak_floor);
    const Provenance p = provenance(c);
    std::string csv = p.csv_header() + "T,population\n";
    for (std::size_t i = 0; i < scan.durations.size(); ++i) csv += fmt(scan.durations[i]) + "," + fmt(scan.populations[i]) + "\n";
    out.add("scan_t.csv", csv);
    nlohmann::json peaks = nlohmann::json::array();
    for (auto i : scan.peaks) peaks.push_back({{"T", scan.durations[i]}, {"population", scan.populations[i]}});
    nlohmann::json j = {{"peaks", peaks}};
    p.stamp(j);
    out.add("peaks.json", j.dump(2) + "\n");
    return scan;
}

struct MasterOutcome {
    double closed = 0.0;
    double open = 0.0;
    MasterResult trace;
};

inline MasterOutcome run_master(const ExperimentConfig& c, const ControlSchedule& s,
                                CheckpointValidation checkpoints = CheckpointValidation::All) {
    const ModelKind model = c.model();
    const StateVector psi0 = plus_product_state(c.sites, 1.0);
    const StateVector target = graph_target(c.sites, c.target);
    MasterOutcome o;
    o.closed = ControlProblem(assemble_system(model, c.sites), psi0, target).landscape(s);
    JumpChannels jumps = c.decay ? JumpChannels::rydberg_default(c.constants) : JumpChannels::none();
    o.trace = evolve_master(model, s, jumps, DensityMatrix::pure(lift_to_ground_basis(psi0, c.sites)),
                            lift_to_ground_basis(target, c.sites), {.checkpoints = checkpoints});
    o.open = o.trace.populations.back();
    return o;
}

inline MasterOutcome cmd_master(const ExperimentConfig& c, ArtifactSet& out) {
    const MasterOutcome o = run_master(c, schedule_for(c), CheckpointValidation::Final);
    const Provenance p = provenance(c);
    std::string csv = p.csv_header() + "time,population\n";
    for (std::size_t i = 0; i < o.trace.times.size(); ++i) csv += fmt(o.trace.times[i]) + "," + fmt(o.trace.populations[i]) + "\n";
    out.add("master.csv", csv);
    nlohmann::json j = {{"closed_population", o.closed},
                        {"open_population", o.open},
                        {"delta", o.closed - o.open},
                        {"substeps_per_slice", o.trace.substeps_per_slice},
                        {"convergence_delta", o.trace.convergence_delta}};
    p.stamp(j);
    out.add("master.json", j.dump(2) + "\n");
    return o;
}

struct AnalyticOutcome {
    ConstantFieldSolution solution;
    double closed_form_population = 0.0;
    double propagated_population = 0.0;
};

inline AnalyticOutcome cmd_analytic(const ExperimentConfig& c, ArtifactSet& out) {
    AnalyticOutcome o;
    o.solution = constant_field_params(c.analytic_c1, c.analytic_c2, c.coupling);
    o.closed_form_population = analytic_k3_population(c.coupling, o.solution.field, o.solution.t_star);
    const StateVector psi = evolve_unitary(constant_field_hamiltonian(c.coupling, o.solution.field), o.solution.t_star,
                                           plus_product_state(3, 1.0));
    o.propagated_population = population(psi, complete_graph_state(3));
    const Provenance p = provenance(c);
    nlohmann::json j = {{"c1", o.solution.c1},
                        {"c2", o.solution.c2},
                        {"J", c.coupling},
                        {"B", o.solution.field},
                        {"t_star", o.solution.t_star},
                        {"closed_form_population", o.closed_form_population},
                        {"propagated_population", o.propagated_population}};
    p.stamp(j);
    out.add("analytic.json", j.dump(2) + "\n");

    // (B, t) map around the solution family.
    std::vector<double> fields, times;
    for (int i = 0; i <= 120; ++i) fields.push_back(-12.0 * c.coupling + 24.0 * c.coupling * i / 120);
    for (int i = 0; i <= 120; ++i) times.push_back(4.0 / c.coupling * i / 120);
    const ConstantFieldScan scan = scan_constant_field(c.coupling, fields, times);
    std::string csv = p.csv_header() + "B,t,population\n";
    for (std::size_t a = 0; a < fields.size(); ++a) {
        for (std::size_t b = 0; b < times.size(); ++b) {
            csv += fmt(fields[a]) + "," + fmt(times[b]) + "," +
                   fmt(scan.population(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))) + "\n";
        }
    }
    out.add("analytic_grid.csv", csv);
    return o;
}

inline ProtocolResult cmd_protocol(const ExperimentConfig& c, ArtifactSet& out) {
    if (!c.rydberg()) throw Error("protocol requires --mode rydberg");
    const ControlSchedule s = schedule_for(c);
    const ProtocolResult r = run_full_protocol(ProtocolPlan::standard(ChainGeometry::regular(c.sites, c.constants), s, c.constants));
    const Provenance p = provenance(c);
    std::string csv = p.csv_header() + "time,psi1,psi2,psi3,psi4,stage\n";
    for (const auto& row : r.timeline) {
        csv += fmt(row.time) + "," + fmt(row.populations[0]) + "," + fmt(row.populations[1]) + "," +
               fmt(row.populations[2]) + "," + fmt(row.populations[3]) + "," + row.stage + "\n";
    }
    out.add("protocol.csv", csv);
    nlohmann::json j = {{"total_duration", r.total_duration},
                        {"psi1", r.boundary_population(0)},
                        {"psi2", r.boundary_population(1)},
                        {"psi3", r.boundary_population(2)},
                        {"psi4", r.boundary_population(3)}};
    p.stamp(j);
    out.add("protocol.json", j.dump(2) + "\n");
    return r;
}

// ------------------------------------------------------------------ tables

struct TableRow {
    int sites = 0;
    std::vector<double> values;
};

struct Table {
    std::string title;
    std::vector<std::string> columns;
    std::vector<TableRow> rows;

    std::string text() const {
        std::ostringstream os;
        os << title << "\n" << std::left << std::setw(8) << "N";
        for (const auto& c : columns) os << std::setw(16) << c;
        os << "\n";
        for (const auto& r : rows) {
            os << std::setw(8) << r.sites;
            for (double v : r.values) os << std::setw(16) << std::fixed << std::setprecision(4) << v;
            os << "\n";
        }
        return os.str();
    }

    std::string csv(const Provenance& p) const {
        std::string out = p.csv_header() + "N";
        for (const auto& c : columns) out += "," + c;
        out += "\n";
        for (const auto& r : rows) {
            out += std::to_string(r.sites);
            for (double v : r.values) out += "," + fmt(v);
            out += "\n";
        }
        return out;
    }
};

/// Closed-system population for mode/N at the tabulated duration.
inline double tabulated_population(ExperimentConfig c, int sites, GuessKind kind) {
    c.sites = sites;
    c.duration.reset();
    c.guess.kind = kind;
    c.guess.slices = 0;
    return run_optimize(c).result.final_population;
}

inline Table table_one(const ExperimentConfig& base) {
    ExperimentConfig c = base;
    c.mode = "ideal";
    c.coupling = 1.0;
    c.guess_amplitude.reset();
    Table t{"Ideal XX chain (time in units of 1/J)", {"J*T", "P(gaussian)", "P(random)"}, {}};
    for (int n = 3; n <= 6; ++n) {
        t.rows.push_back({n, {table1_duration(n), tabulated_population(c, n, GuessKind::Gaussian),
                              tabulated_population(c, n, GuessKind::Random)}});
    }
    return t;
}

inline Table table_two(const ExperimentConfig& base) {
    ExperimentConfig c = base;
    c.mode = "rydberg";
    c.guess_amplitude.reset();
    Table t{"Rydberg chain, theta = 0 (time in us)", {"T", "P(gaussian)", "P(random)"}, {}};
    for (int n = 3; n <= 6; ++n) {
        t.rows.push_back({n, {table2_duration(n), tabulated_population(c, n, GuessKind::Gaussian),
                              tabulated_population(c, n, GuessKind::Random)}});
    }
    return t;
}

struct ErrorBudget {
    int sites = 0;
    double closed = 0.0;
    double preparation = 0.0;  // N = 3 staged-protocol loss, shared by every row
    double dissipation = 0.0;
    double vibration = 0.0;    // closed minus mean population at δr = ±100 nm
    double estimate() const { return closed - preparation - dissipation - vibration; }
};

inline double population_with_offset(const ExperimentConfig& c, const ControlSchedule& s, double delta_r_nm) {
    NoiseSpec spec;
    spec.delta_r_nm = delta_r_nm;
    ChainGeometry g = sample_geometry_noise(ChainGeometry::regular(c.sites, c.constants), spec, 0);
    return ControlProblem(assemble_system(RydbergModel{g}, c.sites), plus_product_state(c.sites, 1.0),
                          graph_target(c.sites, c.target))
        .landscape(s);
}

inline std::vector<ErrorBudget> error_budget(const ExperimentConfig& base) {
    ExperimentConfig c = base;
    c.mode = "rydberg";
    c.guess_amplitude.reset();
    c.guess.kind = GuessKind::Gaussian;
    c.guess.slices = 0;
    c.duration.reset();

    c.sites = 3;
    const OptimizeOutcome three = run_optimize(c);
    const ProtocolResult staged = run_full_protocol(
        ProtocolPlan::standard(ChainGeometry::regular(3, c.constants), three.result.schedule, c.constants), false);
    const double preparation = three.result.final_population - staged.boundary_population(3);

    std::vector<ErrorBudget> rows;
    for (int n = 3; n <= 6; ++n) {
        c.sites = n;
        const OptimizeOutcome o = run_optimize(c);
        ErrorBudget b;
        b.sites = n;
        b.closed = o.result.final_population;
        b.preparation = preparation;
        const MasterOutcome m = run_master(c, o.result.schedule, CheckpointValidation::Final);
        b.dissipation = m.closed - m.open;
        b.vibration = b.closed - 0.5 * (population_with_offset(c, o.result.schedule, -100.0) +
                                        population_with_offset(c, o.result.schedule, 100.0));
        rows.push_back(b);
    }
    return rows;
}

inline Table table_three(const ExperimentConfig& base) {
    Table t{"Error budget (Rydberg chain)", {"closed", "prep+decouple", "decay", "vibration", "P_estimate"}, {}};
    for (const auto& b : error_budget(base)) {
        t.rows.push_back({b.sites, {b.closed, b.preparation, b.dissipation, b.vibration, b.estimate()}});
    }
    return t;
}

inline Table cmd_table(int which, const ExperimentConfig& c, ArtifactSet& out) {
    Table t;
    switch (which) {
        case 1: t = table_one(c); break;
        case 2: t = table_two(c); break;
        case 3: t = table_three(c); break;
        default: throw Error("table must be 1, 2 or 3");
    }
    const Provenance p = provenance(c);
    out.add("table" + std::to_string(which) + ".txt", t.text());
    out.add("table" + std::to_string(which) + ".csv", t.csv(p));
    return t;
}

}  // namespace xxgraph
