#ifndef TIMEBIN_TOOLS_CLI_HPP
#define TIMEBIN_TOOLS_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <timebin/timebin.hpp>

namespace timebin::cli {

enum ExitCode { ok = 0, usage = 1, verification_failed = 2, data_failure = 3 };

enum class Format { human, json, csv };

// ---------------------------------------------------------------------------
// Config file

/// Top-level JSON config: experiment, settings, plan, analysis, output.
struct RunConfig {
    ExperimentConfig experiment;
    bool seed_in_file = false;
    std::optional<ChainedSettings> settings;
    int n = 3;
    Functional functional = Functional::chsh;
    double run_duration = 3.0;
    double stabilization_gap = 1.0;
    std::optional<analysis::CoincidenceWindow> window;
    std::string output_directory = "timetags";
    std::string output_format = "ttb1";

    ChainedSettings chained_settings() const { return settings ? *settings : optimal_chained_settings(n); }
};

inline std::vector<Phase> phases_from_json(const nlohmann::json& j, const char* what)
{
    if (!j.is_array()) throw invalid_argument(std::string("settings.") + what + " must be an array of radians");
    std::vector<Phase> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw invalid_argument(std::string("settings.") + what + " entries must be numbers");
        out.emplace_back(v.get<double>());
    }
    return out;
}

inline RunConfig run_config_from_json(const nlohmann::json& j)
{
    using detail::read_if_present;
    using detail::reject_unknown_keys;
    reject_unknown_keys(j, {"experiment", "settings", "plan", "analysis", "output"}, "config");
    RunConfig c;
    if (j.contains("experiment")) {
        c.experiment = experiment_config_from_json(j.at("experiment"));
        c.seed_in_file = j.at("experiment").contains("seed");
    }
    if (j.contains("settings")) {
        const auto& s = j.at("settings");
        reject_unknown_keys(s, {"n", "alice", "bob"}, "settings");
        read_if_present(s, "n", c.n);
        if (s.contains("alice") || s.contains("bob")) {
            if (!s.contains("alice") || !s.contains("bob"))
                throw invalid_argument("settings needs both 'alice' and 'bob' phase lists");
            c.settings.emplace(phases_from_json(s.at("alice"), "alice"), phases_from_json(s.at("bob"), "bob"));
            if (s.contains("n") && c.n != c.settings->n())
                throw invalid_argument("settings.n disagrees with the phase list length");
            c.n = c.settings->n();
        }
        if (c.n < 2) throw invalid_argument("settings.n must be >= 2");
    }
    if (j.contains("plan")) {
        const auto& p = j.at("plan");
        reject_unknown_keys(p, {"functional", "run_duration", "stabilization_gap"}, "plan");
        if (p.contains("functional")) c.functional = functional_from_string(p.at("functional").get<std::string>());
        read_if_present(p, "run_duration", c.run_duration);
        read_if_present(p, "stabilization_gap", c.stabilization_gap);
        if (!(c.run_duration > 0)) throw invalid_argument("plan.run_duration must be positive");
        if (!(c.stabilization_gap >= 0)) throw invalid_argument("plan.stabilization_gap must be >= 0");
    }
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        reject_unknown_keys(a, {"center_offset", "half_width"}, "analysis");
        analysis::CoincidenceWindow w{0, c.experiment.coincidence_half_width};
        read_if_present(a, "center_offset", w.center_offset);
        read_if_present(a, "half_width", w.half_width);
        if (w.half_width < 0) throw invalid_argument("analysis.half_width must be >= 0");
        c.window = w;
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown_keys(o, {"directory", "format"}, "output");
        read_if_present(o, "directory", c.output_directory);
        read_if_present(o, "format", c.output_format);
        if (c.output_format != "ttb1" && c.output_format != "csv")
            throw invalid_argument("output.format must be 'ttb1' or 'csv'");
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path)
{
    if (path.empty()) return {};
    std::ifstream is(path);
    if (!is) throw invalid_argument("cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument("config " + path + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Output helpers

inline std::string fixed(double v, int digits = 4)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    Format format = Format::human;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
};

/// Seed precedence: --seed, then the config file, then fresh entropy (printed).
inline std::uint64_t resolve_seed(Context& ctx, RunConfig& rc)
{
    if (ctx.seed) rc.experiment.seed = *ctx.seed;
    else if (!rc.seed_in_file) {
        std::random_device rd;
        rc.experiment.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        ctx.err << "seed: " << rc.experiment.seed << " (no --seed given)\n";
    }
    return rc.experiment.seed;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_predict(Context& ctx, int n, double visibility)
{
    const Prediction p = predict(n, visibility);
    if (ctx.format == Format::json) {
        ctx.out << nlohmann::json{{"n", p.n},
                                  {"visibility", p.visibility},
                                  {"s_qm", p.s_qm},
                                  {"s_lhv", p.s_lhv},
                                  {"s_classical", p.s_classical},
                                  {"ch_interval", {p.ch_lhv.lower, p.ch_lhv.upper}},
                                  {"s_ch_qm", p.ch_qm},
                                  {"expected", p.expected},
                                  {"critical_visibility", p.critical_visibility},
                                  {"verdict", p.verdict()}}
                       .dump(2)
                << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "n,visibility,s_qm,s_lhv,ch_lower,ch_upper,s_ch_qm,expected,critical_visibility,verdict\n"
                << p.n << ',' << p.visibility << ',' << p.s_qm << ',' << p.s_lhv << ',' << p.ch_lhv.lower << ','
                << p.ch_lhv.upper << ',' << p.ch_qm << ',' << p.expected << ',' << p.critical_visibility << ','
                << p.verdict() << '\n';
    } else {
        ctx.out << "N = " << p.n << ", V = " << p.visibility << '\n'
                << "  S_QM                 " << fixed(p.s_qm) << '\n'
                << "  S_LHV (time-bin)     " << fixed(p.s_lhv, 0) << "   classical " << fixed(p.s_classical, 0) << '\n'
                << "  S_CH LHV interval    [" << p.ch_lhv.lower << ", " << p.ch_lhv.upper << "]   QM "
                << fixed(p.ch_qm) << '\n'
                << "  V * S_QM             " << fixed(p.expected) << '\n'
                << "  critical visibility  " << fixed(100 * p.critical_visibility, 2) << "%\n"
                << "  verdict              " << p.verdict() << '\n';
    }
    return ok;
}

inline int cmd_bounds(Context& ctx, int n, bool enumerate)
{
    const bell::Bounds b = bell::bounds(n);
    std::optional<double> enumerated;
    if (enumerate) enumerated = bell::verify_classical_bound_by_enumeration(n, ctx.threads);
    if (ctx.format == Format::json) {
        nlohmann::json j{{"n", n},
                         {"classical_chsh", b.classical_chsh},
                         {"timebin_chsh", b.timebin_chsh},
                         {"trivial_ee_chsh", b.trivial_ee_chsh},
                         {"ch_interval", {b.ch.lower, b.ch.upper}},
                         {"ch_ll_interval", {b.ch_ll.lower, b.ch_ll.upper}},
                         {"ch_ee_interval", {b.ch_ee.lower, b.ch_ee.upper}}};
        if (enumerated) j["enumerated_classical_chsh"] = *enumerated;
        ctx.out << j.dump(2) << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "n,classical_chsh,timebin_chsh,trivial_ee_chsh,ch_lower,ch_upper,ch_ll_lower,ch_ll_upper,"
                   "ch_ee_lower,ch_ee_upper"
                << (enumerated ? ",enumerated" : "") << '\n'
                << n << ',' << b.classical_chsh << ',' << b.timebin_chsh << ',' << b.trivial_ee_chsh << ','
                << b.ch.lower << ',' << b.ch.upper << ',' << b.ch_ll.lower << ',' << b.ch_ll.upper << ','
                << b.ch_ee.lower << ',' << b.ch_ee.upper;
        if (enumerated) ctx.out << ',' << *enumerated;
        ctx.out << '\n';
    } else {
        ctx.out << "N = " << n << '\n'
                << "  classical (static LL)  " << b.classical_chsh << '\n'
                << "  time-bin LHV           " << b.timebin_chsh << '\n'
                << "  trivial EE             " << b.trivial_ee_chsh << '\n'
                << "  S_CH                   [" << b.ch.lower << ", " << b.ch.upper << "]\n"
                << "  S_CH (LL)              [" << b.ch_ll.lower << ", " << b.ch_ll.upper << "]\n"
                << "  S_CH (EE)              [" << b.ch_ee.lower << ", " << b.ch_ee.upper << "]\n";
        if (enumerated) ctx.out << "  enumerated classical   " << *enumerated << '\n';
    }
    if (enumerated && *enumerated != b.classical_chsh) {
        ctx.err << "enumeration disagrees with the classical bound\n";
        return verification_failed;
    }
    return ok;
}

inline int cmd_lhv_verify(Context& ctx, int resolution, int grid, double tolerance)
{
    const LhvVerification v = verify_lhv(resolution, phase_grid(grid), tolerance, ctx.threads);
    if (ctx.format == Format::json) {
        ctx.out << nlohmann::json{{"resolution", v.resolution},
                                  {"grid_points", v.grid_points},
                                  {"tolerance", v.tolerance},
                                  {"max_deviation", v.max_deviation},
                                  {"max_early_late_cell", v.max_el_cell},
                                  {"worst", {v.worst_alice.value(), v.worst_bob.value()}},
                                  {"passed", v.passed()}}
                       .dump(2)
                << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "resolution,grid_points,tolerance,max_deviation,max_early_late_cell,passed\n"
                << v.resolution << ',' << v.grid_points << ',' << v.tolerance << ',' << v.max_deviation << ','
                << v.max_el_cell << ',' << (v.passed() ? "true" : "false") << '\n';
    } else {
        ctx.out << "LHV oracle vs quantum table, resolution " << v.resolution << ", " << v.grid_points
                << " phase pairs\n"
                << "  max cell deviation  " << std::scientific << std::setprecision(3) << v.max_deviation
                << std::defaultfloat << " (tolerance " << v.tolerance << ")\n"
                << "  E-L cells           " << v.max_el_cell << '\n'
                << "  " << (v.passed() ? "PASS" : "FAIL") << '\n';
    }
    if (!v.passed()) {
        ctx.err << "max deviation " << v.max_deviation << " exceeds tolerance " << v.tolerance << " at phases ("
                << v.worst_alice.value() << ", " << v.worst_bob.value()
                << "); increase --resolution for convergence\n";
        return verification_failed;
    }
    return ok;
}

inline int cmd_simulate(Context& ctx, RunConfig rc, const std::string& out_dir_override)
{
    const std::uint64_t seed = resolve_seed(ctx, rc);
    const std::string dir = out_dir_override.empty() ? rc.output_directory : out_dir_override;
    const ChainedSettings settings = rc.chained_settings();
    const RunPlan plan = build_run_plan(settings, rc.functional, rc.run_duration, rc.stabilization_gap);
    std::filesystem::create_directories(dir);

    nlohmann::json manifest{{"seed", seed},
                            {"n", settings.n()},
                            {"functional", to_string(rc.functional)},
                            {"experiment", to_json(rc.experiment)},
                            {"runs", nlohmann::json::array()}};
    std::size_t total = 0;
    for (std::size_t i = 0; i < plan.runs.size(); ++i) {
        const PlannedRun& r = plan.runs[i];
        TimetagStream s = sim::simulate_run(rc.experiment, r.alice_phase, r.bob_phase, r.duration, r.label, i,
                                            ctx.threads);
        s.header.start_time = plan.start_time(i);
        const std::string file = (std::filesystem::path(dir) / (r.label + "." + rc.output_format)).string();
        if (rc.output_format == "csv") {
            std::ofstream os(file);
            if (!os) throw data_error("cannot open " + file + " for writing");
            write_csv(os, s);
        } else {
            save_ttb1(file, s);
        }
        total += s.records.size();
        manifest["runs"].push_back({{"label", r.label},
                                    {"file", file},
                                    {"records", s.records.size()},
                                    {"generated_pairs", s.header.generated_pairs}});
    }
    manifest["total_records"] = total;
    if (ctx.format == Format::json) {
        ctx.out << manifest.dump(2) << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "# seed=" << seed << "\nlabel,file,records,generated_pairs\n";
        for (const auto& r : manifest["runs"])
            ctx.out << r["label"].get<std::string>() << ',' << r["file"].get<std::string>() << ',' << r["records"]
                    << ',' << r["generated_pairs"] << '\n';
    } else {
        ctx.out << "seed " << seed << ": wrote " << plan.runs.size() << " runs, " << total << " records to " << dir
                << '\n';
    }
    return ok;
}

inline std::vector<TimetagStream> load_streams(const std::vector<std::string>& files, unsigned threads)
{
    std::vector<TimetagStream> streams(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) { streams[i] = load_stream(files[i]); });
    return streams;
}

/// Largest setting index seen in the run labels.
inline int chain_length_from_labels(const std::vector<TimetagStream>& streams)
{
    int n = 0;
    for (const auto& s : streams)
        if (auto p = parse_run_label(s.header.label)) n = std::max({n, p->term.alice, p->term.bob, 2});
    if (n < 2) throw invalid_argument("cannot infer N from run labels; pass --n or a config settings section");
    return n;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path);
    if (!os) throw data_error("cannot open " + path.string() + " for writing");
    os << text;
}

inline void print_pipeline(Context& ctx, const analysis::PipelineResult& r, std::uint64_t seed,
                           std::uint64_t records, nlohmann::json extra = nlohmann::json::object())
{
    if (ctx.format == Format::json) {
        nlohmann::json j = to_json(r);
        j["seed"] = seed;
        j["records"] = records;
        for (auto& [k, v] : extra.items()) j[k] = v;
        ctx.out << j.dump(2) << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "# seed=" << seed << '\n' << analysis::table1_csv(r);
    } else {
        ctx.out << "N = " << r.n << ", seed " << seed << ", " << records << " records, window +-"
                << r.window.half_width << " bins\n";
        ctx.out << "  i   S_LHV      S_CH      err_S    violation\n";
        for (int i = 0; i < 4; ++i)
            ctx.out << "  " << i + 1 << std::setw(8) << r.ch[i].lhv_bound << std::setw(10) << fixed(r.ch[i].statistic, 3)
                    << std::setw(10) << fixed(r.ch[i].std_error, 3) << std::setw(9) << fixed(r.ch[i].violation_sigma, 2)
                    << " sigma\n";
        ctx.out << "  S_CHSH" << std::setw(4) << r.chsh.lhv_bound << std::setw(10) << fixed(r.chsh.statistic, 3)
                << std::setw(10) << fixed(r.chsh.std_error, 3) << std::setw(9) << fixed(r.chsh.violation_sigma, 2)
                << " sigma\n";
        ctx.out << "  (from correlations " << fixed(r.chsh_from_correlations) << ", 4 S_CH,1 + 2(N-1) = "
                << fixed(r.ch_identity) << ")\n";
        for (const auto& a : r.assumptions) ctx.out << "  assumes " << a << '\n';
    }
}

inline int cmd_analyze(Context& ctx, const RunConfig& rc, const std::vector<std::string>& files,
                       std::optional<int> n_override, std::optional<int> half_width, const std::string& tables_dir)
{
    const auto streams = load_streams(files, ctx.threads);
    std::optional<analysis::CoincidenceWindow> window = rc.window;
    if (half_width) window = analysis::CoincidenceWindow{window ? window->center_offset : 0, *half_width};
    std::optional<ChainedSettings> settings = rc.settings;
    if (!settings) settings = optimal_chained_settings(n_override ? *n_override : chain_length_from_labels(streams));
    const auto r = analysis::full_pipeline(streams, *settings, window, ctx.threads);

    std::uint64_t records = 0;
    for (const auto& s : streams) records += s.records.size();
    const std::uint64_t seed = streams.empty() ? 0 : streams.front().header.config.seed;

    if (!tables_dir.empty()) {
        std::filesystem::create_directories(tables_dir);
        const std::filesystem::path d(tables_dir);
        write_text(d / "table1.csv", "# seed=" + std::to_string(seed) + "\n" + analysis::table1_csv(r));
        for (const auto& s : streams) {
            const auto w = window.value_or(analysis::default_window(s));
            write_text(d / ("singles_" + s.header.label + ".csv"), analysis::singles_csv(analysis::singles_histogram(s)));
            write_text(d / ("delta_tau_" + s.header.label + ".csv"),
                       analysis::delta_tau_csv(analysis::count_coincidences(s, w)));
        }
    }
    print_pipeline(ctx, r, seed, records);
    return ok;
}

inline int cmd_reproduce(Context& ctx, RunConfig rc, int n, std::optional<double> visibility,
                         std::optional<double> duration)
{
    if (n < 3 || n > 5) throw invalid_argument("reproduce-table1 needs n in {3, 4, 5}");
    const std::uint64_t seed = resolve_seed(ctx, rc);
    if (visibility) rc.experiment.visibility = *visibility;
    rc.experiment.validate();
    const auto r = reproduce_table1(n, rc.experiment, duration.value_or(rc.run_duration), ctx.threads);
    print_pipeline(ctx, r.pipeline, seed, r.total_records,
                   {{"visibility", rc.experiment.visibility}, {"run_duration", r.run_duration}});
    return ok;
}

inline int cmd_fringe(Context& ctx, RunConfig rc, const std::vector<std::string>& files, int points, double duration,
                      double bob_phase, const std::string& scan_csv)
{
    analysis::FringeScan scan;
    std::uint64_t seed = 0;
    if (!files.empty()) {
        const auto streams = load_streams(files, ctx.threads);
        scan = analysis::fringe_scan_from_streams(streams, rc.window, ctx.threads);
        seed = streams.front().header.config.seed;
    } else {
        if (points < 4) throw invalid_argument("fringe scan needs --points >= 4");
        seed = resolve_seed(ctx, rc);
        std::vector<TimetagStream> streams;
        for (int i = 0; i < points; ++i)
            streams.push_back(sim::simulate_run(rc.experiment, Phase(two_pi * i / points), Phase(bob_phase), duration,
                                                "fringe_" + std::to_string(i), static_cast<std::uint64_t>(i),
                                                ctx.threads));
        scan = analysis::fringe_scan_from_streams(streams, rc.window, ctx.threads);
    }
    if (!scan_csv.empty()) write_text(scan_csv, analysis::fringe_csv(scan));
    const auto fit = analysis::fit_fringe(scan);
    if (ctx.format == Format::json) {
        ctx.out << nlohmann::json{{"seed", seed},
                                  {"points", scan.points.size()},
                                  {"visibility", fit.visibility},
                                  {"visibility_error", fit.visibility_error},
                                  {"phase_offset", fit.phase_offset},
                                  {"phase_offset_error", fit.phase_offset_error},
                                  {"amplitude", fit.amplitude},
                                  {"amplitude_error", fit.amplitude_error},
                                  {"contrast_visibility", fit.contrast_visibility},
                                  {"chi2", fit.chi2}}
                       .dump(2)
                << '\n';
    } else if (ctx.format == Format::csv) {
        ctx.out << "# seed=" << seed << "\n" << analysis::fringe_csv(scan);
    } else {
        ctx.out << "fringe fit over " << scan.points.size() << " points (seed " << seed << ")\n"
                << "  V     " << fixed(fit.visibility, 5) << " +- " << fixed(fit.visibility_error, 5) << '\n'
                << "  phi0  " << fixed(fit.phase_offset, 5) << " +- " << fixed(fit.phase_offset_error, 5) << '\n'
                << "  C0    " << fixed(fit.amplitude, 2) << " +- " << fixed(fit.amplitude_error, 2) << " per s\n"
                << "  chi2  " << fixed(fit.chi2, 2) << " for " << scan.points.size() - 3 << " dof\n";
    }
    return ok;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Time-bin entanglement chained Bell test toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format_name = "human";
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    app.add_option("--format", format_name, "Output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--seed", seed, "Random seed (random and printed when omitted)");
    app.add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();

    int n = 3;
    double visibility = 1.0;
    auto* predict_cmd = app.add_subcommand("predict", "Quantum predictions, bounds and violation verdict");
    predict_cmd->add_option("-n,--n", n, "Settings per side")->required();
    predict_cmd->add_option("-V,--visibility", visibility, "Two-photon visibility")->capture_default_str();

    bool enumerate = false;
    int bounds_n = 3;
    auto* bounds_cmd = app.add_subcommand("bounds", "LHV and classical bounds");
    bounds_cmd->add_option("-n,--n", bounds_n, "Settings per side")->required();
    bounds_cmd->add_flag("--enumerate", enumerate, "Check the classical bound over all deterministic strategies");

    int resolution = 1 << 16, grid = 5;
    double tolerance = 1e-6;
    auto* verify_cmd = app.add_subcommand("lhv-verify", "Check the LHV model reproduces the quantum table");
    verify_cmd->add_option("--resolution", resolution, "Theta quadrature points")->capture_default_str();
    verify_cmd->add_option("--grid", grid, "Phases per side on [0, 2pi)")->capture_default_str();
    verify_cmd->add_option("--tolerance", tolerance, "Max allowed cell deviation")->capture_default_str();

    std::string config_path, out_dir;
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate timetag files for a run plan");
    simulate_cmd->add_option("-c,--config", config_path, "JSON config")->check(CLI::ExistingFile);
    simulate_cmd->add_option("-o,--out", out_dir, "Output directory (overrides output.directory)");

    std::vector<std::string> files;
    std::optional<int> analyze_n, half_width;
    std::string tables_dir;
    auto* analyze_cmd = app.add_subcommand("analyze", "Bell analysis of timetag files");
    analyze_cmd->add_option("files", files, "TTB1 or CSV timetag files")->required();
    analyze_cmd->add_option("-c,--config", config_path, "JSON config")->check(CLI::ExistingFile);
    analyze_cmd->add_option("-n,--n", analyze_n, "Settings per side (optimal settings); default from labels");
    analyze_cmd->add_option("--half-width", half_width, "Coincidence half width in TDC bins");
    analyze_cmd->add_option("--tables", tables_dir, "Directory for results-table, singles and delta-tau CSV files");

    int rep_n = 5;
    std::optional<double> rep_visibility, rep_duration;
    auto* reproduce_cmd = app.add_subcommand("reproduce-table1", "Simulate and analyze a full chained Bell test");
    reproduce_cmd->add_option("-n,--n", rep_n, "Settings per side, 3..5")->capture_default_str();
    reproduce_cmd->add_option("-V,--visibility", rep_visibility, "Override the source visibility");
    reproduce_cmd->add_option("--duration", rep_duration, "Seconds per run");
    reproduce_cmd->add_option("-c,--config", config_path, "JSON config")->check(CLI::ExistingFile);

    int points = 36;
    double fringe_duration = 30.0, bob_phase = 0.0;
    std::string scan_csv;
    auto* fringe_cmd = app.add_subcommand("fringe", "Fringe visibility fit from a phase scan");
    fringe_cmd->add_option("files", files, "Timetag files of a scan; simulated when omitted");
    fringe_cmd->add_option("-c,--config", config_path, "JSON config")->check(CLI::ExistingFile);
    fringe_cmd->add_option("--points", points, "Simulated scan points")->capture_default_str();
    fringe_cmd->add_option("--duration", fringe_duration, "Seconds per simulated point")->capture_default_str();
    fringe_cmd->add_option("--bob-phase", bob_phase, "Bob's fixed phase in the simulated scan")->capture_default_str();
    fringe_cmd->add_option("--scan-csv", scan_csv, "Write the scan as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ok : usage;
    }

    Context ctx{out, err, Format::human, threads, seed};
    ctx.format = format_name == "json" ? Format::json : format_name == "csv" ? Format::csv : Format::human;
    try {
        if (predict_cmd->parsed()) return cmd_predict(ctx, n, visibility);
        if (bounds_cmd->parsed()) return cmd_bounds(ctx, bounds_n, enumerate);
        if (verify_cmd->parsed()) return cmd_lhv_verify(ctx, resolution, grid, tolerance);
        const RunConfig rc = load_run_config(config_path);
        if (simulate_cmd->parsed()) return cmd_simulate(ctx, rc, out_dir);
        if (analyze_cmd->parsed()) return cmd_analyze(ctx, rc, files, analyze_n, half_width, tables_dir);
        if (reproduce_cmd->parsed()) return cmd_reproduce(ctx, rc, rep_n, rep_visibility, rep_duration);
        if (fringe_cmd->parsed()) return cmd_fringe(ctx, rc, files, points, fringe_duration, bob_phase, scan_csv);
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const data_error& e) {
        err << "data error: " << e.what() << '\n';
        return data_failure;
    } catch (const degenerate_data& e) {
        err << "data error: " << e.what() << '\n';
        return data_failure;
    } catch (const fit_failure& e) {
        err << "fit failed: " << e.what() << " [" << e.diagnostics() << "]\n";
        return data_failure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return data_failure;
    }
    return usage;
}

} // namespace timebin::cli

#endif // TIMEBIN_TOOLS_CLI_HPP
