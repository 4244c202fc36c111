#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "breakfront/bounds.hpp"
#include "breakfront/estimate.hpp"
#include "breakfront/frontier.hpp"
#include "breakfront/inference.hpp"
#include "breakfront/manifest.hpp"
#include "breakfront/model.hpp"
#include "breakfront/oracle.hpp"
#include "breakfront/simulate.hpp"
#include "json.hpp"

namespace bf = breakfront;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "breakfront 0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Grids are written grid(lo,hi,n); a plain number is a one-point grid.
std::vector<double> parse_grid(const std::string& spec) {
    if (spec.rfind("grid(", 0) == 0 && spec.back() == ')') {
        const std::string body = spec.substr(5, spec.size() - 6);
        double lo = 0.0, hi = 0.0;
        long n = 0;
        char extra = 0;
        if (std::sscanf(body.c_str(), "%lf , %lf , %ld %c", &lo, &hi, &n, &extra) != 3 ||
            n < 1) {
            throw bf::usage_error("bad grid spec '" + spec + "'; expected grid(lo,hi,n)");
        }
        return bf::linspace_grid(lo, hi, static_cast<size_t>(n));
    }
    try {
        size_t pos = 0;
        const double v = std::stod(spec, &pos);
        if (pos != spec.size()) throw std::invalid_argument(spec);
        return {v};
    } catch (const std::exception&) {
        throw bf::usage_error("bad grid spec '" + spec + "'; expected a number or grid(lo,hi,n)");
    }
}

struct OutputCollector {
    std::vector<std::pair<std::string, std::string>> digests;

    void write(const std::string& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw bf::usage_error("cannot write '" + path + "'");
        out << content;
        out.close();
        digests.emplace_back(path, bf::sha256_hex(content));
    }
};

struct ManifestWriter {
    std::string command;
    std::vector<std::string> argv;
    ordered_json params = ordered_json::object();
    uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void add_input(const std::string& path) {
        inputs.emplace_back(path, bf::sha256_file_hex(path));
    }

    void finish(const OutputCollector& outputs, const std::string& path) {
        bf::RunManifest m;
        m.command = command;
        m.argv = argv;
        m.params_json = params.dump();
        m.seed = seed;
        m.version = kVersion;
        m.input_digests = inputs;
        m.output_digests = outputs.digests;
        m.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw bf::usage_error("cannot write manifest '" + path + "'");
        out << m.to_json() << "\n";
    }
};

struct DataInput {
    std::string dist_path;
    std::string csv_path;
    bf::CsvSpec csv;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dist", dist_path, "observed distribution JSON");
        cmd->add_option("--input", csv_path, "micro-data CSV");
        cmd->add_option("--y", csv.y_column, "outcome column name")->capture_default_str();
        cmd->add_option("--d", csv.d_column, "treatment column name")->capture_default_str();
        cmd->add_option("--z", csv.z_column, "assignment column name")->capture_default_str();
        cmd->add_option("--covariates", csv.covariate_columns,
                        "covariate column names (comma separated)")
            ->delimiter(',');
    }

    bool has_data() const { return !csv_path.empty(); }

    bf::Dataset load_data() const { return bf::load_csv_dataset(csv_path, csv); }

    bf::ObservedDistribution load(ManifestWriter& manifest, bool drop_thin) const {
        if (!dist_path.empty() && !csv_path.empty()) {
            throw bf::usage_error("give either --dist or --input, not both");
        }
        if (!dist_path.empty()) {
            manifest.add_input(dist_path);
            return bf::validate(bf::load_distribution(dist_path));
        }
        if (!csv_path.empty()) {
            manifest.add_input(csv_path);
            const auto report = bf::estimate_cells_report(
                load_data(),
                drop_thin ? bf::empty_arm_policy::drop : bf::empty_arm_policy::abort);
            if (!report.dropped_cells.empty()) {
                std::cerr << "dropped " << report.dropped_cells.size() << " thin cell(s), mass "
                          << report.dropped_mass << "\n";
            }
            return bf::validate(report.dist);
        }
        throw bf::usage_error("one of --dist or --input is required");
    }
};

bf::target_param parse_target_or_throw(const std::string& name) {
    if (name == "itt") return bf::target_param::itt;
    if (name == "late") return bf::target_param::late;
    throw bf::usage_error("frontier target must be itt or late");
}

int run_bounds(const DataInput& input, const std::string& target, const std::string& c_spec,
               const std::string& pi_spec, const std::string& out_prefix, bool drop_thin,
               const std::vector<std::string>& argv) {
    ManifestWriter manifest;
    manifest.command = "bounds";
    manifest.argv = argv;
    const bf::ObservedDistribution dist = input.load(manifest, drop_thin);
    const std::vector<double> cs = parse_grid(c_spec);
    const std::vector<double> pis = parse_grid(pi_spec);

    manifest.params = {{"target", target}, {"c", c_spec}, {"pi", pi_spec}};

    std::ostringstream csv;
    csv << "c,pi,lo,hi\n";
    for (double c : cs) {
        for (double pi : pis) {
            const bf::SensitivityPoint s{c, pi};
            bf::validate_sensitivity(s);
            bf::Interval iv;
            if (target == "itt") {
                iv = bf::itt_bounds(dist, s);
            } else if (target == "late") {
                iv = bf::late_bounds(dist, s);
            } else if (target == "ate") {
                iv = bf::ate_bounds(dist, s);
            } else if (target == "pi-co") {
                iv = bf::complier_share_bounds(dist, s);
            } else {
                throw bf::usage_error("target must be one of itt, late, ate, pi-co");
            }
            csv << fmt(c) << ',' << fmt(pi) << ',' << fmt(iv.lo) << ',' << fmt(iv.hi) << "\n";
        }
    }

    OutputCollector outputs;
    outputs.write(out_prefix + ".csv", csv.str());
    manifest.finish(outputs, out_prefix + ".manifest.json");
    std::cout << "wrote " << out_prefix << ".csv (" << cs.size() * pis.size() << " rows)\n";
    return 0;
}

int run_frontier(const DataInput& input, const std::string& target, double mu,
                 const std::string& grid_spec, bool band, const bf::InferenceConfig& inf,
                 const std::string& regime, const std::string& out_prefix, bool drop_thin,
                 const std::vector<std::string>& argv) {
    ManifestWriter manifest;
    manifest.command = "frontier";
    manifest.argv = argv;
    manifest.seed = inf.seed;

    const bf::FrontierQuery q{parse_target_or_throw(target), mu};
    const std::vector<double> grid = parse_grid(grid_spec);
    const bool sharp_regime = regime == "sharp";
    if (!sharp_regime && regime != "free") {
        throw bf::usage_error("--regime must be sharp or free");
    }

    manifest.params = {{"target", target},   {"mu", mu},
                       {"grid", grid_spec},  {"band", band},
                       {"regime", regime},   {"B", inf.B},
                       {"alpha", inf.alpha}, {"eps_scale", inf.eps_scale},
                       {"jobs", inf.jobs}};

    bf::FrontierCurve curve;
    if (band) {
        if (!input.has_data()) {
            throw bf::usage_error("--band needs micro-data (--input); a bootstrap cannot "
                                  "resample a distribution file");
        }
        manifest.add_input(input.csv_path);
        const bf::Dataset data = input.load_data();
        // Regime check against the estimated cells before the band loop.
        bf::breakdown_frontier(bf::estimate_cells(data), grid, q, sharp_regime);
        const bf::BandResult result = bf::uniform_lower_band(data, grid, q, inf);
        curve = result.curve;
        std::cout << "z_hat = " << result.z_hat << " (clamped draws "
                  << result.diag.clamped_draws << ")\n";
    } else {
        const bf::ObservedDistribution dist = input.load(manifest, drop_thin);
        curve = bf::breakdown_frontier(dist, grid, q, sharp_regime);
    }

    OutputCollector outputs;
    outputs.write(out_prefix + ".csv", bf::frontier_to_csv(curve));
    outputs.write(out_prefix + ".json", bf::frontier_to_json(curve) + "\n");
    manifest.finish(outputs, out_prefix + ".manifest.json");
    std::cout << "BF(" << fmt(grid.front()) << ") = " << fmt(curve.values.front()) << ", BF("
              << fmt(grid.back()) << ") = " << fmt(curve.values.back()) << "\n";
    return 0;
}

int run_calibrate(const DataInput& input, const std::vector<std::string>& pivots,
                  const std::string& out_prefix, const std::vector<std::string>& argv) {
    ManifestWriter manifest;
    manifest.command = "calibrate";
    manifest.argv = argv;
    if (!input.has_data()) throw bf::usage_error("calibrate needs --input micro-data");
    manifest.add_input(input.csv_path);
    const bf::Dataset data = input.load_data();

    ordered_json results = ordered_json::object();
    for (const std::string& pivot : pivots) {
        size_t k = input.csv.covariate_columns.size();
        for (size_t i = 0; i < input.csv.covariate_columns.size(); ++i) {
            if (input.csv.covariate_columns[i] == pivot) k = i;
        }
        if (k == input.csv.covariate_columns.size()) {
            throw bf::usage_error("pivot '" + pivot + "' is not a covariate column");
        }
        const bf::CalibrationResult r = bf::calibrate_c(data, k);
        ordered_json jr;
        jr["c_bar"] = r.c_bar;
        jr["strata_used"] = r.strata_used;
        jr["strata_skipped"] = r.strata_skipped;
        jr["constant_column"] = r.constant_column;
        results[pivot] = jr;
        std::cout << "c_bar[" << pivot << "] = " << fmt(r.c_bar) << " (strata used "
                  << r.strata_used << ", skipped " << r.strata_skipped << ")";
        if (r.constant_column) std::cout << "  [warning: column is constant]";
        std::cout << "\n";
    }

    manifest.params = {{"pivots", pivots}};
    OutputCollector outputs;
    outputs.write(out_prefix + ".json", results.dump(2) + "\n");
    manifest.finish(outputs, out_prefix + ".manifest.json");
    return 0;
}

int run_simulate(bf::McConfig cfg, bool paper_scale, const std::string& grid_spec,
                 const std::string& target, double mu, const std::string& out_prefix,
                 const std::vector<std::string>& argv) {
    ManifestWriter manifest;
    manifest.command = "simulate";
    manifest.argv = argv;
    manifest.seed = cfg.seed;

    if (paper_scale) {
        const bf::McConfig full = bf::McConfig::paper_scale();
        cfg.N = full.N;
        cfg.reps = full.reps;
        cfg.inf.B = full.inf.B;
        cfg.grid = full.grid;
    } else if (!grid_spec.empty()) {
        cfg.grid = parse_grid(grid_spec);
    }
    cfg.q = bf::FrontierQuery{parse_target_or_throw(target), mu};

    manifest.params = {{"N", cfg.N},
                       {"reps", cfg.reps},
                       {"B", cfg.inf.B},
                       {"alpha", cfg.inf.alpha},
                       {"eps_scale", cfg.inf.eps_scale},
                       {"target", target},
                       {"mu", mu},
                       {"paper_scale", paper_scale},
                       {"bands", cfg.with_bands},
                       {"exact_pipeline", cfg.exact_pipeline},
                       {"jobs", cfg.jobs}};

    const bf::McReport report = bf::monte_carlo_study(cfg);
    OutputCollector outputs;
    outputs.write(out_prefix + ".csv", bf::mc_report_to_csv(report));
    outputs.write(out_prefix + ".json", bf::mc_report_to_json(report) + "\n");
    manifest.finish(outputs, out_prefix + ".manifest.json");
    std::cout << "max |bias| = " << fmt(report.max_abs_bias());
    if (report.coverage >= 0.0) std::cout << ", coverage = " << fmt(report.coverage);
    std::cout << "\n";
    return 0;
}

int run_oracle(const std::string& dist_path, double c, double pi, const std::string& target,
               int y, int d, int z, long conformance, uint64_t seed, bool witness,
               const std::string& out_prefix, const std::vector<std::string>& argv) {
    ManifestWriter manifest;
    manifest.command = "oracle";
    manifest.argv = argv;
    manifest.seed = seed;
    OutputCollector outputs;

    if (conformance > 0) {
        manifest.params = {{"conformance", conformance}, {"seed", seed}};
        const bf::ConformanceReport report =
            bf::run_conformance(static_cast<size_t>(conformance), seed);
        std::ostringstream csv;
        csv << "case,c,pi,target,verdict,lp_lo,lp_hi,closed_lo,closed_hi\n";
        for (const auto& cc : report.cases) {
            csv << cc.id << ',' << fmt(cc.s.c) << ',' << fmt(cc.s.pi_def) << ',' << cc.target
                << ',' << cc.verdict << ',' << fmt(cc.lp.lo) << ',' << fmt(cc.lp.hi) << ','
                << fmt(cc.closed.lo) << ',' << fmt(cc.closed.hi) << "\n";
        }
        outputs.write(out_prefix + ".csv", csv.str());
        ordered_json summary;
        summary["cells"] = report.cells;
        summary["feasible_cells"] = report.feasible_cells;
        summary["containment_violations"] = report.containment_violations;
        summary["equality_violations"] = report.equality_violations;
        outputs.write(out_prefix + ".json", summary.dump(2) + "\n");
        manifest.finish(outputs, out_prefix + ".manifest.json");
        std::cout << "conformance: " << report.feasible_cells << "/" << report.cells
                  << " feasible, " << report.containment_violations
                  << " containment violations, " << report.equality_violations
                  << " equality shortfalls at flagged-sharp cases\n";
        return report.containment_violations == 0 ? 0 : 4;
    }

    if (dist_path.empty()) throw bf::usage_error("oracle needs --dist or --conformance");
    manifest.add_input(dist_path);
    const bf::ObservedDistribution dist = bf::validate(bf::load_distribution(dist_path));
    const bf::SensitivityPoint s{c, pi};
    bf::validate_sensitivity(s);

    std::vector<bf::LpTarget> targets;
    if (target == "joint") {
        targets.push_back(bf::LpTarget::joint(y, d, z));
    } else if (target == "marginal-y") {
        targets.push_back(bf::LpTarget::marginal_y(y, z));
    } else if (target == "marginal-d") {
        targets.push_back(bf::LpTarget::marginal_d(d, z));
    } else if (target == "itt") {
        targets.push_back(bf::LpTarget::itt());
    } else if (target == "ate") {
        targets.push_back(bf::LpTarget::ate());
    } else if (target == "late") {
        targets.push_back(bf::LpTarget::late());
    } else {
        throw bf::usage_error("oracle target must be joint, marginal-y, marginal-d, itt, ate "
                              "or late");
    }

    manifest.params = {{"c", c}, {"pi", pi}, {"target", target},
                       {"y", y}, {"d", d},   {"z", z}};

    std::ostringstream csv;
    csv << "cell,target,verdict,lp_lo,lp_hi,closed_lo,closed_hi\n";
    if (witness) {
        ordered_json witnesses = ordered_json::object();
        for (const auto& [key, cell] : dist.cells) {
            const auto model = bf::feasibility_check(cell, s);
            witnesses[key] = model ? nlohmann::ordered_json::parse(
                                         bf::latent_model_to_json(*model))
                                   : ordered_json();
        }
        outputs.write(out_prefix + ".witness.json", witnesses.dump(2) + "\n");
    }
    for (const auto& [key, cell] : dist.cells) {
        for (const auto& t : targets) {
            const bf::Interval closed = bf::closed_form_bounds(cell, s, t);
            std::string verdict;
            bf::Interval lp{0.0, 0.0};
            try {
                lp = bf::sharp_bounds_lp(cell, s, t);
                const bool contained = closed.contains(lp, 1e-7);
                const bool equal = std::fabs(lp.lo - closed.lo) <= 1e-7 &&
                                   std::fabs(lp.hi - closed.hi) <= 1e-7;
                verdict = !contained ? "violation" : (equal ? "sharp" : "contained");
            } catch (const bf::error& e) {
                if (e.code() != "Infeasible") throw;
                verdict = "infeasible";
            }
            csv << key << ',' << t.name() << ',' << verdict << ',' << fmt(lp.lo) << ','
                << fmt(lp.hi) << ',' << fmt(closed.lo) << ',' << fmt(closed.hi) << "\n";
            std::cout << key << " " << t.name() << ": " << verdict << "\n";
        }
    }
    outputs.write(out_prefix + ".csv", csv.str());
    manifest.finish(outputs, out_prefix + ".manifest.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> raw_argv(argv, argv + argc);
    if (!raw_argv.empty()) raw_argv[0] = "breakfront";

    CLI::App app{"identified sets and breakdown frontiers for binary-instrument designs"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags like --jobs may follow the subcommand
    app.set_version_flag("--version", kVersion);

    int jobs = 1;
    if (const char* env = std::getenv("BREAKFRONT_JOBS")) {
        jobs = std::max(1, std::atoi(env));
    }
    app.add_option("--jobs", jobs, "worker budget for parallel loops")
        ->capture_default_str();

    // bounds
    auto* cmd_bounds = app.add_subcommand("bounds", "identified sets over a (c, pi) grid");
    DataInput bounds_input;
    bounds_input.attach(cmd_bounds);
    std::string bounds_target = "late";
    std::string bounds_c = "0";
    std::string bounds_pi = "0";
    std::string bounds_out = "bounds";
    bool bounds_drop_thin = false;
    cmd_bounds->add_option("--target", bounds_target, "itt | late | ate | pi-co")
        ->capture_default_str();
    cmd_bounds->add_option("--c", bounds_c, "c value or grid(lo,hi,n)")->capture_default_str();
    cmd_bounds->add_option("--pi", bounds_pi, "pi_def value or grid(lo,hi,n)")
        ->capture_default_str();
    cmd_bounds->add_option("--out", bounds_out, "output prefix")->capture_default_str();
    cmd_bounds->add_flag("--drop-thin-cells", bounds_drop_thin,
                         "drop cells that lose an arm in-sample");

    // frontier
    auto* cmd_frontier = app.add_subcommand("frontier", "breakdown frontier over a c grid");
    DataInput frontier_input;
    frontier_input.attach(cmd_frontier);
    std::string frontier_target = "late";
    double frontier_mu = 0.0;
    std::string frontier_grid = "grid(0,0.15,100)";
    std::string frontier_regime = "sharp";
    std::string frontier_out = "frontier";
    bool frontier_band = false;
    bool frontier_drop_thin = false;
    bf::InferenceConfig frontier_inf;
    cmd_frontier->add_option("--target", frontier_target, "itt | late")->capture_default_str();
    cmd_frontier->add_option("--mu", frontier_mu, "conclusion threshold")
        ->capture_default_str();
    cmd_frontier->add_option("--grid", frontier_grid, "c grid")->capture_default_str();
    cmd_frontier->add_flag("--band", frontier_band, "attach a bootstrap lower band");
    cmd_frontier->add_option("--B", frontier_inf.B, "bootstrap draws")->capture_default_str();
    cmd_frontier->add_option("--alpha", frontier_inf.alpha, "band level")
        ->capture_default_str();
    cmd_frontier->add_option("--eps-scale", frontier_inf.eps_scale,
                             "eps_N = eps-scale / sqrt(N)")
        ->capture_default_str();
    cmd_frontier->add_option("--seed", frontier_inf.seed, "bootstrap seed")
        ->capture_default_str();
    std::string frontier_sigma = "one";
    cmd_frontier->add_option("--sigma", frontier_sigma, "sigma mode: one | bootstrap-sd")
        ->check(CLI::IsMember({"one", "bootstrap-sd"}))
        ->capture_default_str();
    cmd_frontier->add_option("--regime", frontier_regime, "sharp | free")
        ->capture_default_str();
    cmd_frontier->add_option("--out", frontier_out, "output prefix")->capture_default_str();
    cmd_frontier->add_flag("--drop-thin-cells", frontier_drop_thin,
                           "drop cells that lose an arm in-sample");

    // calibrate
    auto* cmd_calibrate =
        app.add_subcommand("calibrate", "selection-on-observables calibration statistic");
    DataInput calibrate_input;
    calibrate_input.attach(cmd_calibrate);
    std::vector<std::string> calibrate_pivots;
    std::string calibrate_out = "calibrate";
    cmd_calibrate->add_option("--pivot", calibrate_pivots, "covariate column(s) to probe")
        ->delimiter(',')
        ->required();
    cmd_calibrate->add_option("--out", calibrate_out, "output prefix")->capture_default_str();

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo study on the benchmark DGP");
    bf::McConfig mc;
    bool mc_paper_scale = false;
    std::string mc_grid;
    std::string mc_target = "late";
    double mc_mu = 0.0;
    std::string mc_out = "simulate";
    cmd_simulate->add_option("--N", mc.N, "sample size")->capture_default_str();
    cmd_simulate->add_option("--reps", mc.reps, "replications")->capture_default_str();
    cmd_simulate->add_option("--B", mc.inf.B, "bootstrap draws per replication")
        ->capture_default_str();
    cmd_simulate->add_option("--alpha", mc.inf.alpha, "band level")->capture_default_str();
    cmd_simulate->add_option("--eps-scale", mc.inf.eps_scale, "eps_N = eps-scale / sqrt(N)")
        ->capture_default_str();
    cmd_simulate->add_option("--grid", mc_grid, "c grid (default grid(0,0.15,100))");
    cmd_simulate->add_option("--target", mc_target, "itt | late")->capture_default_str();
    cmd_simulate->add_option("--mu", mc_mu, "conclusion threshold")->capture_default_str();
    cmd_simulate->add_option("--seed", mc.seed, "master seed")->capture_default_str();
    cmd_simulate->add_flag("--paper-scale", mc_paper_scale, "reps=500, B=999 overnight profile");
    bool mc_no_bands = false;
    cmd_simulate->add_flag("--no-bands", mc_no_bands, "skip the bootstrap bands (bias only)");
    cmd_simulate->add_flag("--self-test", mc.exact_pipeline,
                           "replace estimation by the exact DGP (pipeline check)");
    cmd_simulate->add_flag("--dump-reps", mc.dump_reps, "keep per-rep frontier estimates");
    cmd_simulate->add_option("--out", mc_out, "output prefix")->capture_default_str();

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "LP sharp bounds vs closed forms");
    std::string oracle_dist;
    double oracle_c = 0.0;
    double oracle_pi = 0.0;
    std::string oracle_target = "late";
    int oracle_y = 1, oracle_d = 1, oracle_z = 1;
    long oracle_conformance = 0;
    uint64_t oracle_seed = 0;
    std::string oracle_out = "oracle";
    cmd_oracle->add_option("--dist", oracle_dist, "observed distribution JSON");
    cmd_oracle->add_option("--c", oracle_c, "c value")->capture_default_str();
    cmd_oracle->add_option("--pi", oracle_pi, "pi_def value")->capture_default_str();
    cmd_oracle->add_option("--target", oracle_target,
                           "joint | marginal-y | marginal-d | itt | ate | late")
        ->capture_default_str();
    cmd_oracle->add_option("--y", oracle_y, "outcome index for joint/marginal targets")
        ->capture_default_str();
    cmd_oracle->add_option("--d", oracle_d, "treatment index for joint/marginal targets")
        ->capture_default_str();
    cmd_oracle->add_option("--z", oracle_z, "assignment index for joint/marginal targets")
        ->capture_default_str();
    cmd_oracle->add_option("--conformance", oracle_conformance,
                           "run the random-cell conformance sweep with this many cells");
    bool oracle_witness = false;
    cmd_oracle->add_flag("--witness", oracle_witness,
                         "also write a feasibility witness model per cell");
    cmd_oracle->add_option("--seed", oracle_seed, "sweep seed")->capture_default_str();
    cmd_oracle->add_option("--out", oracle_out, "output prefix")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (cmd_bounds->parsed()) {
            return run_bounds(bounds_input, bounds_target, bounds_c, bounds_pi, bounds_out,
                              bounds_drop_thin, raw_argv);
        }
        if (cmd_frontier->parsed()) {
            frontier_inf.jobs = jobs;
            frontier_inf.sigma = frontier_sigma == "one" ? bf::sigma_mode::constant_one
                                                         : bf::sigma_mode::bootstrap_sd;
            return run_frontier(frontier_input, frontier_target, frontier_mu, frontier_grid,
                                frontier_band, frontier_inf, frontier_regime, frontier_out,
                                frontier_drop_thin, raw_argv);
        }
        if (cmd_calibrate->parsed()) {
            return run_calibrate(calibrate_input, calibrate_pivots, calibrate_out, raw_argv);
        }
        if (cmd_simulate->parsed()) {
            mc.jobs = jobs;
            mc.with_bands = !mc_no_bands;
            return run_simulate(mc, mc_paper_scale, mc_grid, mc_target, mc_mu, mc_out,
                                raw_argv);
        }
        if (cmd_oracle->parsed()) {
            return run_oracle(oracle_dist, oracle_c, oracle_pi, oracle_target, oracle_y,
                              oracle_d, oracle_z, oracle_conformance, oracle_seed,
                              oracle_witness, oracle_out, raw_argv);
        }
    } catch (const bf::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case bf::errc::usage:
                return 2;
            case bf::errc::validation:
                return 3;
            case bf::errc::numeric:
                return 4;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
