// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Usage: acceptance [path-to-breakfront-binary]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "breakfront/bounds.hpp"
#include "breakfront/estimate.hpp"
#include "breakfront/frontier.hpp"
#include "breakfront/inference.hpp"
#include "breakfront/manifest.hpp"
#include "breakfront/model.hpp"
#include "breakfront/oracle.hpp"
#include "breakfront/rng.hpp"
#include "breakfront/simulate.hpp"

namespace fs = std::filesystem;
using namespace breakfront;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int id, bool pass, double seconds, const std::string& details) {
    std::printf("%s criterion %d (%.2fs): %s\n", pass ? "PASS" : "FAIL", id, seconds,
                details.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---- criterion 1: point identification -------------------------------------
void criterion1() {
    Timer t;
    const ObservedDistribution dgp = validate(appendix_c_dgp(), true);
    const Interval itt = itt_bounds(dgp, {0.0, 0.0});
    const Interval late = late_bounds(dgp, {0.0, 0.0});
    const bool ok = std::fabs(itt.lo - 0.25) <= 1e-12 && std::fabs(itt.hi - 0.25) <= 1e-12 &&
                    std::fabs(late.lo - 0.5) <= 1e-12 && std::fabs(late.hi - 0.5) <= 1e-12;
    const double sec = t.seconds();
    report(1, ok && sec < 1.0, sec,
           "point identification at (c=0, pi=0): ITT = [" + fmt(itt.lo) + ", " + fmt(itt.hi) +
               "], LATE = [" + fmt(late.lo) + ", " + fmt(late.hi) + "]");
}

// ---- criterion 2: breakdown values ------------------------------------------
void criterion2() {
    Timer t;
    const ObservedDistribution dgp = validate(appendix_c_dgp(), true);
    const double bf0 = bf_value(dgp, 0.0, {target_param::late, 0.0});
    const double bf25 = bf_value(dgp, 0.0, {target_param::late, 0.25});
    const double root0 = breakdown_root(dgp, {target_param::late, 0.0}, 1e-9);
    const double root25 = breakdown_root(dgp, {target_param::late, 0.25}, 1e-9);
    const bool ok = std::fabs(bf0 - 0.25) <= 1e-10 && std::fabs(bf25 - 0.10) <= 1e-10 &&
                    std::fabs(root0 - 0.15) <= 1e-6 && std::fabs(root25 - 0.0632) <= 1e-3;
    const double sec = t.seconds();
    report(2, ok && sec < 1.0, sec,
           "BF(0|mu=0) = " + fmt(bf0) + ", BF(0|mu=0.25) = " + fmt(bf25) +
               ", roots = " + fmt(root0) + " / " + fmt(root25));
}

// ---- criterion 3: Corollary-1 reduction -------------------------------------
void criterion3() {
    Timer t;
    SplitMix64 rng(30003);
    size_t violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        // Cells drawn from latent monotone models, the class for which a
        // (0,0)-consistent DGP exists; arbitrary cells admit no model there.
        const ObservedCell cell = random_monotone_cell(rng);
        const Interval ate = ate_bounds_cell(cell, {0.0, 0.0});
        const Interval bp = balke_pearl_bounds(cell);
        const double gap = std::max(std::fabs(ate.lo - bp.lo), std::fabs(ate.hi - bp.hi));
        worst = std::max(worst, gap);
        if (gap > 1e-12) ++violations;
    }
    const double sec = t.seconds();
    report(3, violations == 0 && sec < 5.0, sec,
           "ATE(0,0) vs Balke-Pearl on 100 cells: " + std::to_string(violations) +
               " violations, worst gap " + fmt(worst));
}

// ---- criterion 4: oracle conformance ----------------------------------------
void criterion4() {
    Timer t;
    const ConformanceReport rep = run_conformance(200, 40004);
    std::map<std::string, size_t> eq_by_target;
    size_t sharp_ok = 0, sharp_expected = 0;
    for (const auto& cc : rep.cases) {
        if (!cc.feasible) continue;
        if (cc.sharp_expected) {
            ++sharp_expected;
            if (cc.equal) {
                ++sharp_ok;
            } else {
                eq_by_target[cc.target.substr(0, cc.target.find('('))] += 1;
            }
        }
    }
    const double sec = t.seconds();
    const bool pass_a = rep.containment_violations == 0;
    const bool pass_b = rep.equality_violations == 0;
    report(4, pass_a && pass_b && sec < 120.0, sec,
           "LP vs closed forms on 200 cells (" + std::to_string(rep.feasible_cells) +
               " feasible): containment " + std::to_string(rep.containment_violations) +
               " violations; flagged-sharp equality " + std::to_string(sharp_ok) + "/" +
               std::to_string(sharp_expected) + " cases equal");
    if (!pass_b) {
        std::printf("      equality shortfalls by target:");
        for (const auto& [name, n] : eq_by_target) std::printf(" %s=%zu", name.c_str(), n);
        std::printf(
            "\n      note: containment (the validity theorem) holds everywhere; the\n"
            "      stated sharpness conditions are provably insufficient for the\n"
            "      response-type polytope (defier outcome-mass caps and cross-event\n"
            "      coupling are missing from them), so exact equality at every\n"
            "      flagged case is unattainable. See the oracle tests and notes.\n");
    }
}

// ---- criterion 5: nesting property suite ------------------------------------
void criterion5() {
    Timer t;
    SplitMix64 rng(50005);
    size_t violations = 0;
    size_t late_guarded = 0;
    auto check = [&](bool ok) {
        if (!ok) ++violations;
    };

    for (int i = 0; i < 500; ++i) {
        const ObservedCell cell =
            (i % 3 == 0) ? random_interior_cell(rng) : random_monotone_cell(rng);
        ObservedDistribution dist;
        dist.cells.emplace("x", cell);

        double c1 = rng.uniform01(), c2 = rng.uniform01();
        if (c1 > c2) std::swap(c1, c2);
        double p1 = rng.uniform01() * 0.6, p2 = rng.uniform01() * 0.6;
        if (p1 > p2) std::swap(p1, p2);

        // Containment when c grows, at fixed pi.
        for (int z = 0; z < 2; ++z) {
            for (int y = 0; y < 2; ++y) {
                for (int d = 0; d < 2; ++d) {
                    check(joint_potential_bounds(cell, y, d, z, c2)
                              .contains(joint_potential_bounds(cell, y, d, z, c1), 1e-12));
                }
                check(marginal_outcome_bounds(cell, y, z, c2)
                          .contains(marginal_outcome_bounds(cell, y, z, c1), 1e-12));
                check(marginal_treatment_bounds(cell, y, z, c2)
                          .contains(marginal_treatment_bounds(cell, y, z, c1), 1e-12));
            }
        }
        const SensitivityPoint s11{c1, p1}, s21{c2, p1}, s12{c1, p2};
        check(itt_bounds(dist, s21).contains(itt_bounds(dist, s11), 1e-12));
        check(complier_share_bounds(dist, s21)
                  .contains(complier_share_bounds(dist, s11), 1e-12));
        check(ate_bounds(dist, s21).contains(ate_bounds(dist, s11), 1e-12));
        if (complier_share_bounds(dist, s11).hi >= p1) {
            check(late_bounds(dist, s21).contains(late_bounds(dist, s11), 1e-12));
        } else {
            ++late_guarded;  // identified set empty at the smaller c
        }

        // ITT nesting and clamped-LATE endpoint monotonicity when pi grows.
        check(itt_bounds(dist, s12).contains(itt_bounds(dist, s11), 1e-12));
        if (complier_share_bounds(dist, s11).hi >= p1) {
            const Interval late1 = late_bounds(dist, s11);
            const Interval late2 = late_bounds(dist, s12);
            check(late2.lo <= late1.lo + 1e-12);
            check(late2.hi >= late1.hi - 1e-12);
        } else {
            ++late_guarded;
        }

        // Clamp ranges.
        const Interval itt = itt_bounds(dist, s21);
        const Interval co = complier_share_bounds(dist, s21);
        const Interval ate = ate_bounds(dist, s21);
        const Interval late = late_bounds(dist, s21);
        check(itt.lo >= -1.0 && itt.hi <= 1.0 && itt.lo <= itt.hi);
        check(co.lo >= 0.0 && co.hi <= 1.0 && co.lo <= co.hi);
        check(ate.lo >= -1.0 && ate.hi <= 1.0 && ate.lo <= ate.hi);
        check(late.lo >= -1.0 && late.hi <= 1.0 && late.lo <= late.hi);

        // Frontier: nonincreasing in c for mu >= 0, LATE == ITT at mu = 0.
        if (i % 5 == 0) {
            const auto grid = linspace_grid(0.0, 0.8, 17);
            for (double mu : {0.0, 0.2}) {
                const FrontierCurve itt_curve =
                    breakdown_frontier(dist, grid, {target_param::itt, mu});
                const FrontierCurve late_curve =
                    breakdown_frontier(dist, grid, {target_param::late, mu});
                for (size_t j = 0; j < grid.size(); ++j) {
                    if (j > 0) {
                        check(itt_curve.values[j] <= itt_curve.values[j - 1] + 1e-12);
                        check(late_curve.values[j] <= late_curve.values[j - 1] + 1e-12);
                    }
                    check(itt_curve.values[j] >= 0.0 && itt_curve.values[j] <= 1.0);
                    if (mu == 0.0) {
                        check(std::fabs(late_curve.values_raw[j] -
                                        itt_curve.values_raw[j]) <= 1e-12);
                    }
                }
            }
        }
    }
    const double sec = t.seconds();
    report(5, violations == 0 && sec < 60.0, sec,
           "nesting/clamp/frontier properties on 500 cells: " + std::to_string(violations) +
               " violations (" + std::to_string(late_guarded) +
               " LATE pairs skipped as certifiably empty)");
}

// ---- criterion 6: Monte Carlo bias and coverage ------------------------------
void criterion6(int jobs) {
    Timer t;
    McConfig cfg = McConfig::desk_scale();  // N=1000, reps=200, B=200
    cfg.seed = 60006;
    cfg.jobs = jobs;
    const McReport rep = monte_carlo_study(cfg);
    const double sec = t.seconds();
    const bool bias_ok = rep.max_abs_bias() <= 0.01;
    const bool cover_ok = rep.coverage >= 0.90 && rep.coverage <= 0.99;
    // Bias away from the clamp boundary, for the diagnostic line below.
    double interior_bias = 0.0;
    for (size_t i = 0; i < rep.grid.size(); ++i) {
        if (rep.truth[i] > 0.02) interior_bias = std::max(interior_bias, std::fabs(rep.bias[i]));
    }
    report(6, bias_ok && cover_ok, sec,
           "Monte Carlo N=1000 reps=200 B=200: max |bias| = " + fmt(rep.max_abs_bias()) +
               " (<= 0.01), coverage = " + fmt(rep.coverage) + " (in [0.90, 0.99])");
    if (!bias_ok) {
        std::printf(
            "      bias away from the frontier root: %s; the excess sits at c = 0.15\n"
            "      where the true frontier is exactly zero and the clamped estimator\n"
            "      max(bf, 0) is one-sided with mean ~0.4*sd ~ 0.016 at N=1000. That is\n"
            "      structural for the sample-analogue estimator at the root; see notes.\n",
            fmt(interior_bias).c_str());
    }
}

// ---- criterion 7: estimator consistency --------------------------------------
void criterion7() {
    Timer t;
    McConfig cfg;
    cfg.N = 1000000;
    cfg.reps = 1;
    cfg.with_bands = false;
    cfg.grid = linspace_grid(0.0, 0.15, 100);
    cfg.seed = 70007;
    const McReport rep = monte_carlo_study(cfg);
    const double sec = t.seconds();
    report(7, rep.max_abs_bias() <= 0.01 && sec < 60.0, sec,
           "single rep at N=1e6: max frontier deviation " + fmt(rep.max_abs_bias()) +
               " (<= 0.01)");
}

// ---- criterion 8: manifest replay reproducibility ----------------------------
std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_command(const std::vector<std::string>& argv) {
    std::string cmd;
    for (const auto& a : argv) cmd += "'" + a + "' ";
    cmd += "> /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::vector<std::string> replay_argv(const fs::path& manifest_path, const std::string& binary,
                                     const std::string& new_out, const std::string& jobs) {
    const RunManifest m = manifest_from_json(read_file(manifest_path));
    std::vector<std::string> argv = m.argv;
    argv[0] = binary;
    bool seen_jobs = false;
    for (size_t i = 0; i + 1 < argv.size(); ++i) {
        if (argv[i] == "--out") argv[i + 1] = new_out;
        if (argv[i] == "--jobs") {
            argv[i + 1] = jobs;
            seen_jobs = true;
        }
    }
    if (!seen_jobs) {
        argv.push_back("--jobs");
        argv.push_back(jobs);
    }
    return argv;
}

void criterion8(const std::string& binary) {
    Timer t;
    if (binary.empty()) {
        report(8, false, 0.0, "no CLI binary path given to the acceptance runner");
        return;
    }
    const fs::path dir = fs::temp_directory_path() / "breakfront_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // Synthetic micro-data with the benchmark schema.
    {
        SplitMix64 rng(88);
        const Dataset data = draw_sample(appendix_c_dgp(), 800, rng);
        std::ofstream csv(dir / "data.csv", std::ios::binary);
        csv << "y,d,z,x\n";
        for (const auto& r : data.records) {
            csv << r.y << ',' << r.d << ',' << r.z << ',' << r.x[0] << "\n";
        }
    }

    bool ok = true;
    std::string note;

    // Banded frontier from micro-data, replayed with a different worker count.
    const std::string out_a = (dir / "front_a").string();
    const std::vector<std::string> argv = {binary,
                                           "frontier",
                                           "--input",
                                           (dir / "data.csv").string(),
                                           "--covariates",
                                           "x",
                                           "--target",
                                           "late",
                                           "--mu",
                                           "0",
                                           "--grid",
                                           "grid(0,0.15,40)",
                                           "--band",
                                           "--B",
                                           "60",
                                           "--seed",
                                           "11",
                                           "--jobs",
                                           "1",
                                           "--out",
                                           out_a};
    if (run_command(argv) != 0) {
        ok = false;
        note = "frontier command failed";
    } else {
        const std::string out_b = (dir / "front_b").string();
        const auto replay = replay_argv(out_a + ".manifest.json", binary, out_b, "2");
        if (run_command(replay) != 0) {
            ok = false;
            note = "frontier replay failed";
        } else if (read_file(out_a + ".csv") != read_file(out_b + ".csv") ||
                   read_file(out_a + ".json") != read_file(out_b + ".json")) {
            ok = false;
            note = "frontier outputs differ across replay/jobs";
        }
    }

    // Calibration on a two-covariate synthetic file with a constructed
    // imbalance of exactly 0.05.
    if (ok) {
        std::ofstream csv(dir / "cal.csv", std::ios::binary);
        csv << "y,d,z,sex,region\n";
        auto block = [&](int sex, int nz1, int n) {
            for (int i = 0; i < n; ++i) {
                csv << "0,0," << (i < nz1 ? 1 : 0) << ',' << sex << ",r\n";
            }
        };
        block(1, 600, 1000);
        block(0, 500, 1000);
        csv.close();
        const std::string cal_out = (dir / "cal").string();
        const std::vector<std::string> cal_argv = {
            binary,  "calibrate", "--input", (dir / "cal.csv").string(),
            "--covariates", "sex,region", "--pivot", "sex", "--out", cal_out};
        if (run_command(cal_argv) != 0) {
            ok = false;
            note = "calibrate command failed";
        } else if (read_file(cal_out + ".json").find("0.050000000000000") == std::string::npos) {
            ok = false;
            note = "calibrate statistic missing the constructed 0.05 imbalance";
        }
    }

    // Simulation command, same exercise in the other direction.
    if (ok) {
        const std::string sim_a = (dir / "sim_a").string();
        const std::vector<std::string> sim_argv = {
            binary,  "simulate", "--N",    "300", "--reps", "6",
            "--B",   "16",       "--grid", "grid(0,0.15,12)", "--seed", "3",
            "--jobs", "2",       "--out",  sim_a};
        if (run_command(sim_argv) != 0) {
            ok = false;
            note = "simulate command failed";
        } else {
            const std::string sim_b = (dir / "sim_b").string();
            const auto replay = replay_argv(sim_a + ".manifest.json", binary, sim_b, "1");
            if (run_command(replay) != 0) {
                ok = false;
                note = "simulate replay failed";
            } else if (read_file(sim_a + ".csv") != read_file(sim_b + ".csv") ||
                       read_file(sim_a + ".json") != read_file(sim_b + ".json")) {
                ok = false;
                note = "simulate outputs differ across replay/jobs";
            }
        }
    }
    const double sec = t.seconds();
    report(8, ok, sec,
           ok ? "manifest replays reproduce outputs bitwise, independent of --jobs"
              : "replay mismatch: " + note);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "";
    int jobs = 2;
    if (const char* env = std::getenv("BREAKFRONT_JOBS")) jobs = std::max(1, std::atoi(env));

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6(jobs);
    criterion7();
    criterion8(binary);

    std::printf("%d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
