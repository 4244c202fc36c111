#include "breakfront/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "breakfront/bounds.hpp"
#include "breakfront/estimate.hpp"
#include "breakfront/frontier.hpp"
#include "json.hpp"

namespace breakfront {

ObservedDistribution appendix_c_dgp() {
    ObservedCell cell;
    // Conditional on Z=1: masses 0.2, 0.1, 0.25, 0.05 over arm mass 0.6.
    cell.joint[1] = {0.2 / 0.6, 0.1 / 0.6, 0.25 / 0.6, 0.05 / 0.6};
    // Conditional on Z=0: masses 0.05, 0.05, 0.05, 0.25 over arm mass 0.4.
    cell.joint[0] = {0.125, 0.125, 0.125, 0.625};
    cell.propensity = 0.6;
    cell.weight = 0.5;

    ObservedDistribution dist;
    dist.cells.emplace("0", cell);
    dist.cells.emplace("1", cell);
    return dist;
}

Dataset draw_sample(const ObservedDistribution& dist, size_t n, SplitMix64& rng) {
    if (n == 0) throw validation_error("EmptyData", "cannot draw an empty sample");
    Dataset data;
    data.records.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        // Cell by weight, then arm, then the (y,d) pair; three uniforms per
        // record so the draw count per record is fixed.
        const double ux = rng.uniform01();
        const double uz = rng.uniform01();
        const double uyd = rng.uniform01();

        const ObservedCell* cell = nullptr;
        const std::string* key = nullptr;
        double acc = 0.0;
        for (const auto& [k, c] : dist.cells) {
            acc += c.weight;
            if (ux < acc || &c == &dist.cells.rbegin()->second) {
                cell = &c;
                key = &k;
                break;
            }
        }
        DatasetRecord rec;
        rec.z = uz < cell->propensity ? 1 : 0;
        int yd = 3;
        double acc2 = 0.0;
        for (int j = 0; j < 4; ++j) {
            acc2 += cell->joint[rec.z][j];
            if (uyd < acc2) {
                yd = j;
                break;
            }
        }
        rec.y = 1 - yd / 2;
        rec.d = 1 - yd % 2;
        rec.x = {*key};
        data.records.push_back(std::move(rec));
    }
    return data;
}

ObservedCell random_interior_cell(SplitMix64& rng) {
    ObservedCell cell;
    for (int z = 0; z < 2; ++z) {
        double sum = 0.0;
        for (int i = 0; i < 4; ++i) {
            // Exponential draws floored away from zero keep the cell strictly
            // interior after normalization.
            cell.joint[z][i] = 0.05 - std::log(1.0 - rng.uniform01());
            sum += cell.joint[z][i];
        }
        for (int i = 0; i < 4; ++i) cell.joint[z][i] /= sum;
    }
    cell.propensity = 0.15 + 0.7 * rng.uniform01();
    cell.weight = 1.0;
    return cell;
}

ObservedCell random_monotone_cell(SplitMix64& rng) {
    // Group shares over {at, co, nt}, each at least 0.05.
    double at = 0.05 - std::log(1.0 - rng.uniform01());
    double co = 0.05 - std::log(1.0 - rng.uniform01());
    double nt = 0.05 - std::log(1.0 - rng.uniform01());
    const double total = at + co + nt;
    at /= total;
    co /= total;
    nt /= total;

    auto interior = [&] { return 0.05 + 0.9 * rng.uniform01(); };
    const double a1 = interior();  // P(Y(1)=1 | at)
    const double n0 = interior();  // P(Y(0)=1 | nt)
    const double c1 = interior();  // P(Y(1)=1 | co)
    const double c0 = interior();  // P(Y(0)=1 | co)

    ObservedCell cell;
    cell.joint[1][yd_index(1, 1)] = at * a1 + co * c1;
    cell.joint[1][yd_index(1, 0)] = nt * n0;
    cell.joint[1][yd_index(0, 1)] = at * (1.0 - a1) + co * (1.0 - c1);
    cell.joint[1][yd_index(0, 0)] = nt * (1.0 - n0);
    cell.joint[0][yd_index(1, 1)] = at * a1;
    cell.joint[0][yd_index(1, 0)] = nt * n0 + co * c0;
    cell.joint[0][yd_index(0, 1)] = at * (1.0 - a1);
    cell.joint[0][yd_index(0, 0)] = nt * (1.0 - n0) + co * (1.0 - c0);
    cell.propensity = 0.15 + 0.7 * rng.uniform01();
    cell.weight = 1.0;
    return cell;
}

ObservedDistribution random_distribution(SplitMix64& rng, size_t num_cells, bool monotone) {
    ObservedDistribution dist;
    std::vector<double> weights(num_cells);
    double total = 0.0;
    for (auto& w : weights) {
        w = 0.1 - std::log(1.0 - rng.uniform01());
        total += w;
    }
    for (size_t i = 0; i < num_cells; ++i) {
        ObservedCell cell = monotone ? random_monotone_cell(rng) : random_interior_cell(rng);
        cell.weight = weights[i] / total;
        dist.cells.emplace("x" + std::to_string(i), cell);
    }
    return dist;
}

McConfig McConfig::desk_scale() {
    McConfig cfg;
    cfg.N = 1000;
    cfg.reps = 200;
    cfg.grid = linspace_grid(0.0, 0.15, 100);
    cfg.inf.B = 200;
    return cfg;
}

McConfig McConfig::paper_scale() {
    McConfig cfg;
    cfg.N = 1000;
    cfg.reps = 500;
    cfg.grid = linspace_grid(0.0, 0.15, 100);
    cfg.inf.B = 999;
    return cfg;
}

double McReport::max_abs_bias() const {
    double m = 0.0;
    for (double b : bias) m = std::max(m, std::fabs(b));
    return m;
}

McReport monte_carlo_study(const McConfig& cfg) {
    return monte_carlo_study(appendix_c_dgp(), cfg);
}

McReport monte_carlo_study(const ObservedDistribution& dgp, const McConfig& cfg) {
    if (cfg.N < 1 || cfg.reps < 1) throw usage_error("N and reps must be positive");
    const std::vector<double> grid =
        cfg.grid.empty() ? linspace_grid(0.0, 0.15, 100) : cfg.grid;

    McReport report;
    report.grid = grid;
    report.reps = cfg.reps;
    report.N = cfg.N;
    report.truth = breakdown_frontier(dgp, grid, cfg.q).values;

    const auto reps = static_cast<size_t>(cfg.reps);
    std::vector<std::vector<double>> estimates(reps);
    std::vector<char> covered(reps, 0);

    parallel_for(reps, cfg.jobs, [&](size_t r) {
        SplitMix64 rng(stream_seed(cfg.seed ^ 0x5eedULL, r));
        ObservedDistribution theta;
        Dataset sample;
        if (cfg.exact_pipeline) {
            theta = dgp;
        } else {
            sample = draw_sample(dgp, cfg.N, rng);
            theta = estimate_cells(sample, cfg.inf.policy);
        }

        if (cfg.with_bands && !cfg.exact_pipeline) {
            InferenceConfig inf = cfg.inf;
            inf.seed = stream_seed(cfg.seed ^ 0xb41dULL, r);
            inf.jobs = 1;  // replications already run in parallel
            const BandResult band = uniform_lower_band(sample, grid, cfg.q, inf);
            estimates[r] = band.curve.values;
            bool cover = true;
            for (size_t i = 0; i < grid.size(); ++i) {
                if (band.curve.band_lo[i] > report.truth[i]) {
                    cover = false;
                    break;
                }
            }
            covered[r] = cover ? 1 : 0;
        } else {
            estimates[r] = breakdown_frontier(theta, grid, cfg.q).values;
        }
    });

    const auto n_grid = grid.size();
    report.mean_estimate.assign(n_grid, 0.0);
    report.bias.assign(n_grid, 0.0);
    report.sd.assign(n_grid, 0.0);
    for (size_t i = 0; i < n_grid; ++i) {
        // Bias averaged over per-rep deviations: exact recovery stays exact.
        double mean = 0.0, bias = 0.0;
        for (const auto& est : estimates) {
            mean += est[i];
            bias += est[i] - report.truth[i];
        }
        mean /= static_cast<double>(reps);
        bias /= static_cast<double>(reps);
        double var = 0.0;
        for (const auto& est : estimates) var += (est[i] - mean) * (est[i] - mean);
        var /= static_cast<double>(reps);
        report.mean_estimate[i] = mean;
        report.bias[i] = bias;
        report.sd[i] = std::sqrt(var);
    }
    if (cfg.with_bands && !cfg.exact_pipeline) {
        double cover = 0.0;
        for (char c : covered) cover += c;
        report.coverage = cover / static_cast<double>(reps);
    }
    if (cfg.dump_reps) report.rep_estimates = std::move(estimates);
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string mc_report_to_csv(const McReport& report) {
    std::ostringstream out;
    out << "c,truth,mean_estimate,bias,sd\n";
    for (size_t i = 0; i < report.grid.size(); ++i) {
        out << fmt(report.grid[i]) << ',' << fmt(report.truth[i]) << ','
            << fmt(report.mean_estimate[i]) << ',' << fmt(report.bias[i]) << ','
            << fmt(report.sd[i]) << "\n";
    }
    return out.str();
}

std::string mc_report_to_json(const McReport& report, int indent) {
    nlohmann::ordered_json doc;
    doc["N"] = report.N;
    doc["reps"] = report.reps;
    doc["c"] = report.grid;
    doc["truth"] = report.truth;
    doc["mean_estimate"] = report.mean_estimate;
    doc["bias"] = report.bias;
    doc["sd"] = report.sd;
    doc["max_abs_bias"] = report.max_abs_bias();
    if (report.coverage >= 0.0) doc["coverage"] = report.coverage;
    if (!report.rep_estimates.empty()) doc["rep_estimates"] = report.rep_estimates;
    return doc.dump(indent);
}

}  // namespace breakfront
