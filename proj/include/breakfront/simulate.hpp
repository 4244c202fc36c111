#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "breakfront/inference.hpp"
#include "breakfront/model.hpp"
#include "breakfront/rng.hpp"

namespace breakfront {

// The two-cell benchmark DGP: equal cell weights, propensity 0.6, identical
// joints in both cells; point ITT 0.25 and Wald ratio 0.5.
ObservedDistribution appendix_c_dgp();

// N i.i.d. draws from the full (X, Z, Y, D) joint.
Dataset draw_sample(const ObservedDistribution& dist, size_t n, SplitMix64& rng);

// Random strict-interior cell with no latent-model structure imposed.
ObservedCell random_interior_cell(SplitMix64& rng);

// Cell generated by pushing a random no-defier independent latent model
// forward to observables; satisfies the instrumental inequalities by
// construction, so the (0,0) latent system is feasible.
ObservedCell random_monotone_cell(SplitMix64& rng);

ObservedDistribution random_distribution(SplitMix64& rng, size_t num_cells,
                                         bool monotone = false);

struct McConfig {
    size_t N = 1000;
    int reps = 200;
    std::vector<double> grid;  // defaults to 100 points on [0, 0.15]
    FrontierQuery q{target_param::late, 0.0};
    InferenceConfig inf;
    uint64_t seed = 0;
    int jobs = 1;
    bool with_bands = true;
    bool exact_pipeline = false;  // self-test: estimate replaced by the DGP
    bool dump_reps = false;       // keep per-rep frontier estimates

    static McConfig desk_scale();
    static McConfig paper_scale();
};

struct McReport {
    std::vector<double> grid;
    std::vector<double> truth;
    std::vector<double> mean_estimate;
    std::vector<double> bias;
    std::vector<double> sd;
    double coverage = -1.0;  // simultaneous over the grid; -1 without bands
    int reps = 0;
    size_t N = 0;
    std::vector<std::vector<double>> rep_estimates;  // filled when dump_reps

    double max_abs_bias() const;
};

McReport monte_carlo_study(const McConfig& cfg);
McReport monte_carlo_study(const ObservedDistribution& dgp, const McConfig& cfg);

std::string mc_report_to_csv(const McReport& report);
std::string mc_report_to_json(const McReport& report, int indent = 2);

}  // namespace breakfront
