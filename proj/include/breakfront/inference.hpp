#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "breakfront/estimate.hpp"
#include "breakfront/frontier.hpp"
#include "breakfront/model.hpp"
#include "breakfront/rng.hpp"

namespace breakfront {

enum class sigma_mode { constant_one, bootstrap_sd };

struct InferenceConfig {
    int B = 999;
    double alpha = 0.05;
    double eps_scale = 2.0;  // eps_N = eps_scale / sqrt(N)
    sigma_mode sigma = sigma_mode::constant_one;
    uint64_t seed = 0;
    int jobs = 1;
    empty_arm_policy policy = empty_arm_policy::abort;

    void check() const {
        if (B < 1) throw usage_error("B must be >= 1");
        if (!(alpha > 0.0 && alpha < 1.0)) throw usage_error("alpha must lie in (0,1)");
        if (!(eps_scale > 0.0)) throw usage_error("eps_scale must be positive");
    }
};

struct BandDiagnostics {
    int64_t clamped_draws = 0;  // bootstrap directions that exited the simplex
    bool z_nonnegative = true;  // sign of the sup-statistic quantile
};

struct BandResult {
    FrontierCurve curve;  // band columns filled
    double z_hat = 0.0;
    std::vector<double> sigma;
    BandDiagnostics diag;
};

// One nonparametric bootstrap draw: resample N records with replacement and
// re-estimate the cell probabilities.
ObservedDistribution bootstrap_theta(const Dataset& data, SplitMix64& rng,
                                     empty_arm_policy policy = empty_arm_policy::abort);
Dataset resample_with_indices(const Dataset& data, const std::vector<size_t>& idx);

// theta_hat + scale * (theta_star - theta_hat), entrywise on (joint,
// propensity, weight); entries clamped into [0,1] and slices renormalized
// when the direction exits the simplex (counted in clamped_draws).
ObservedDistribution perturb_theta(const ObservedDistribution& theta_hat,
                                   const ObservedDistribution& theta_star, double scale,
                                   int64_t* clamped_draws = nullptr);

// Numerical directional-derivative of the clamped frontier along the
// bootstrap direction: [phi(theta_hat + eps_N sqrt(N) (theta*-theta_hat))
// - phi(theta_hat)] / eps_N per grid point.
std::vector<double> numerical_derivative(const ObservedDistribution& theta_hat,
                                         const ObservedDistribution& theta_star, size_t N,
                                         const InferenceConfig& cfg, const FrontierQuery& q,
                                         const std::vector<double>& grid,
                                         int64_t* clamped_draws = nullptr,
                                         const std::vector<double>* base_bf = nullptr);

// Smallest order statistic S_(k) with k >= ceil((1-alpha) * B), 1-indexed.
double empirical_upper_quantile(std::vector<double> values, double alpha);

// One-sided uniform lower confidence band for the breakdown frontier.
BandResult uniform_lower_band(const Dataset& data, const std::vector<double>& grid,
                              const FrontierQuery& q, const InferenceConfig& cfg);

// Deterministic worker pool: body(i) runs for i in [0, n); each i must write
// only its own slots so results do not depend on the worker count.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& body);

}  // namespace breakfront
