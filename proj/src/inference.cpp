#include "breakfront/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace breakfront {

namespace {

constexpr double kSigmaFloor = 1e-6;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Clamp a perturbed 4-vector back onto the simplex; returns true if anything
// had to move beyond rounding.
bool project_slice(std::array<double, 4>& v) {
    bool touched = false;
    double sum = 0.0;
    for (double& e : v) {
        if (e < 0.0 || e > 1.0) touched = true;
        e = clamp01(e);
        sum += e;
    }
    if (sum <= 0.0) {
        v = {0.25, 0.25, 0.25, 0.25};
        return true;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
        for (double& e : v) e /= sum;
        touched = true;
    }
    return touched;
}

}  // namespace

Dataset resample_with_indices(const Dataset& data, const std::vector<size_t>& idx) {
    Dataset out;
    out.records.reserve(idx.size());
    for (size_t i : idx) out.records.push_back(data.records[i]);
    return out;
}

ObservedDistribution bootstrap_theta(const Dataset& data, SplitMix64& rng,
                                     empty_arm_policy policy) {
    if (data.empty()) throw validation_error("EmptyData", "dataset has no records");
    const size_t n = data.size();
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<size_t>(rng.below(n));
    return estimate_cells(resample_with_indices(data, idx), policy);
}

ObservedDistribution perturb_theta(const ObservedDistribution& theta_hat,
                                   const ObservedDistribution& theta_star, double scale,
                                   int64_t* clamped_draws) {
    ObservedDistribution out = theta_hat;
    bool touched = false;
    double weight_sum = 0.0;
    for (auto& [key, cell] : out.cells) {
        const ObservedCell* star = nullptr;
        auto it = theta_star.cells.find(key);
        if (it != theta_star.cells.end()) star = &it->second;
        // A cell the resample never saw contributes a pure weight direction.
        const double star_weight = star ? star->weight : 0.0;
        for (int z = 0; z < 2; ++z) {
            if (star) {
                for (int i = 0; i < 4; ++i) {
                    cell.joint[z][i] += scale * (star->joint[z][i] - cell.joint[z][i]);
                }
            }
            touched |= project_slice(cell.joint[z]);
        }
        if (star) cell.propensity += scale * (star->propensity - cell.propensity);
        if (cell.propensity < 0.0 || cell.propensity > 1.0) {
            cell.propensity = clamp01(cell.propensity);
            touched = true;
        }
        cell.weight += scale * (star_weight - cell.weight);
        if (cell.weight < 0.0) {
            cell.weight = 0.0;
            touched = true;
        }
        weight_sum += cell.weight;
    }
    if (weight_sum <= 0.0) {
        for (auto& [key, cell] : out.cells) cell.weight = theta_hat.cells.at(key).weight;
        touched = true;
    } else if (std::fabs(weight_sum - 1.0) > 1e-12) {
        for (auto& [key, cell] : out.cells) cell.weight /= weight_sum;
        touched = true;
    }
    if (touched && clamped_draws) ++*clamped_draws;
    return out;
}

std::vector<double> numerical_derivative(const ObservedDistribution& theta_hat,
                                         const ObservedDistribution& theta_star, size_t N,
                                         const InferenceConfig& cfg, const FrontierQuery& q,
                                         const std::vector<double>& grid,
                                         int64_t* clamped_draws,
                                         const std::vector<double>* base_bf) {
    const double sqrt_n = std::sqrt(static_cast<double>(N));
    const double eps_n = cfg.eps_scale / sqrt_n;
    const double scale = eps_n * sqrt_n;  // = eps_scale
    const ObservedDistribution perturbed =
        perturb_theta(theta_hat, theta_star, scale, clamped_draws);

    std::vector<double> out(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const double base =
            base_bf ? (*base_bf)[i] : clamp01(bf_value(theta_hat, grid[i], q));
        const double moved = clamp01(bf_value(perturbed, grid[i], q));
        out[i] = (moved - base) / eps_n;
    }
    return out;
}

double empirical_upper_quantile(std::vector<double> values, double alpha) {
    if (values.empty()) throw usage_error("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const auto b = static_cast<double>(values.size());
    auto k = static_cast<size_t>(std::ceil((1.0 - alpha) * b));
    k = std::max<size_t>(1, std::min(values.size(), k));
    return values[k - 1];
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& body) {
    const int workers = std::max(1, jobs);
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<size_t>(n, static_cast<size_t>(workers)));
    pool.reserve(spawn);
    for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

BandResult uniform_lower_band(const Dataset& data, const std::vector<double>& grid,
                              const FrontierQuery& q, const InferenceConfig& cfg) {
    cfg.check();
    if (data.empty()) throw validation_error("EmptyData", "dataset has no records");
    const size_t N = data.size();
    const ObservedDistribution theta_hat = estimate_cells(data, cfg.policy);

    BandResult result;
    result.curve = breakdown_frontier(theta_hat, grid, q, /*sharp_regime=*/false);

    const auto b_count = static_cast<size_t>(cfg.B);
    std::vector<std::vector<double>> derivs(b_count);
    std::vector<int64_t> clamped(b_count, 0);
    const std::vector<double>& base_bf = result.curve.values;
    parallel_for(b_count, cfg.jobs, [&](size_t b) {
        SplitMix64 rng(stream_seed(cfg.seed, b));
        const ObservedDistribution theta_star = bootstrap_theta(data, rng, cfg.policy);
        derivs[b] = numerical_derivative(theta_hat, theta_star, N, cfg, q, grid, &clamped[b],
                                         &base_bf);
    });
    for (int64_t c : clamped) result.diag.clamped_draws += c;

    result.sigma.assign(grid.size(), 1.0);
    if (cfg.sigma == sigma_mode::bootstrap_sd) {
        for (size_t i = 0; i < grid.size(); ++i) {
            double mean = 0.0;
            for (const auto& d : derivs) mean += d[i];
            mean /= static_cast<double>(b_count);
            double var = 0.0;
            for (const auto& d : derivs) var += (d[i] - mean) * (d[i] - mean);
            var /= static_cast<double>(b_count);
            result.sigma[i] = std::max(std::sqrt(var), kSigmaFloor);
        }
    }

    std::vector<double> sup_stats(b_count);
    for (size_t b = 0; b < b_count; ++b) {
        double s = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < grid.size(); ++i) s = std::max(s, derivs[b][i] / result.sigma[i]);
        sup_stats[b] = s;
    }
    result.z_hat = empirical_upper_quantile(std::move(sup_stats), cfg.alpha);
    result.diag.z_nonnegative = result.z_hat >= 0.0;

    const double sqrt_n = std::sqrt(static_cast<double>(N));
    result.curve.band_lo_raw.resize(grid.size());
    result.curve.band_lo.resize(grid.size());
    result.curve.sigma = result.sigma;
    for (size_t i = 0; i < grid.size(); ++i) {
        const double raw = result.curve.values[i] - result.z_hat * result.sigma[i] / sqrt_n;
        result.curve.band_lo_raw[i] = raw;
        result.curve.band_lo[i] = clamp01(raw);
    }
    return result;
}

}  // namespace breakfront
