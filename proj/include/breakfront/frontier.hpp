#pragma once

#include <optional>
#include <string>
#include <vector>

#include "breakfront/model.hpp"

namespace breakfront {

// Breakdown frontier over a c grid: values are the clamped BF(c), values_raw
// the unclamped bf(c). Band columns are filled by the inference module.
struct FrontierCurve {
    std::vector<double> grid;
    std::vector<double> values_raw;
    std::vector<double> values;
    std::vector<double> band_lo;      // clamped to [0,1]; empty if no band
    std::vector<double> band_lo_raw;  // may dip below 0
    std::vector<double> sigma;        // scale used per grid point
    target_param target = target_param::late;
    double mu = 0.0;

    bool has_band() const { return !band_lo.empty(); }
};

// Raw breakdown value bf(c, mu): the largest defier share (before clamping)
// under which the conclusion "target >= mu" holds at dependence level c.
double bf_value(const ObservedDistribution& dist, double c, const FrontierQuery& q);

std::vector<double> linspace_grid(double lo, double hi, size_t n);

// Clamped frontier BF over the grid. In sharp-regime mode the grid must stay
// below the Assumption-7 cap, else GridOutsideRegime.
FrontierCurve breakdown_frontier(const ObservedDistribution& dist, std::vector<double> grid,
                                 const FrontierQuery& q, bool sharp_regime = false);

// Largest c with bf > 0, by bisection on the raw bf (nonincreasing for
// mu >= 0); returns 0 when bf(0) <= 0 and the cap when bf stays positive.
double breakdown_root(const ObservedDistribution& dist, const FrontierQuery& q,
                      double tol = 1e-8, bool sharp_regime = true);

// Whether (c, pi_def) lies in the robust region for the conclusion.
bool robust_region_contains(const ObservedDistribution& dist, const SensitivityPoint& s,
                            const FrontierQuery& q);

std::string frontier_to_csv(const FrontierCurve& curve);
std::string frontier_to_json(const FrontierCurve& curve, int indent = 2);

}  // namespace breakfront
