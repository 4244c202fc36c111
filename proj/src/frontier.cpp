#include "breakfront/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "breakfront/bounds.hpp"
#include "json.hpp"

namespace breakfront {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Format a double so it round-trips bit-exactly.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* target_name(target_param t) { return t == target_param::itt ? "itt" : "late"; }

}  // namespace

double bf_value(const ObservedDistribution& dist, double c, const FrontierQuery& q) {
    if (q.target == target_param::late && !(q.mu > -1.0)) {
        throw numeric_error("BadThreshold", "LATE threshold must exceed -1");
    }
    double y1_lo = 0.0, y0_hi = 0.0;
    double d1_hi = 0.0, d0_lo = 0.0;
    for (const auto& [key, cell] : dist.cells) {
        y1_lo += cell.weight * marginal_outcome_bounds(cell, 1, 1, c).lo;
        y0_hi += cell.weight * marginal_outcome_bounds(cell, 1, 0, c).hi;
        if (q.target == target_param::late) {
            d1_hi += cell.weight * marginal_treatment_bounds(cell, 1, 1, c).hi;
            d0_lo += cell.weight * marginal_treatment_bounds(cell, 1, 0, c).lo;
        }
    }
    const double reduced = y1_lo - y0_hi;
    if (q.target == target_param::itt) return reduced - q.mu;
    return reduced / (1.0 + q.mu) - q.mu * (d1_hi - d0_lo) / (1.0 + q.mu);
}

std::vector<double> linspace_grid(double lo, double hi, size_t n) {
    if (n == 0 || hi < lo) throw usage_error("bad grid specification");
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    for (size_t i = 0; i < n; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return grid;
}

FrontierCurve breakdown_frontier(const ObservedDistribution& dist, std::vector<double> grid,
                                 const FrontierQuery& q, bool sharp_regime) {
    if (grid.empty()) throw usage_error("empty grid");
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) throw usage_error("grid must be strictly increasing");
    }
    if (grid.front() < 0.0 || grid.back() > 1.0) throw usage_error("grid must lie in [0,1]");
    if (sharp_regime) {
        const double cap = assumption7_cap(dist);
        if (grid.back() >= cap) {
            throw numeric_error("GridOutsideRegime",
                                "grid max " + std::to_string(grid.back()) +
                                    " reaches the propensity margin cap " + std::to_string(cap));
        }
    }
    FrontierCurve curve;
    curve.target = q.target;
    curve.mu = q.mu;
    curve.grid = std::move(grid);
    curve.values_raw.reserve(curve.grid.size());
    curve.values.reserve(curve.grid.size());
    for (double c : curve.grid) {
        const double raw = bf_value(dist, c, q);
        curve.values_raw.push_back(raw);
        curve.values.push_back(clamp01(raw));
    }
    return curve;
}

double breakdown_root(const ObservedDistribution& dist, const FrontierQuery& q, double tol,
                      bool sharp_regime) {
    const double cap = sharp_regime ? assumption7_cap(dist) - 1e-9 : 1.0;
    if (bf_value(dist, 0.0, q) <= 0.0) return 0.0;
    if (bf_value(dist, cap, q) > 0.0) return cap;
    double lo = 0.0, hi = cap;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (bf_value(dist, mid, q) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

bool robust_region_contains(const ObservedDistribution& dist, const SensitivityPoint& s,
                            const FrontierQuery& q) {
    const double lower = q.target == target_param::itt ? itt_bounds(dist, s).lo
                                                       : late_bounds(dist, s).lo;
    return lower >= q.mu;
}

std::string frontier_to_csv(const FrontierCurve& curve) {
    std::ostringstream out;
    out << "c,bf_raw,bf";
    if (curve.has_band()) out << ",band_lo,band_lo_raw,sigma";
    out << "\n";
    for (size_t i = 0; i < curve.grid.size(); ++i) {
        out << fmt(curve.grid[i]) << ',' << fmt(curve.values_raw[i]) << ','
            << fmt(curve.values[i]);
        if (curve.has_band()) {
            out << ',' << fmt(curve.band_lo[i]) << ',' << fmt(curve.band_lo_raw[i]) << ','
                << fmt(curve.sigma[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::string frontier_to_json(const FrontierCurve& curve, int indent) {
    nlohmann::ordered_json doc;
    doc["target"] = target_name(curve.target);
    doc["mu"] = curve.mu;
    doc["c"] = curve.grid;
    doc["bf_raw"] = curve.values_raw;
    doc["bf"] = curve.values;
    if (curve.has_band()) {
        doc["band_lo"] = curve.band_lo;
        doc["band_lo_raw"] = curve.band_lo_raw;
        doc["sigma"] = curve.sigma;
    }
    return doc.dump(indent);
}

}  // namespace breakfront
