#include "breakfront/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace breakfront {

namespace {

constexpr double kDenomTau = 1e-10;  // degenerate LATE denominator cutoff

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }
double clamp11(double v) { return std::min(1.0, std::max(-1.0, v)); }

// Weighted aggregation of per-cell intervals.
template <typename PerCell>
Interval aggregate(const ObservedDistribution& dist, PerCell&& f) {
    Interval out{0.0, 0.0};
    for (const auto& [key, cell] : dist.cells) {
        Interval v = f(key, cell);
        out.lo += cell.weight * v.lo;
        out.hi += cell.weight * v.hi;
    }
    return out;
}

double pi_for(const PiDefMap& pi_def, const std::string& key) {
    auto it = pi_def.find(key);
    if (it == pi_def.end()) {
        throw validation_error("BadSensitivity", "no pi_def entry for cell '" + key + "'");
    }
    return it->second;
}

// Ratio bounds for itt/pi_co over the two intervals, with the denominator
// known nonnegative. A positive numerator is smallest against the largest
// denominator and vice versa. The complier majority puts pi_def underneath
// the complier share, which floors the adverse denominator inside the
// feasible regime; a denominator at or below tau makes the corresponding
// endpoint vacuous.
Interval ratio_bounds(const Interval& itt, const Interval& pi_co, double pi_def) {
    const double denom_lo = std::max(pi_co.lo, std::min(pi_def, pi_co.hi));
    Interval out;
    if (itt.hi >= 0.0) {
        out.hi = denom_lo <= kDenomTau ? 1.0 : clamp11(itt.hi / denom_lo);
    } else {
        out.hi = pi_co.hi <= kDenomTau ? 1.0 : clamp11(itt.hi / pi_co.hi);
    }
    if (itt.lo <= 0.0) {
        out.lo = denom_lo <= kDenomTau ? -1.0 : clamp11(itt.lo / denom_lo);
    } else {
        out.lo = pi_co.hi <= kDenomTau ? -1.0 : clamp11(itt.lo / pi_co.hi);
    }
    return out;
}

}  // namespace

Interval joint_potential_bounds(const ObservedCell& cell, int y, int d, int z, double c) {
    const double p = cell.p(y, d, z);
    const double pz = cell.arm(z);
    const double mass = p * pz;

    double lo = std::max(mass / (pz + c), mass);
    if (pz > c) lo = std::max(lo, (mass - c) / (pz - c));

    double hi = std::min((mass + c) / (pz + c), mass + (1.0 - pz));
    hi = std::min(hi, pz > c ? mass / (pz - c) : 1.0);

    return Interval{clamp01(lo), clamp01(hi)};
}

Interval marginal_outcome_bounds(const ObservedCell& cell, int y, int z, double c) {
    const Interval j1 = joint_potential_bounds(cell, y, 1, z, c);
    const Interval j0 = joint_potential_bounds(cell, y, 0, z, c);
    const double pz = cell.arm(z);
    const double mass = cell.p_y(y, z) * pz;
    return Interval{clamp01(std::max(j1.lo + j0.lo, mass)),
                    clamp01(std::min(j1.hi + j0.hi, mass + (1.0 - pz)))};
}

Interval marginal_treatment_bounds(const ObservedCell& cell, int d, int z, double c) {
    const Interval j1 = joint_potential_bounds(cell, 1, d, z, c);
    const Interval j0 = joint_potential_bounds(cell, 0, d, z, c);
    const double pz = cell.arm(z);
    const double mass = cell.p_d(d, z) * pz;
    return Interval{clamp01(std::max(j1.lo + j0.lo, mass)),
                    clamp01(std::min(j1.hi + j0.hi, mass + (1.0 - pz)))};
}

Interval itt_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s) {
    const Interval y1 = marginal_outcome_bounds(cell, 1, 1, s.c);
    const Interval y0 = marginal_outcome_bounds(cell, 1, 0, s.c);
    return Interval{clamp11(y1.lo - y0.hi - s.pi_def), clamp11(y1.hi - y0.lo + s.pi_def)};
}

Interval complier_share_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s) {
    const Interval d1 = marginal_treatment_bounds(cell, 1, 1, s.c);
    const Interval d0 = marginal_treatment_bounds(cell, 1, 0, s.c);
    // Compliers and defiers are disjoint groups, so pi_co <= 1 - pi_def.
    const double hi = std::min(clamp01(d1.hi - d0.lo + s.pi_def), 1.0 - s.pi_def);
    const double lo = std::min(clamp01(d1.lo - d0.hi + s.pi_def), hi);
    return Interval{lo, hi};
}

Interval ate_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s) {
    const double c = s.c;
    const double pi = s.pi_def;

    // Joint envelopes for (Y(D(z))=1, D(z)=d); index [z][d].
    Interval j[2][2];
    for (int z = 0; z < 2; ++z) {
        for (int d = 0; d < 2; ++d) j[z][d] = joint_potential_bounds(cell, 1, d, z, c);
    }
    const double pu_d1_0 = marginal_treatment_bounds(cell, 0, 1, c).hi;  // P_c^u(D(1)=0)
    const double pu_d0_1 = marginal_treatment_bounds(cell, 1, 0, c).hi;  // P_c^u(D(0)=1)

    // Observational (Z-marginalized) quantities.
    const double p1 = cell.propensity;
    const double obs_y1d1 = p1 * cell.p(1, 1, 1) + (1.0 - p1) * cell.p(1, 1, 0);
    const double obs_y1d0 = p1 * cell.p(1, 0, 1) + (1.0 - p1) * cell.p(1, 0, 0);
    const double obs_d1 = p1 * cell.p_d(1, 1) + (1.0 - p1) * cell.p_d(1, 0);

    // Group decomposition of P(Y(w)=1|x): the observed-arm joint covers
    // at+co (w=1) resp. nt+co (w=0), the never/always-taker block is bounded
    // by its share, and the defier block by min{pi_def, other-arm joint}.
    const double up1 =
        clamp01(std::min(j[1][1].hi + std::min(j[0][1].hi, pi) + pu_d1_0 - pi,
                         obs_y1d1 + (1.0 - obs_d1)));
    const double lo1 = clamp01(std::max(j[1][1].lo + j[0][1].lo - j[0][1].hi, obs_y1d1));
    const double up0 =
        clamp01(std::min(j[0][0].hi + std::min(j[1][0].hi, pi) + pu_d0_1 - pi,
                         obs_y1d0 + obs_d1));
    const double lo0 = clamp01(std::max(j[0][0].lo + j[1][0].lo - j[1][0].hi, obs_y1d0));

    return Interval{clamp11(lo1 - up0), clamp11(up1 - lo0)};
}

Interval balke_pearl_bounds(const ObservedCell& cell) {
    const double base = cell.p(1, 1, 1) - cell.p(1, 0, 0);
    return Interval{base - cell.p_d(1, 0), base + cell.p_d(0, 1)};
}

Interval itt_bounds(const ObservedDistribution& dist, const SensitivityPoint& s) {
    return aggregate(dist, [&](const std::string&, const ObservedCell& cell) {
        return itt_bounds_cell(cell, s);
    });
}

Interval complier_share_bounds(const ObservedDistribution& dist, const SensitivityPoint& s) {
    return aggregate(dist, [&](const std::string&, const ObservedCell& cell) {
        return complier_share_bounds_cell(cell, s);
    });
}

Interval ate_bounds(const ObservedDistribution& dist, const SensitivityPoint& s) {
    Interval out = aggregate(dist, [&](const std::string&, const ObservedCell& cell) {
        return ate_bounds_cell(cell, s);
    });
    return Interval{clamp11(out.lo), clamp11(out.hi)};
}

Interval late_bounds(const ObservedDistribution& dist, const SensitivityPoint& s) {
    return ratio_bounds(itt_bounds(dist, s), complier_share_bounds(dist, s), s.pi_def);
}

Interval itt_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def) {
    return aggregate(dist, [&](const std::string& key, const ObservedCell& cell) {
        return itt_bounds_cell(cell, SensitivityPoint{c, pi_for(pi_def, key)});
    });
}

Interval complier_share_bounds(const ObservedDistribution& dist, double c,
                               const PiDefMap& pi_def) {
    return aggregate(dist, [&](const std::string& key, const ObservedCell& cell) {
        return complier_share_bounds_cell(cell, SensitivityPoint{c, pi_for(pi_def, key)});
    });
}

Interval ate_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def) {
    Interval out = aggregate(dist, [&](const std::string& key, const ObservedCell& cell) {
        return ate_bounds_cell(cell, SensitivityPoint{c, pi_for(pi_def, key)});
    });
    return Interval{clamp11(out.lo), clamp11(out.hi)};
}

Interval late_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def) {
    double mean_pi = 0.0;
    for (const auto& [key, cell] : dist.cells) mean_pi += cell.weight * pi_for(pi_def, key);
    return ratio_bounds(itt_bounds(dist, c, pi_def), complier_share_bounds(dist, c, pi_def),
                        mean_pi);
}

SharpnessDiagnostics sharpness_conditions(const ObservedDistribution& dist,
                                          const SensitivityPoint& s) {
    SharpnessDiagnostics diag;
    diag.frechet_ok = true;
    diag.half_ok = true;
    diag.pi_window_ok = true;

    double c_cap = std::numeric_limits<double>::infinity();
    for (const auto& [key, cell] : dist.cells) {
        // (i) Frechet window from the c=0 first-stage quantities.
        const double pd0_1 = cell.p_d(1, 0);  // P(D(0)=1|x) at c=0
        const double pd1_1 = cell.p_d(1, 1);  // P(D(1)=1|x) at c=0
        const double fre_lo = std::max(0.0, pd0_1 - pd1_1);
        const double fre_hi = std::min(pd0_1, 1.0 - pd1_1);
        if (!(s.pi_def >= fre_lo && s.pi_def <= fre_hi)) diag.frechet_ok = false;

        for (int z = 0; z < 2; ++z) {
            const double pz = cell.arm(z);
            for (int yd = 0; yd < 4; ++yd) {
                const double p = cell.joint[z][yd];
                // (ii)
                if (!(p < 0.5)) diag.half_ok = false;
                // (iii) window cap over all (y,d,z,x)
                const double w1 = pz * (1.0 - 2.0 * p);
                const double w2 = pz * (1.0 - pz) * (1.0 - p) / (p * pz + 1.0 - pz);
                c_cap = std::min(c_cap, std::min(w1, w2));
            }
        }

        // (iv) the pi_def window in which the ITT truncations stay inactive.
        const Interval y1 = marginal_outcome_bounds(cell, 1, 1, s.c);
        const Interval y0 = marginal_outcome_bounds(cell, 1, 0, s.c);
        const double lo_edge = y0.hi - y1.lo - 1.0;
        const double hi_edge = 1.0 - (y1.hi - y0.lo);
        if (!(s.pi_def > lo_edge && s.pi_def < hi_edge)) diag.pi_window_ok = false;
    }

    diag.c_window_ok = s.c > 0.0 && s.c < c_cap;
    diag.overall_sharp =
        diag.frechet_ok && diag.half_ok && diag.c_window_ok && diag.pi_window_ok;
    return diag;
}

}  // namespace breakfront
