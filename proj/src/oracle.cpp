#include "breakfront/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "breakfront/rng.hpp"
#include "breakfront/simulate.hpp"
#include "json.hpp"

namespace breakfront {

namespace {

constexpr int kNumTypes = 16;
constexpr int kNumVars = 32;
constexpr double kStrictDefierSlack = 1e-9;
constexpr double kRatioTol = 1e-18;  // bisection interval width on r
constexpr int kRatioIters = 62;

struct TypeInfo {
    int d1, d0, y1, y0;
};

TypeInfo type_info(int t) {
    return TypeInfo{(t >> 3) & 1, (t >> 2) & 1, (t >> 1) & 1, t & 1};
}

bool is_complier(const TypeInfo& ti) { return ti.d1 == 1 && ti.d0 == 0; }
bool is_defier(const TypeInfo& ti) { return ti.d1 == 0 && ti.d0 == 1; }

// Membership of type t in the pair event {D(zp)=d, Y(D(zp))=y}.
bool in_pair_event(const TypeInfo& ti, int zp, int y, int d) {
    const int dz = zp == 1 ? ti.d1 : ti.d0;
    if (dz != d) return false;
    const int ydz = dz == 1 ? ti.y1 : ti.y0;
    return ydz == y;
}

std::vector<double> zeros() { return std::vector<double>(kNumVars, 0.0); }

// Objective coefficients on the total type mass m_t for each target.
std::vector<double> objective_for(const LpTarget& target) {
    std::vector<double> obj = zeros();
    auto add_mass = [&](int t, double coef) {
        obj[LatentModel::var(t, 0)] += coef;
        obj[LatentModel::var(t, 1)] += coef;
    };
    for (int t = 0; t < kNumTypes; ++t) {
        const TypeInfo ti = type_info(t);
        switch (target.kind) {
            case lp_target_kind::joint:
                if (in_pair_event(ti, target.z, target.y, target.d)) add_mass(t, 1.0);
                break;
            case lp_target_kind::marginal_y:
                if (in_pair_event(ti, target.z, target.y, 0) ||
                    in_pair_event(ti, target.z, target.y, 1)) {
                    add_mass(t, 1.0);
                }
                break;
            case lp_target_kind::marginal_d:
                if (in_pair_event(ti, target.z, 0, target.d) ||
                    in_pair_event(ti, target.z, 1, target.d)) {
                    add_mass(t, 1.0);
                }
                break;
            case lp_target_kind::itt:
                // The ITT object the bounds track is LATE_co * pi_co, i.e. the
                // complier effect mass (equal to the assignment effect plus
                // the defier-effect correction).
                if (is_complier(ti)) add_mass(t, static_cast<double>(ti.y1 - ti.y0));
                break;
            case lp_target_kind::ate:
                add_mass(t, static_cast<double>(ti.y1 - ti.y0));
                break;
            case lp_target_kind::late:
                break;  // handled by bisection
        }
    }
    return obj;
}

// num = complier effect mass, den = complier share; LATE = num/den.
void late_parts(std::vector<double>& num, std::vector<double>& den) {
    num = zeros();
    den = zeros();
    for (int t = 0; t < kNumTypes; ++t) {
        const TypeInfo ti = type_info(t);
        if (!is_complier(ti)) continue;
        for (int z = 0; z < 2; ++z) {
            num[LatentModel::var(t, z)] = static_cast<double>(ti.y1 - ti.y0);
            den[LatentModel::var(t, z)] = 1.0;
        }
    }
}

LatentModel model_from(const std::vector<double>& x) {
    LatentModel m;
    for (int v = 0; v < kNumVars; ++v) m.q[v] = std::max(0.0, x[v]);
    return m;
}

}  // namespace

double LatentModel::group_share(int d1, int d0) const {
    double s = 0.0;
    for (int y1 = 0; y1 < 2; ++y1) {
        for (int y0 = 0; y0 < 2; ++y0) s += mass(type_index(d1, d0, y1, y0));
    }
    return s;
}

ObservedCell LatentModel::push_forward() const {
    ObservedCell cell;
    double arm1 = 0.0;
    for (int t = 0; t < kNumTypes; ++t) arm1 += q[var(t, 1)];
    cell.propensity = arm1;
    cell.weight = 1.0;
    for (int z = 0; z < 2; ++z) {
        const double pz = z == 1 ? arm1 : 1.0 - arm1;
        for (int y = 0; y < 2; ++y) {
            for (int d = 0; d < 2; ++d) {
                double mass = 0.0;
                for (int t = 0; t < kNumTypes; ++t) {
                    if (in_pair_event(type_info(t), z, y, d)) mass += q[var(t, z)];
                }
                cell.joint[z][yd_index(y, d)] = pz > 0.0 ? mass / pz : 0.0;
            }
        }
    }
    return cell;
}

std::string LpTarget::name() const {
    switch (kind) {
        case lp_target_kind::joint:
            return "joint(y=" + std::to_string(y) + ",d=" + std::to_string(d) +
                   ",z=" + std::to_string(z) + ")";
        case lp_target_kind::marginal_y:
            return "marginal_y(y=" + std::to_string(y) + ",z=" + std::to_string(z) + ")";
        case lp_target_kind::marginal_d:
            return "marginal_d(d=" + std::to_string(d) + ",z=" + std::to_string(z) + ")";
        case lp_target_kind::itt:
            return "itt";
        case lp_target_kind::ate:
            return "ate";
        case lp_target_kind::late:
            return "late";
    }
    return "?";
}

DenseLP build_constraints(const ObservedCell& cell, const SensitivityPoint& s,
                          bool strict_defiers, bool with_defier_share) {
    DenseLP lp(kNumVars);
    const double p1 = cell.propensity;

    // (c) observational match: arm-z mass of each pair event equals the
    // observed joint times the arm probability. Total mass and the assignment
    // margin are implied by these rows.
    for (int z = 0; z < 2; ++z) {
        for (int y = 0; y < 2; ++y) {
            for (int d = 0; d < 2; ++d) {
                std::vector<double> row = zeros();
                for (int t = 0; t < kNumTypes; ++t) {
                    if (in_pair_event(type_info(t), z, y, d)) row[LatentModel::var(t, z)] = 1.0;
                }
                lp.add_eq(std::move(row), cell.p(y, d, z) * cell.arm(z));
            }
        }
    }

    // (d) c-dependence band for each potential pair and each pair event:
    // (p1 - c) m_S <= q(S, 1) <= (p1 + c) m_S, linear in q.
    for (int zp = 0; zp < 2; ++zp) {
        for (int y = 0; y < 2; ++y) {
            for (int d = 0; d < 2; ++d) {
                std::vector<double> upper = zeros();
                std::vector<double> lower = zeros();
                for (int t = 0; t < kNumTypes; ++t) {
                    if (!in_pair_event(type_info(t), zp, y, d)) continue;
                    // q(S,1) - (p1+c)(q(S,0)+q(S,1)) <= 0
                    upper[LatentModel::var(t, 1)] = 1.0 - (p1 + s.c);
                    upper[LatentModel::var(t, 0)] = -(p1 + s.c);
                    // (p1-c)(q(S,0)+q(S,1)) - q(S,1) <= 0
                    lower[LatentModel::var(t, 1)] = (p1 - s.c) - 1.0;
                    lower[LatentModel::var(t, 0)] = p1 - s.c;
                }
                lp.add_le(std::move(upper), 0.0);
                lp.add_le(std::move(lower), 0.0);
            }
        }
    }

    if (with_defier_share) {
        // (e) exact defier share.
        std::vector<double> row = zeros();
        for (int t = 0; t < kNumTypes; ++t) {
            if (is_defier(type_info(t))) {
                row[LatentModel::var(t, 0)] = 1.0;
                row[LatentModel::var(t, 1)] = 1.0;
            }
        }
        lp.add_eq(std::move(row), s.pi_def);

        // (f) complier share >= defier share (+ slack in strict mode).
        std::vector<double> maj = zeros();
        for (int t = 0; t < kNumTypes; ++t) {
            const TypeInfo ti = type_info(t);
            const double coef = is_defier(ti) ? 1.0 : (is_complier(ti) ? -1.0 : 0.0);
            maj[LatentModel::var(t, 0)] = coef;
            maj[LatentModel::var(t, 1)] = coef;
        }
        lp.add_le(std::move(maj), strict_defiers ? -kStrictDefierSlack : 0.0);
    }

    return lp;
}

std::optional<LatentModel> feasibility_check(const ObservedCell& cell,
                                             const SensitivityPoint& s, bool strict_defiers) {
    const DenseLP lp = build_constraints(cell, s, strict_defiers);
    const DenseLP::Result r = lp.find_feasible();
    if (!r.ok()) return std::nullopt;
    return model_from(r.x);
}

namespace {

// Largest (smallest) r in [-1,1] such that a model with complier-effect mass
// >= r * complier share (resp. <=) exists; the feasible r-set is an interval.
Interval late_by_bisection(const ObservedCell& cell, const SensitivityPoint& s,
                           bool strict_defiers) {
    std::vector<double> num, den;
    late_parts(num, den);

    auto feasible_with_ratio = [&](double r, bool upper_side) {
        DenseLP lp = build_constraints(cell, s, strict_defiers);
        std::vector<double> row(kNumVars);
        for (int v = 0; v < kNumVars; ++v) {
            // upper side: num - r den >= 0; lower side: num - r den <= 0.
            row[v] = num[v] - r * den[v];
        }
        if (upper_side) {
            lp.add_ge(std::move(row), 0.0);
        } else {
            lp.add_le(std::move(row), 0.0);
        }
        return lp.find_feasible().ok();
    };

    Interval out;
    // Upper endpoint: r = -1 is always feasible on the >= side.
    if (feasible_with_ratio(1.0, true)) {
        out.hi = 1.0;
    } else {
        double lo = -1.0, hi = 1.0;
        for (int i = 0; i < kRatioIters && hi - lo > kRatioTol; ++i) {
            const double mid = 0.5 * (lo + hi);
            (feasible_with_ratio(mid, true) ? lo : hi) = mid;
        }
        out.hi = lo;
    }
    // Lower endpoint: r = 1 is always feasible on the <= side.
    if (feasible_with_ratio(-1.0, false)) {
        out.lo = -1.0;
    } else {
        double lo = -1.0, hi = 1.0;
        for (int i = 0; i < kRatioIters && hi - lo > kRatioTol; ++i) {
            const double mid = 0.5 * (lo + hi);
            (feasible_with_ratio(mid, false) ? hi : lo) = mid;
        }
        out.lo = hi;
    }
    return out;
}

}  // namespace

Interval sharp_bounds_lp(const ObservedCell& cell, const SensitivityPoint& s,
                         const LpTarget& target, bool strict_defiers) {
    const bool pair_level = target.kind == lp_target_kind::joint ||
                            target.kind == lp_target_kind::marginal_y ||
                            target.kind == lp_target_kind::marginal_d;
    const DenseLP base = build_constraints(cell, s, strict_defiers, !pair_level);
    if (!base.find_feasible().ok()) {
        throw numeric_error("Infeasible",
                            "no latent model matches the cell at (c=" + std::to_string(s.c) +
                                ", pi_def=" + std::to_string(s.pi_def) + ")");
    }
    if (target.kind == lp_target_kind::late) {
        return late_by_bisection(cell, s, strict_defiers);
    }
    const std::vector<double> obj = objective_for(target);
    const DenseLP::Result lo = base.minimize(obj);
    const DenseLP::Result hi = base.maximize(obj);
    if (!lo.ok() || !hi.ok()) {
        throw numeric_error("Infeasible", "LP did not solve to optimality");
    }
    return Interval{lo.value, hi.value};
}

Interval closed_form_bounds(const ObservedCell& cell, const SensitivityPoint& s,
                            const LpTarget& target) {
    switch (target.kind) {
        case lp_target_kind::joint:
            return joint_potential_bounds(cell, target.y, target.d, target.z, s.c);
        case lp_target_kind::marginal_y:
            return marginal_outcome_bounds(cell, target.y, target.z, s.c);
        case lp_target_kind::marginal_d:
            return marginal_treatment_bounds(cell, target.d, target.z, s.c);
        case lp_target_kind::itt:
            return itt_bounds_cell(cell, s);
        case lp_target_kind::ate:
            return ate_bounds_cell(cell, s);
        case lp_target_kind::late: {
            ObservedDistribution dist;
            ObservedCell c = cell;
            c.weight = 1.0;
            dist.cells.emplace("x", c);
            return late_bounds(dist, s);
        }
    }
    throw usage_error("unknown LP target");
}

std::string latent_model_to_json(const LatentModel& model, int indent) {
    nlohmann::ordered_json types = nlohmann::ordered_json::array();
    for (int t = 0; t < kNumTypes; ++t) {
        const TypeInfo ti = type_info(t);
        nlohmann::ordered_json jt;
        jt["d1"] = ti.d1;
        jt["d0"] = ti.d0;
        jt["y1"] = ti.y1;
        jt["y0"] = ti.y0;
        jt["q_z0"] = model.q[LatentModel::var(t, 0)];
        jt["q_z1"] = model.q[LatentModel::var(t, 1)];
        types.push_back(jt);
    }
    nlohmann::ordered_json doc;
    doc["types"] = types;
    doc["pi_at"] = model.group_share(1, 1);
    doc["pi_co"] = model.group_share(1, 0);
    doc["pi_nt"] = model.group_share(0, 0);
    doc["pi_def"] = model.group_share(0, 1);
    return doc.dump(indent);
}

namespace {

std::vector<LpTarget> all_targets() {
    std::vector<LpTarget> targets;
    for (int z = 0; z < 2; ++z) {
        for (int y = 0; y < 2; ++y) {
            for (int d = 0; d < 2; ++d) targets.push_back(LpTarget::joint(y, d, z));
        }
    }
    for (int z = 0; z < 2; ++z) {
        for (int y = 0; y < 2; ++y) targets.push_back(LpTarget::marginal_y(y, z));
        for (int d = 0; d < 2; ++d) targets.push_back(LpTarget::marginal_d(d, z));
    }
    targets.push_back(LpTarget::itt());
    targets.push_back(LpTarget::ate());
    targets.push_back(LpTarget::late());
    return targets;
}

bool sharpness_expected(const LpTarget& target, const SharpnessDiagnostics& flags,
                        const ObservedCell& cell, const SensitivityPoint& s) {
    switch (target.kind) {
        case lp_target_kind::joint:
            return true;
        case lp_target_kind::marginal_y:
        case lp_target_kind::marginal_d:
            return flags.half_ok && flags.c_window_ok;
        case lp_target_kind::itt:
        case lp_target_kind::ate:
            return flags.overall_sharp;
        case lp_target_kind::late: {
            // Prop-5 conditions: Frechet window, c = 0, share of compliers
            // below the worst-case cap.
            const double fs = cell.p_d(1, 1) - cell.p_d(1, 0);
            return flags.frechet_ok && s.c == 0.0 && s.pi_def < 1.0 - fs;
        }
    }
    return false;
}

}  // namespace

ConformanceReport run_conformance(size_t num_cells, uint64_t seed, double containment_tol,
                                  double equality_tol) {
    ConformanceReport report;
    report.cells = num_cells;
    const auto targets = all_targets();

    for (size_t i = 0; i < num_cells; ++i) {
        SplitMix64 rng(stream_seed(seed, i));
        // Latent-consistent cells keep the sweep feasibility-rich; every
        // fourth draw is an unconstrained cell to stress containment.
        const ObservedCell cell =
            (i % 4 == 3) ? random_interior_cell(rng) : random_monotone_cell(rng);

        const double cap = std::min(cell.propensity, 1.0 - cell.propensity);
        // Every eighth case pins c = 0 so the Prop-5 sharpness branch runs.
        const double c = (i % 8 == 7) ? 0.0 : rng.uniform01() * 0.95 * cap;
        const double fre_lo = std::max(0.0, cell.p_d(1, 0) - cell.p_d(1, 1));
        const double fre_hi = std::min(cell.p_d(1, 0), cell.p_d(0, 1));
        const double pi =
            fre_hi > fre_lo ? fre_lo + rng.uniform01() * 0.95 * (fre_hi - fre_lo) : fre_lo;
        const SensitivityPoint s{c, pi};

        ObservedDistribution single;
        single.cells.emplace("x", cell);
        const SharpnessDiagnostics flags = sharpness_conditions(single, s);

        if (feasibility_check(cell, s)) ++report.feasible_cells;

        for (const auto& target : targets) {
            ConformanceCase cc;
            cc.id = i;
            cc.s = s;
            cc.target = target.name();
            cc.closed = closed_form_bounds(cell, s, target);
            try {
                cc.lp = sharp_bounds_lp(cell, s, target);
                cc.feasible = true;
            } catch (const error& e) {
                if (e.code() != "Infeasible") throw;
                cc.verdict = "infeasible";
                report.cases.push_back(cc);
                continue;
            }
            cc.contained = cc.closed.contains(cc.lp, containment_tol);
            cc.sharp_expected = sharpness_expected(target, flags, cell, s);
            cc.equal = std::fabs(cc.lp.lo - cc.closed.lo) <= equality_tol &&
                       std::fabs(cc.lp.hi - cc.closed.hi) <= equality_tol;
            if (!cc.contained) {
                cc.verdict = "violation";
                ++report.containment_violations;
            } else if (cc.sharp_expected && !cc.equal) {
                cc.verdict = "violation";
                ++report.equality_violations;
            } else {
                cc.verdict = cc.equal ? "sharp" : "contained";
            }
            report.cases.push_back(cc);
        }
    }
    return report;
}

}  // namespace breakfront
