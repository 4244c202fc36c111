#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "breakfront/bounds.hpp"
#include "breakfront/model.hpp"
#include "breakfront/simplex.hpp"

namespace breakfront {

// Joint pmf over the 16 response types t = (d1,d0,y1,y0) and the assignment
// arm z; q[t*2+z] = P(T=t, Z=z). The LP's decision variables.
struct LatentModel {
    std::array<double, 32> q{};

    static constexpr int type_index(int d1, int d0, int y1, int y0) {
        return d1 * 8 + d0 * 4 + y1 * 2 + y0;
    }
    static constexpr int var(int t, int z) { return t * 2 + z; }

    double mass(int t) const { return q[var(t, 0)] + q[var(t, 1)]; }
    double group_share(int d1, int d0) const;  // sum over outcome types
    ObservedCell push_forward() const;         // implied observables
};

enum class lp_target_kind { joint, marginal_y, marginal_d, itt, ate, late };

struct LpTarget {
    lp_target_kind kind = lp_target_kind::ate;
    int y = 1;
    int d = 1;
    int z = 1;

    static LpTarget joint(int y, int d, int z) { return {lp_target_kind::joint, y, d, z}; }
    static LpTarget marginal_y(int y, int z) { return {lp_target_kind::marginal_y, y, 1, z}; }
    static LpTarget marginal_d(int d, int z) { return {lp_target_kind::marginal_d, 1, d, z}; }
    static LpTarget itt() { return {lp_target_kind::itt}; }
    static LpTarget ate() { return {lp_target_kind::ate}; }
    static LpTarget late() { return {lp_target_kind::late}; }

    std::string name() const;
};

// Linear system over the 32 latent variables: observational match, the
// c-dependence band for both potential pairs, the exact defier share, and
// the complier-majority inequality (strict form adds a 1e-9 slack). The
// defier-share block can be dropped to obtain the polytope under the
// dependence assumptions alone, which is the model class the potential
// probability bounds are defined against.
DenseLP build_constraints(const ObservedCell& cell, const SensitivityPoint& s,
                          bool strict_defiers = false, bool with_defier_share = true);

std::optional<LatentModel> feasibility_check(const ObservedCell& cell,
                                             const SensitivityPoint& s,
                                             bool strict_defiers = false);

// Sharp identified set by LP over the latent polytope; LATE solved by
// bisection on the ratio. Joint and marginal targets are solved on the
// dependence-only polytope (those parameters are defined without reference
// to the defier share); effect targets keep the full system. Throws
// errc::numeric "Infeasible" when the (cell, s) pair admits no latent model.
Interval sharp_bounds_lp(const ObservedCell& cell, const SensitivityPoint& s,
                         const LpTarget& target, bool strict_defiers = false);

// Closed-form counterpart of an LP target, for conformance checks.
Interval closed_form_bounds(const ObservedCell& cell, const SensitivityPoint& s,
                            const LpTarget& target);

std::string latent_model_to_json(const LatentModel& model, int indent = 2);

// The conformance sweep behind `breakfront oracle --conformance` and the
// acceptance gate: random cells x random (c, pi) with c under the
// Assumption-7 cap and pi inside the Frechet window.
struct ConformanceCase {
    uint64_t id = 0;
    SensitivityPoint s;
    std::string target;
    bool feasible = false;
    Interval lp;
    Interval closed;
    bool contained = false;
    bool sharp_expected = false;  // the relevant sharpness flags hold
    bool equal = false;
    std::string verdict;  // "infeasible" | "contained" | "sharp" | "violation"
};

struct ConformanceReport {
    std::vector<ConformanceCase> cases;
    size_t cells = 0;
    size_t feasible_cells = 0;
    size_t containment_violations = 0;
    size_t equality_violations = 0;
};

ConformanceReport run_conformance(size_t num_cells, uint64_t seed,
                                  double containment_tol = 1e-7,
                                  double equality_tol = 1e-7);

}  // namespace breakfront
