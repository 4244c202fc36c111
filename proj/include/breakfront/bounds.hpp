#pragma once

#include <map>
#include <string>

#include "breakfront/model.hpp"

namespace breakfront {

// Per-condition sharpness checks for the ITT/ATE identified sets; each flag
// is the conjunction over all cells (and all (y,d,z) where applicable).
struct SharpnessDiagnostics {
    bool frechet_ok = false;    // (i)  pi_def inside the Frechet window
    bool half_ok = false;       // (ii) every p_{y,d|z,x} < 1/2
    bool c_window_ok = false;   // (iii) c inside the open interior window
    bool pi_window_ok = false;  // (iv) pi_def inside the no-truncation window
    bool overall_sharp = false;
};

// Identified set for P(Y(D(z))=y, D(z)=d | X=x), unconditional in Z.
// Collapses to p_{y,d|z,x} at c=0 and to the worst-case band at c=1.
Interval joint_potential_bounds(const ObservedCell& cell, int y, int d, int z, double c);

// Identified set for P(Y(D(z))=y | X=x).
Interval marginal_outcome_bounds(const ObservedCell& cell, int y, int z, double c);

// Identified set for P(D(z)=d | X=x).
Interval marginal_treatment_bounds(const ObservedCell& cell, int d, int z, double c);

// Conditional-on-cell identified sets.
Interval itt_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s);
Interval complier_share_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s);
Interval ate_bounds_cell(const ObservedCell& cell, const SensitivityPoint& s);

// Aggregated over covariate cells with weights q_x; the same defier share is
// applied in every cell. The map overloads accept a per-cell share.
Interval itt_bounds(const ObservedDistribution& dist, const SensitivityPoint& s);
Interval complier_share_bounds(const ObservedDistribution& dist, const SensitivityPoint& s);
Interval late_bounds(const ObservedDistribution& dist, const SensitivityPoint& s);
Interval ate_bounds(const ObservedDistribution& dist, const SensitivityPoint& s);

using PiDefMap = std::map<std::string, double>;
Interval itt_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def);
Interval complier_share_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def);
Interval late_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def);
Interval ate_bounds(const ObservedDistribution& dist, double c, const PiDefMap& pi_def);

// ATE bounds in the absence of violations (c=0, pi_def=0), classic form.
Interval balke_pearl_bounds(const ObservedCell& cell);

SharpnessDiagnostics sharpness_conditions(const ObservedDistribution& dist,
                                          const SensitivityPoint& s);

}  // namespace breakfront
