#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "breakfront/model.hpp"

namespace breakfront {

// Raw counts behind one covariate cell's sample-analogue estimates.
struct CellCounts {
    std::array<std::array<int64_t, 4>, 2> n_yzd{};  // [z][yd_index]
    std::array<int64_t, 2> n_z{};
    int64_t n = 0;
};

enum class empty_arm_policy {
    abort,  // EmptyArm error naming the cell
    drop,   // drop the cell and renormalize weights
};

struct EstimateReport {
    ObservedDistribution dist;
    std::map<std::string, CellCounts> counts;
    std::vector<std::string> dropped_cells;
    double dropped_mass = 0.0;
};

// Sample-analogue cell probabilities: joint = n_yzd/n_z, propensity = n_z[1]/n,
// weight = n/N. Exact rational division at double precision.
ObservedDistribution estimate_cells(const Dataset& data,
                                    empty_arm_policy policy = empty_arm_policy::abort);
EstimateReport estimate_cells_report(const Dataset& data,
                                     empty_arm_policy policy = empty_arm_policy::abort);

struct CalibrationResult {
    double c_bar = 0.0;
    size_t strata_used = 0;
    size_t strata_skipped = 0;
    bool constant_column = false;  // SingleValueColumn: c_bar trivially 0
};

// Selection-on-observables calibration statistic for covariate column k:
// the largest gap between P(Z=1 | full covariates) and P(Z=1 | the rest).
CalibrationResult calibrate_c(const Dataset& data, size_t k);

// RFC-4180 CSV ingestion. Header row required; y/d/z columns must be 0/1
// (no coercion), covariate columns are kept verbatim.
struct CsvSpec {
    std::string y_column = "y";
    std::string d_column = "d";
    std::string z_column = "z";
    std::vector<std::string> covariate_columns;
};

Dataset read_csv_dataset(std::istream& in, const CsvSpec& spec);
Dataset load_csv_dataset(const std::string& path, const CsvSpec& spec);

std::vector<std::vector<std::string>> parse_csv(std::istream& in);

}  // namespace breakfront
