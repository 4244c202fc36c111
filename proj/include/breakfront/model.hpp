#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace breakfront {

// Error taxonomy shared by the library and mapped to CLI exit codes.
enum class errc {
    usage,       // bad flags / malformed request
    validation,  // data fails the model invariants
    numeric,     // infeasible LP, grid outside regime, ...
};

class error : public std::runtime_error {
  public:
    error(errc kind, std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), kind_(kind), code_(std::move(code)) {}
    errc kind() const { return kind_; }
    const std::string& code() const { return code_; }

  private:
    errc kind_;
    std::string code_;
};

inline error validation_error(const std::string& code, const std::string& what) {
    return error(errc::validation, code, what);
}
inline error numeric_error(const std::string& code, const std::string& what) {
    return error(errc::numeric, code, what);
}
inline error usage_error(const std::string& what) { return error(errc::usage, "Usage", what); }

// Closed interval [lo, hi]; the carrier for every identified set.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    bool contains(const Interval& other, double tol = 0.0) const {
        return other.lo >= lo - tol && other.hi <= hi + tol;
    }
};

// Fixed (y,d) storage order: (1,1), (1,0), (0,1), (0,0).
inline constexpr int yd_index(int y, int d) { return (1 - y) * 2 + (1 - d); }

// Conditional law of (Y, D, Z) in one covariate cell plus the cell weight.
// joint[z][yd_index(y,d)] = P(Y=y, D=d | Z=z, X=x).
struct ObservedCell {
    std::array<std::array<double, 4>, 2> joint{};
    double propensity = 0.5;  // P(Z=1|X=x)
    double weight = 1.0;      // q_x

    double p(int y, int d, int z) const { return joint[z][yd_index(y, d)]; }
    double arm(int z) const { return z == 1 ? propensity : 1.0 - propensity; }
    // P(Y=y|Z=z,x) and P(D=d|Z=z,x)
    double p_y(int y, int z) const { return p(y, 1, z) + p(y, 0, z); }
    double p_d(int d, int z) const { return p(1, d, z) + p(0, d, z); }
};

struct ObservedDistribution {
    std::map<std::string, ObservedCell> cells;  // ordered: stable key order everywhere
};

// The pair (c, pi_def) parametrizing independence and monotonicity violations.
struct SensitivityPoint {
    double c = 0.0;
    double pi_def = 0.0;
};

enum class target_param { itt, late };

// A conclusion "target >= mu" whose robustness is being assessed.
struct FrontierQuery {
    target_param target = target_param::late;
    double mu = 0.0;
};

// Raw micro-data record; x holds the covariate column values.
struct DatasetRecord {
    int y = 0;
    int d = 0;
    int z = 0;
    std::vector<std::string> x;
};

// Covariate keys are opaque strings: raw column values joined by a reserved
// separator. The math never inspects them.
inline constexpr char kCovariateSeparator = '\x1f';
std::string covariate_key(const std::vector<std::string>& columns);

struct Dataset {
    std::vector<DatasetRecord> records;

    size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    std::string key_of(size_t i) const { return covariate_key(records[i].x); }
};

// Checks all type invariants. Normalization drift at ulp scale (<= 1e-12) is
// repaired in place; drift above 1e-9 rejects. Idempotent bit-for-bit.
ObservedDistribution validate(ObservedDistribution dist, bool strict = false);

void validate_sensitivity(const SensitivityPoint& s);
// Assumption-7 regime check: c < min over cells of min(p_z, 1-p_z).
double assumption7_cap(const ObservedDistribution& dist);

// JSON document round-trip, fixed layout:
// {"cells": {key: {"joint": [[z=0 four-vector],[z=1 four-vector]],
//                  "propensity": p, "weight": q}}}
std::string distribution_to_json(const ObservedDistribution& dist, int indent = 2);
ObservedDistribution distribution_from_json(const std::string& text);
ObservedDistribution load_distribution(const std::string& path);
void save_distribution(const ObservedDistribution& dist, const std::string& path);

}  // namespace breakfront
