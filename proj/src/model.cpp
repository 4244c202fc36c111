#include "breakfront/model.hpp"

#include <cfloat>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace breakfront {

namespace {

constexpr double kRepairDrift = 1e-12;   // at or below: renormalize
constexpr double kRejectDrift = 1e-9;    // above: not a distribution
constexpr double kUlpDrift = 8 * DBL_EPSILON;

double sum4(const std::array<double, 4>& v) {
    return ((v[0] + v[1]) + v[2]) + v[3];
}

// Renormalizes v so that a recomputed sum lands within ulp of 1; no-op when
// already there, which keeps validate(validate(d)) bitwise equal.
void renormalize(std::array<double, 4>& v) {
    double s = sum4(v);
    if (std::fabs(s - 1.0) <= kUlpDrift) return;
    for (double& e : v) e /= s;
}

}  // namespace

std::string covariate_key(const std::vector<std::string>& columns) {
    std::string key;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) key.push_back(kCovariateSeparator);
        key += columns[i];
    }
    return key;
}

ObservedDistribution validate(ObservedDistribution dist, bool strict) {
    if (dist.cells.empty()) {
        throw validation_error("NotADistribution", "distribution has no cells");
    }
    double weight_sum = 0.0;
    for (auto& [key, cell] : dist.cells) {
        if (!(cell.propensity > 0.0) || !(cell.propensity < 1.0)) {
            throw validation_error(
                "EmptyCell", "cell '" + key + "' has propensity " +
                                 std::to_string(cell.propensity) + "; both arms must be reachable");
        }
        if (!(cell.weight >= 0.0) || cell.weight > 1.0 + kRejectDrift) {
            throw validation_error("NotADistribution",
                                   "cell '" + key + "' has weight outside [0,1]");
        }
        if (cell.weight == 0.0) {
            throw validation_error("EmptyCell", "cell '" + key + "' has zero weight");
        }
        weight_sum += cell.weight;
        for (int z = 0; z < 2; ++z) {
            for (double e : cell.joint[z]) {
                if (!(e >= 0.0) || e > 1.0 + kRejectDrift) {
                    throw validation_error("NotADistribution",
                                           "cell '" + key + "' z=" + std::to_string(z) +
                                               " has entry outside [0,1]");
                }
                if (strict && (e <= 0.0 || e >= 1.0)) {
                    throw validation_error("InteriorViolation",
                                           "cell '" + key + "' z=" + std::to_string(z) +
                                               " has boundary entry " + std::to_string(e) +
                                               " in strict-interior mode");
                }
            }
            double drift = std::fabs(sum4(cell.joint[z]) - 1.0);
            if (drift > kRejectDrift) {
                throw validation_error("NotADistribution",
                                       "cell '" + key + "' z=" + std::to_string(z) +
                                           " slice sums to 1 with drift " + std::to_string(drift));
            }
            if (drift <= kRepairDrift) renormalize(cell.joint[z]);
        }
    }
    double wdrift = std::fabs(weight_sum - 1.0);
    if (wdrift > kRejectDrift) {
        throw validation_error("NotADistribution",
                               "cell weights sum to " + std::to_string(weight_sum));
    }
    if (wdrift > kUlpDrift && wdrift <= kRepairDrift) {
        for (auto& [key, cell] : dist.cells) cell.weight /= weight_sum;
    }
    return dist;
}

void validate_sensitivity(const SensitivityPoint& s) {
    if (!(s.c >= 0.0 && s.c <= 1.0)) {
        throw validation_error("BadSensitivity", "c must lie in [0,1]");
    }
    if (!(s.pi_def >= 0.0 && s.pi_def <= 1.0)) {
        throw validation_error("BadSensitivity", "pi_def must lie in [0,1]");
    }
}

double assumption7_cap(const ObservedDistribution& dist) {
    double cap = 1.0;
    for (const auto& [key, cell] : dist.cells) {
        cap = std::min(cap, std::min(cell.propensity, 1.0 - cell.propensity));
    }
    return cap;
}

std::string distribution_to_json(const ObservedDistribution& dist, int indent) {
    nlohmann::ordered_json cells;
    for (const auto& [key, cell] : dist.cells) {
        nlohmann::ordered_json jc;
        jc["joint"] = {cell.joint[0], cell.joint[1]};
        jc["propensity"] = cell.propensity;
        jc["weight"] = cell.weight;
        cells[key] = jc;
    }
    nlohmann::ordered_json doc;
    doc["cells"] = cells;
    return doc.dump(indent);
}

ObservedDistribution distribution_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("NotADistribution", std::string("bad JSON: ") + e.what());
    }
    if (!doc.contains("cells") || !doc["cells"].is_object()) {
        throw validation_error("NotADistribution", "missing 'cells' object");
    }
    ObservedDistribution dist;
    for (const auto& [key, jc] : doc["cells"].items()) {
        ObservedCell cell;
        try {
            const auto& joint = jc.at("joint");
            for (int z = 0; z < 2; ++z) {
                for (int i = 0; i < 4; ++i) cell.joint[z][i] = joint.at(z).at(i).get<double>();
            }
            cell.propensity = jc.at("propensity").get<double>();
            cell.weight = jc.at("weight").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw validation_error("NotADistribution",
                                   "cell '" + key + "': " + e.what());
        }
        dist.cells.emplace(key, cell);
    }
    return dist;
}

ObservedDistribution load_distribution(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open distribution file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return distribution_from_json(buf.str());
}

void save_distribution(const ObservedDistribution& dist, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw usage_error("cannot write distribution file '" + path + "'");
    out << distribution_to_json(dist) << "\n";
}

}  // namespace breakfront
