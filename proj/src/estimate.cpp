#include "breakfront/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace breakfront {

namespace {

std::map<std::string, CellCounts> count_cells(const Dataset& data) {
    std::map<std::string, CellCounts> counts;
    for (const auto& rec : data.records) {
        CellCounts& cc = counts[covariate_key(rec.x)];
        cc.n_yzd[rec.z][yd_index(rec.y, rec.d)] += 1;
        cc.n_z[rec.z] += 1;
        cc.n += 1;
    }
    return counts;
}

}  // namespace

EstimateReport estimate_cells_report(const Dataset& data, empty_arm_policy policy) {
    if (data.empty()) throw validation_error("EmptyData", "dataset has no records");

    EstimateReport report;
    report.counts = count_cells(data);

    int64_t kept_total = 0;
    for (const auto& [key, cc] : report.counts) {
        if (cc.n_z[0] == 0 || cc.n_z[1] == 0) {
            if (policy == empty_arm_policy::abort) {
                throw validation_error(
                    "EmptyArm", "cell '" + key + "' has no z=" +
                                    std::to_string(cc.n_z[0] == 0 ? 0 : 1) +
                                    " records; overlap fails in-sample");
            }
            report.dropped_cells.push_back(key);
            continue;
        }
        kept_total += cc.n;
    }
    if (kept_total == 0) {
        throw validation_error("EmptyArm", "every cell lost an arm; nothing to estimate");
    }

    const auto total = static_cast<double>(data.size());
    report.dropped_mass = (total - static_cast<double>(kept_total)) / total;
    for (const auto& [key, cc] : report.counts) {
        if (cc.n_z[0] == 0 || cc.n_z[1] == 0) continue;
        ObservedCell cell;
        for (int z = 0; z < 2; ++z) {
            for (int i = 0; i < 4; ++i) {
                cell.joint[z][i] =
                    static_cast<double>(cc.n_yzd[z][i]) / static_cast<double>(cc.n_z[z]);
            }
        }
        cell.propensity = static_cast<double>(cc.n_z[1]) / static_cast<double>(cc.n);
        cell.weight = static_cast<double>(cc.n) / static_cast<double>(kept_total);
        report.dist.cells.emplace(key, cell);
    }
    return report;
}

ObservedDistribution estimate_cells(const Dataset& data, empty_arm_policy policy) {
    return estimate_cells_report(data, policy).dist;
}

CalibrationResult calibrate_c(const Dataset& data, size_t k) {
    if (data.empty()) throw validation_error("EmptyData", "dataset has no records");
    if (k >= data.records.front().x.size()) {
        throw usage_error("pivot column index " + std::to_string(k) + " out of range");
    }

    // Counts per full stratum (x_k, x_-k) and per reduced stratum x_-k.
    struct ZCount {
        int64_t n = 0;
        int64_t n_z1 = 0;
    };
    std::map<std::string, ZCount> full;
    std::map<std::string, ZCount> rest;
    std::map<std::string, bool> pivot_values_seen;
    for (const auto& rec : data.records) {
        std::vector<std::string> others;
        others.reserve(rec.x.size() - 1);
        for (size_t i = 0; i < rec.x.size(); ++i) {
            if (i != k) others.push_back(rec.x[i]);
        }
        const std::string rest_key = covariate_key(others);
        const std::string full_key = rec.x[k] + std::string(1, kCovariateSeparator) + rest_key;
        full[full_key].n += 1;
        full[full_key].n_z1 += rec.z;
        rest[rest_key].n += 1;
        rest[rest_key].n_z1 += rec.z;
        pivot_values_seen[rec.x[k]] = true;
    }

    CalibrationResult result;
    if (pivot_values_seen.size() <= 1) {
        result.constant_column = true;
        result.strata_used = full.size();
        return result;  // SingleValueColumn: statistic is trivially 0
    }
    for (const auto& [full_key, fc] : full) {
        const auto sep = full_key.find(kCovariateSeparator);
        const std::string rest_key = full_key.substr(sep + 1);
        const ZCount& rc = rest.at(rest_key);
        if (fc.n == 0 || rc.n == 0) {
            result.strata_skipped += 1;
            continue;
        }
        const double p_full = static_cast<double>(fc.n_z1) / static_cast<double>(fc.n);
        const double p_rest = static_cast<double>(rc.n_z1) / static_cast<double>(rc.n);
        result.c_bar = std::max(result.c_bar, std::fabs(p_full - p_rest));
        result.strata_used += 1;
    }
    return result;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    char ch;
    while (in.get(ch)) {
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (!row.empty() || !field.empty() || field_started) {
                    row.push_back(std::move(field));
                    field.clear();
                    rows.push_back(std::move(row));
                    row.clear();
                }
                field_started = false;
                break;
            default:
                field.push_back(ch);
                break;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

int parse_binary(const std::string& value, const std::string& column, size_t line) {
    if (value == "0") return 0;
    if (value == "1") return 1;
    throw validation_error("NotBinary", "column '" + column + "' line " + std::to_string(line) +
                                            " has value '" + value + "'; expected 0 or 1");
}

size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw usage_error("column '" + name + "' not found in CSV header");
}

}  // namespace

Dataset read_csv_dataset(std::istream& in, const CsvSpec& spec) {
    auto rows = parse_csv(in);
    if (rows.empty()) throw validation_error("EmptyData", "CSV has no header row");
    if (spec.covariate_columns.empty()) {
        throw usage_error("at least one covariate column is required");
    }
    const auto& header = rows.front();
    const size_t yi = find_column(header, spec.y_column);
    const size_t di = find_column(header, spec.d_column);
    const size_t zi = find_column(header, spec.z_column);
    std::vector<size_t> xi;
    for (const auto& name : spec.covariate_columns) xi.push_back(find_column(header, name));

    Dataset data;
    data.records.reserve(rows.size() - 1);
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) {
            throw validation_error("BadRow", "line " + std::to_string(r + 1) + " has " +
                                                 std::to_string(row.size()) + " fields, header has " +
                                                 std::to_string(header.size()));
        }
        DatasetRecord rec;
        rec.y = parse_binary(row[yi], spec.y_column, r + 1);
        rec.d = parse_binary(row[di], spec.d_column, r + 1);
        rec.z = parse_binary(row[zi], spec.z_column, r + 1);
        rec.x.reserve(xi.size());
        for (size_t i : xi) rec.x.push_back(row[i]);
        data.records.push_back(std::move(rec));
    }
    if (data.empty()) throw validation_error("EmptyData", "CSV has no data rows");
    return data;
}

Dataset load_csv_dataset(const std::string& path, const CsvSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open CSV file '" + path + "'");
    return read_csv_dataset(in, spec);
}

}  // namespace breakfront
