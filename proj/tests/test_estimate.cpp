#include <cmath>
#include <sstream>

#include "breakfront/bounds.hpp"
#include "breakfront/estimate.hpp"
#include "breakfront/rng.hpp"
#include "breakfront/simulate.hpp"
#include "doctest.h"

using namespace breakfront;

namespace {

DatasetRecord rec(int y, int d, int z, std::string x) { return {y, d, z, {std::move(x)}}; }

}  // namespace

TEST_CASE("two-record bookkeeping") {
    Dataset data;
    data.records = {rec(1, 1, 1, "a"), rec(0, 0, 0, "a")};
    const ObservedDistribution dist = estimate_cells(data);
    REQUIRE(dist.cells.size() == 1);
    const ObservedCell& cell = dist.cells.at("a");
    CHECK(cell.p(1, 1, 1) == 1.0);
    CHECK(cell.p(0, 0, 0) == 1.0);
    CHECK(cell.propensity == 0.5);
    CHECK(cell.weight == 1.0);
}

TEST_CASE("cells without a z arm abort by default and name the cell") {
    Dataset data;
    data.records = {rec(1, 1, 1, "a"), rec(0, 0, 0, "a"), rec(1, 0, 0, "b")};
    CHECK_THROWS_WITH_AS(estimate_cells(data), doctest::Contains("'b'"), error);
    SUBCASE("drop policy removes the cell and renormalizes") {
        const EstimateReport report = estimate_cells_report(data, empty_arm_policy::drop);
        CHECK(report.dist.cells.size() == 1);
        CHECK(report.dropped_cells == std::vector<std::string>{"b"});
        CHECK(report.dropped_mass == doctest::Approx(1.0 / 3).epsilon(1e-12));
        CHECK(report.dist.cells.at("a").weight == 1.0);
    }
}

TEST_CASE("estimates always pass non-strict validation") {
    SplitMix64 rng(3);
    const ObservedDistribution dgp = appendix_c_dgp();
    for (int i = 0; i < 5; ++i) {
        const Dataset data = draw_sample(dgp, 400, rng);
        CHECK_NOTHROW(validate(estimate_cells(data)));
    }
}

TEST_CASE("estimated ITT point lands near the truth at N=1e5") {
    SplitMix64 rng(12345);
    const Dataset data = draw_sample(appendix_c_dgp(), 100000, rng);
    const ObservedDistribution est = estimate_cells(data);
    const Interval itt = itt_bounds(est, {0.0, 0.0});
    // se of the reduced form is about sqrt(0.5/N) ~ 0.0022
    CHECK(std::fabs(itt.lo - 0.25) < 3 * 0.0025);
}

TEST_CASE("plug-in consistency across replications") {
    // At N=1e5, every cell probability within 0.01 of truth in >= 99 of 100
    // replications.
    const ObservedDistribution dgp = appendix_c_dgp();
    int ok = 0;
    for (int repl = 0; repl < 100; ++repl) {
        SplitMix64 rng(stream_seed(777, repl));
        const ObservedDistribution est = estimate_cells(draw_sample(dgp, 100000, rng));
        bool all_close = est.cells.size() == dgp.cells.size();
        for (const auto& [key, cell] : dgp.cells) {
            if (!all_close) break;
            const ObservedCell& e = est.cells.at(key);
            for (int z = 0; z < 2; ++z) {
                for (int j = 0; j < 4; ++j) {
                    if (std::fabs(e.joint[z][j] - cell.joint[z][j]) > 0.01) all_close = false;
                }
            }
            if (std::fabs(e.propensity - cell.propensity) > 0.01) all_close = false;
            if (std::fabs(e.weight - cell.weight) > 0.01) all_close = false;
        }
        ok += all_close;
    }
    CHECK(ok >= 99);
}

TEST_CASE("calibration statistic") {
    SUBCASE("exact balance gives zero") {
        Dataset data;
        // Z split 50/50 inside every (x0, x1) stratum.
        for (int x0 = 0; x0 < 2; ++x0) {
            for (int x1 = 0; x1 < 2; ++x1) {
                for (int z = 0; z < 2; ++z) {
                    for (int n = 0; n < 5; ++n) {
                        data.records.push_back(
                            {0, 0, z, {std::to_string(x0), std::to_string(x1)}});
                    }
                }
            }
        }
        const CalibrationResult r = calibrate_c(data, 0);
        CHECK(r.c_bar == doctest::Approx(0.0).epsilon(1e-15));
        CHECK_FALSE(r.constant_column);
    }
    SUBCASE("constructed imbalance of 0.6 vs 0.5 gives 0.05") {
        Dataset data;
        auto add = [&](int xk, int z, int count) {
            for (int n = 0; n < count; ++n) data.records.push_back({0, 0, z, {std::to_string(xk), "s"}});
        };
        add(1, 1, 600);
        add(1, 0, 400);
        add(0, 1, 500);
        add(0, 0, 500);
        const CalibrationResult r = calibrate_c(data, 0);
        CHECK(r.c_bar == doctest::Approx(0.05).epsilon(1e-12));
        CHECK(r.strata_used == 2);
    }
    SUBCASE("constant pivot column warns and returns zero") {
        Dataset data;
        data.records = {{0, 0, 1, {"same", "a"}}, {0, 0, 0, {"same", "b"}}};
        const CalibrationResult r = calibrate_c(data, 0);
        CHECK(r.constant_column);
        CHECK(r.c_bar == 0.0);
    }
    SUBCASE("c_bar is never negative") {
        SplitMix64 rng(9);
        Dataset data;
        for (int i = 0; i < 500; ++i) {
            data.records.push_back({0, 0, static_cast<int>(rng.below(2)),
                                    {std::to_string(rng.below(3)), std::to_string(rng.below(2))}});
        }
        CHECK(calibrate_c(data, 0).c_bar >= 0.0);
        CHECK(calibrate_c(data, 1).c_bar >= 0.0);
    }
}

TEST_CASE("CSV ingestion") {
    SUBCASE("header, quoting, and column selection") {
        std::istringstream in(
            "y,d,z,region,\"age group\"\n"
            "1,1,1,\"north,west\",a\n"
            "0,0,0,\"has \"\"quotes\"\"\",b\n");
        CsvSpec spec;
        spec.covariate_columns = {"region", "age group"};
        const Dataset data = read_csv_dataset(in, spec);
        REQUIRE(data.size() == 2);
        CHECK(data.records[0].x[0] == "north,west");
        CHECK(data.records[1].x[0] == "has \"quotes\"");
        CHECK(data.records[0].y == 1);
        CHECK(data.records[1].z == 0);
    }
    SUBCASE("non-binary outcome is a hard error, never coerced") {
        std::istringstream in("y,d,z,x\n2,0,1,a\n");
        CsvSpec spec;
        spec.covariate_columns = {"x"};
        CHECK_THROWS_WITH_AS(read_csv_dataset(in, spec), doctest::Contains("NotBinary"),
                             error);
    }
    SUBCASE("missing column is a usage error") {
        std::istringstream in("y,d,z\n1,0,1\n");
        CsvSpec spec;
        spec.covariate_columns = {"x"};
        CHECK_THROWS_AS(read_csv_dataset(in, spec), error);
    }
    SUBCASE("ragged row rejected") {
        std::istringstream in("y,d,z,x\n1,0,1\n");
        CsvSpec spec;
        spec.covariate_columns = {"x"};
        CHECK_THROWS_WITH_AS(read_csv_dataset(in, spec), doctest::Contains("BadRow"), error);
    }
    SUBCASE("CRLF and trailing newline handling") {
        std::istringstream in("y,d,z,x\r\n1,1,1,a\r\n0,0,0,a\r\n");
        CsvSpec spec;
        spec.covariate_columns = {"x"};
        CHECK(read_csv_dataset(in, spec).size() == 2);
    }
}
