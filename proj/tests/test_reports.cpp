#include "qrt/reports.hpp"
#include "fixtures.hpp"

#include <catch2/catch.hpp>

#include <sstream>

using namespace qrt;

namespace {

RunReport small_price_run(std::uint64_t seed) {
    const GridSpec grid = fixtures::price_grid();
    const ObjectiveFunction f = make_objective("price");
    ThresholdSchedule sched;
    sched.thresholds = {20, 5, 1, 0.2, 0.05, 0.01};
    sched.f_min_est = -1.0;
    sched.f_max_est = 60.0;
    RunConfig cfg;
    cfg.step.seed = seed;
    cfg.shots = 256;
    return run_multistep(f, grid, sched, cfg);
}

} // namespace

TEST_CASE("run report JSON") {
    const RunReport report = small_price_run(12);
    nlohmann::ordered_json j = run_report_to_json(report);

    SECTION("schema fields") {
        for (const char* key : {"function", "grid", "schedule", "levels", "steps", "samples",
                                "best_point", "best_value", "seed", "timing"})
            REQUIRE(j.contains(key));
        CHECK(j["function"] == "price");
        CHECK(j["grid"]["state_count"] == 40401);
        REQUIRE(j["steps"].size() == 6);
        for (const auto& step : j["steps"])
            for (const char* key :
                 {"d", "n_i", "m_i", "e0", "g0", "t_i", "repeats", "p0_analytic", "p0_empirical"})
                REQUIRE(step.contains(key));
    }
    SECTION("reproducible modulo the timing object") {
        nlohmann::ordered_json a = run_report_to_json(report);
        nlohmann::ordered_json b = run_report_to_json(small_price_run(12));
        a.erase("timing");
        b.erase("timing");
        CHECK(a.dump() == b.dump());
    }
    SECTION("seed changes the sample draw") {
        nlohmann::ordered_json a = run_report_to_json(report);
        nlohmann::ordered_json b = run_report_to_json(small_price_run(13));
        a.erase("timing");
        b.erase("timing");
        CHECK(a.dump() != b.dump());
    }
}

TEST_CASE("trace and schedule CSVs") {
    const RunReport report = small_price_run(5);

    std::ostringstream trace;
    write_trace_csv(report, trace);
    const std::string t = trace.str();
    CHECK(t.rfind("i,d,n_i,m_i,e0,g0,t_i,repeats,p0_analytic,p0_empirical\n", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 6);

    std::ostringstream sched;
    write_schedule_csv(report.levels, report.schedule, sched);
    const std::string s = sched.str();
    CHECK(s.rfind("i,d_i,n_i,m_i,rate,a,b,c1,c2,c3\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 6);
    CHECK(s.find("\r") == std::string::npos);
}

TEST_CASE("histogram CSV") {
    GridSpec g({{0, 1}}, 101);
    ObjectiveFunction f{"ramp", 1, g.axes, [](std::span<const double> x) { return x[0]; }};
    const Histogram h = build_histogram(f, g, 0.25, 0.0, 1.0);
    std::ostringstream out;
    write_histogram_csv(h, out);
    const std::string text = out.str();
    CHECK(text.rfind("bin_lo,count\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4);
}

TEST_CASE("float formatting is fixed at 17 significant digits") {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(fmt17(2.0) == "2");
    CHECK(fmt17(-0.05) == "-0.050000000000000003");
}
