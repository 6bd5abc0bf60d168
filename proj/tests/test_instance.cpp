#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dri/instance.hpp"
#include "dri/oracles.hpp"
#include "dri/rng.hpp"
#include "dri/synthetic.hpp"
#include "helpers.hpp"

using namespace dri;

namespace {

    const std::string kToyText = R"(toy_2

VEHICLE
NUMBER     CAPACITY
  3        100

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME

    0    40    50    0    0    500    0
    1    43    54    10    100    200    15
    2    45    50    8    50    300    20
)";

}  // namespace

TEST_CASE("parse_instance reads the benchmark text layout") {
    const Instance instance = parse_instance(kToyText);
    CHECK(instance.name == "toy_2");
    CHECK(instance.fleet_size == 3);
    CHECK(instance.capacity == 100.0);
    CHECK(instance.customers() == 2);
    CHECK(instance.depot().x == 40.0);
    CHECK(instance.depot().due == 500.0);
    CHECK(instance.horizon() == 500.0);
    CHECK(instance.vertex(1).demand == 10.0);
    CHECK(instance.vertex(1).ready == 100.0);
    CHECK(instance.vertex(2).service == 20.0);
    CHECK(instance.total_demand() == 18.0);

    // Distances: Euclidean, symmetric, zero diagonal.
    CHECK(instance.cost(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(instance.cost(1, 2) == doctest::Approx(std::sqrt(4.0 + 16.0)).epsilon(1e-12));
    CHECK(instance.cost(1, 2) == instance.cost(2, 1));
    CHECK(instance.cost(1, 1) == 0.0);
    CHECK(instance.travel_time(0, 2) == instance.cost(0, 2));
}

TEST_CASE("parse_instance tolerates row order, CRLF endings and extra blanks") {
    std::string shuffled = "x\r\n\r\nVEHICLE\r\nNUMBER CAPACITY\r\n 2 50\r\n\r\nCUSTOMER\r\nheader row\r\n\r\n";
    shuffled += "2 1 1 5 0 90 4\r\n0 0 0 0 0 100 0\r\n\r\n1 2 2 5 0 90 4\r\n";
    const Instance instance = parse_instance(shuffled);
    CHECK(instance.customers() == 2);
    CHECK(instance.vertex(1).x == 2.0);
    CHECK(instance.vertex(2).x == 1.0);
}

TEST_CASE("parse_instance rejects malformed input with line numbers") {
    CHECK_THROWS_AS(parse_instance(""), ParseError);

    // Wrong column count in a customer row.
    const std::string short_row = "x\nVEHICLE\nh\n1 10\nCUSTOMER\nh\n0 0 0 0 0 10 0\n1 1 1 1 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(short_row),
                         doctest::Contains("expected 7 columns"), ParseError);
    try {
        parse_instance(short_row);
    } catch (const ParseError& e) {
        CHECK(e.line == 8);
    }

    // Inverted time window.
    const std::string inverted = "x\nVEHICLE\nh\n1 10\nCUSTOMER\nh\n0 0 0 0 0 10 0\n1 1 1 1 9 3 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(inverted), doctest::Contains("inverted"), ParseError);

    // Duplicate and out-of-range vertex ids.
    const std::string duplicate = "x\nVEHICLE\nh\n1 10\nCUSTOMER\nh\n0 0 0 0 0 10 0\n1 1 1 1 0 9 0\n1 2 2 1 0 9 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(duplicate), doctest::Contains("duplicate"), ParseError);
    const std::string gap = "x\nVEHICLE\nh\n1 10\nCUSTOMER\nh\n0 0 0 0 0 10 0\n5 1 1 1 0 9 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(gap), doctest::Contains("out of range"), ParseError);

    // Non-numeric fields and missing sections.
    const std::string text_field = "x\nVEHICLE\nh\n1 ten\nCUSTOMER\nh\n0 0 0 0 0 10 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(text_field), doctest::Contains("non-numeric"), ParseError);
    CHECK_THROWS_AS(parse_instance("x\nCUSTOMER\nh\n0 0 0 0 0 10 0\n"), ParseError);

    // Demand beyond the vehicle capacity is rejected at finalize time.
    const std::string heavy = "x\nVEHICLE\nh\n1 10\nCUSTOMER\nh\n0 0 0 0 0 10 0\n1 1 1 11 0 9 0\n";
    CHECK_THROWS_WITH_AS(parse_instance(heavy), doctest::Contains("exceeds capacity"), ParseError);
}

TEST_CASE("finalize validates the depot and applies distance conventions") {
    // Depot with service time is invalid.
    CHECK_THROWS_AS(fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 10, 5),
                                       fixture::vertex(1, 1, 0, 1, 0, 10, 0)},
                                      1, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 10, 0)}, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 10, 0)}, 1, 0), std::invalid_argument);

    // sqrt(2) = 1.4142... under the three conventions.
    auto diag = [](DistanceConvention convention) {
        return fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 10, 0), fixture::vertex(1, 1, 1, 1, 0, 10, 0)},
                                 1, 10, convention)
            .cost(0, 1);
    };
    CHECK(diag(DistanceConvention::exact) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(diag(DistanceConvention::round_2_decimals) == 1.41);
    CHECK(diag(DistanceConvention::truncate_1_decimal) == 1.4);
}

TEST_CASE("instance text round trip preserves every field bit for bit") {
    SyntheticSpec spec;
    spec.customers = 25;
    spec.seed = 11;
    const Instance original = synthetic_instance(spec);
    const Instance reparsed = parse_instance(instance_to_text(original));

    CHECK(reparsed.name == original.name);
    CHECK(reparsed.fleet_size == original.fleet_size);
    CHECK(reparsed.capacity == original.capacity);
    REQUIRE(reparsed.size() == original.size());
    for (int i = 0; i < original.size(); ++i) {
        CAPTURE(i);
        CHECK(reparsed.vertex(i).x == original.vertex(i).x);
        CHECK(reparsed.vertex(i).y == original.vertex(i).y);
        CHECK(reparsed.vertex(i).demand == original.vertex(i).demand);
        CHECK(reparsed.vertex(i).ready == original.vertex(i).ready);
        CHECK(reparsed.vertex(i).due == original.vertex(i).due);
        CHECK(reparsed.vertex(i).service == original.vertex(i).service);
    }
    for (int i = 0; i < original.size(); ++i)
        for (int j = 0; j < original.size(); ++j) CHECK(reparsed.cost(i, j) == original.cost(i, j));
}

TEST_CASE("propagate_schedule follows the forward recursion") {
    // Travel 5 to a customer that opens at 10: the vehicle waits.
    const Instance one = fixture::instance(
        {fixture::vertex(0, 0, 0, 0, 0, 100, 0), fixture::vertex(1, 3, 4, 2, 10, 50, 7)}, 1, 10);
    const ScheduleResult res = propagate_schedule(one, {1});
    REQUIRE(res.feasible());
    CHECK(res.route->start[0] == 10.0);
    CHECK(res.route->distance == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(res.route->depot_return == doctest::Approx(22.0).epsilon(1e-12));
    CHECK(res.route->load == 2.0);

    // Chained service: start_2 = max(e_2, T_1 + s_1 + t_12).
    const Instance two = fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 100, 0),
                                            fixture::vertex(1, 3, 4, 2, 10, 50, 7),
                                            fixture::vertex(2, 6, 8, 3, 0, 50, 1)},
                                           1, 10);
    const ScheduleResult chained = propagate_schedule(two, {1, 2});
    REQUIRE(chained.feasible());
    CHECK(chained.route->start[1] == doctest::Approx(10.0 + 7.0 + 5.0).epsilon(1e-12));

    // Empty visit sequence: trivially feasible, zero distance.
    const ScheduleResult empty = propagate_schedule(one, {});
    REQUIRE(empty.feasible());
    CHECK(empty.route->distance == 0.0);
    CHECK(empty.route->load == 0.0);
}

TEST_CASE("propagate_schedule reports the first violation") {
    const Instance instance = fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 25, 0),
                                                 fixture::vertex(1, 3, 4, 6, 0, 50, 2),
                                                 fixture::vertex(2, 6, 8, 6, 0, 4, 2)},
                                                2, 10);

    // Customer 2 closes at 4 but cannot be reached before t = 10.
    const ScheduleResult window = propagate_schedule(instance, {2});
    REQUIRE_FALSE(window.feasible());
    CHECK(window.reason->kind == Infeasibility::Kind::time_window);
    CHECK(window.reason->position == 0);
    CHECK(window.reason->customer == 2);
    CHECK(window.reason->message() == "time window violated at visit 0 (customer 2)");

    // Two demands of 6 overflow capacity 10 at the second visit.
    const ScheduleResult heavy = propagate_schedule(instance, {1, 2});
    REQUIRE_FALSE(heavy.feasible());
    CHECK(heavy.reason->kind == Infeasibility::Kind::capacity);
    CHECK(heavy.reason->position == 1);

    // Depot closes at 25; serving customer 1 returns at 12, but a due date
    // tweak pushes the return past closing.
    const Instance late = fixture::instance({fixture::vertex(0, 0, 0, 0, 0, 12, 0),
                                             fixture::vertex(1, 3, 4, 6, 8, 50, 2)},
                                            1, 10);
    const ScheduleResult ret = propagate_schedule(late, {1});
    REQUIRE_FALSE(ret.feasible());
    CHECK(ret.reason->kind == Infeasibility::Kind::depot_closing);
    CHECK(ret.reason->position == -1);
    CHECK(ret.reason->message() == "depot closing time missed on the return leg");
}

TEST_CASE("propagate_schedule agrees with the independent schedule walk") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticSpec spec;
        spec.customers = 8;
        spec.seed = seed;
        spec.window_min = 20.0;
        spec.window_max = 60.0;
        const Instance instance = synthetic_instance(spec);
        rng::SplitMix64 random(rng::derive(seed, 0x7465737455ULL));

        for (int trial = 0; trial < 20; ++trial) {
            std::vector<int> visits;
            for (int id = 1; id <= spec.customers; ++id)
                if (random.next_double() < 0.5) visits.push_back(id);
            for (std::size_t k = visits.size(); k > 1; --k)
                std::swap(visits[k - 1], visits[random.bounded(k)]);

            const ScheduleResult ours = propagate_schedule(instance, visits);
            const oracle::ScheduleCheck check = oracle::schedule_walk(instance, visits);
            REQUIRE(ours.feasible() == check.feasible);
            if (!check.feasible) continue;
            CHECK(ours.route->distance == doctest::Approx(check.distance).epsilon(1e-12));
            REQUIRE(ours.route->start.size() == check.start_times.size());
            for (std::size_t k = 0; k < check.start_times.size(); ++k)
                CHECK(ours.route->start[k] == doctest::Approx(check.start_times[k]).epsilon(1e-12));
            // Service starts never decrease along a route.
            for (std::size_t k = 1; k < ours.route->start.size(); ++k)
                CHECK(ours.route->start[k] >= ours.route->start[k - 1]);
        }
    }
}

namespace {

    Solution routes_to_solution(const Instance& instance, const std::vector<std::vector<int>>& routes) {
        Solution solution;
        solution.instance_name = instance.name;
        for (const auto& visits : routes) {
            const ScheduleResult scheduled = propagate_schedule(instance, visits);
            REQUIRE(scheduled.feasible());
            solution.routes.push_back(*scheduled.route);
            solution.origin.push_back(-1);
        }
        solution.total_cost = solution_cost(solution);
        return solution;
    }

}  // namespace

TEST_CASE("verify_solution checks coverage, schedules and the fleet") {
    // Wide windows and light demands: any visit order is schedulable, so the
    // checks below isolate coverage and fleet accounting.
    std::vector<Vertex> vertices{fixture::vertex(0, 0, 0, 0, 0, 10000, 0)};
    for (int i = 1; i <= 9; ++i)
        vertices.push_back(fixture::vertex(i, i, i % 3, 1, 0, 9000, 1));
    const Instance instance = fixture::instance(std::move(vertices), 3, 100);
    Solution good = routes_to_solution(instance, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});

    const FeasibilityReport ok = verify_solution(instance, good);
    CHECK(ok.feasible);
    CHECK(ok.fleet_feasible);
    CHECK(ok.violations.empty());
    CHECK(solution_cost(good) == doctest::Approx(oracle::solution_distance(instance, good)).epsilon(1e-12));

    // A dropped customer is reported by id.
    Solution missing = good;
    missing.routes[2].visits.pop_back();
    const FeasibilityReport drop = verify_solution(instance, missing);
    CHECK_FALSE(drop.feasible);
    REQUIRE_FALSE(drop.violations.empty());
    CHECK(drop.violations.front() == "customer 9 is not served");

    // A duplicated customer is reported with its count.
    Solution doubled = good;
    doubled.routes[0].visits.push_back(9);
    bool found = false;
    for (const std::string& v : verify_solution(instance, doubled).violations)
        found = found || v == "customer 9 is served 2 times";
    CHECK(found);

    // Unknown vertex ids are flagged.
    Solution alien = good;
    alien.routes[0].visits[0] = 42;
    CHECK_FALSE(verify_solution(instance, alien).feasible);

    // Fleet overflow flags fleet_feasible without breaking route feasibility.
    Solution spread = routes_to_solution(
        instance, {{1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}});
    Instance tight = instance;
    tight.fleet_size = 2;
    tight.finalize();
    const FeasibilityReport fleet = verify_solution(tight, spread);
    CHECK(fleet.feasible);
    CHECK_FALSE(fleet.fleet_feasible);
}

TEST_CASE("solution JSON serialization round trips and is byte stable") {
    std::vector<Vertex> vertices{fixture::vertex(0, 0, 0, 0, 0, 10000, 0)};
    for (int i = 1; i <= 7; ++i)
        vertices.push_back(fixture::vertex(i, 2.0 * i, 7.0 - i, 2, 0, 9000, 3));
    const Instance instance = fixture::instance(std::move(vertices), 3, 50);
    Solution solution = routes_to_solution(instance, {{1, 5, 3}, {2, 4}, {6, 7}});
    solution.origin = {0, 1, 1};
    solution.fleet_feasible = true;

    const std::string text = solution_to_json(solution);
    CHECK(solution_to_json(solution) == text);  // byte stable

    const Solution back = solution_from_json(text);
    CHECK(back.instance_name == solution.instance_name);
    CHECK(back.total_cost == solution.total_cost);
    CHECK(back.origin == solution.origin);
    REQUIRE(back.routes.size() == solution.routes.size());
    for (std::size_t r = 0; r < back.routes.size(); ++r) {
        CHECK(back.routes[r].visits == solution.routes[r].visits);
        CHECK(back.routes[r].start == solution.routes[r].start);
        CHECK(back.routes[r].load == solution.routes[r].load);
        CHECK(back.routes[r].distance == solution.routes[r].distance);
        CHECK(back.routes[r].depot_return == solution.routes[r].depot_return);
    }
    CHECK(solution_to_json(back) == text);
}
