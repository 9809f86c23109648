#include "doctest.h"
#include "svx/errors.hpp"
#include "svx/schedule.hpp"

using namespace svx;

TEST_CASE("schedule anchors") {
    const ScheduleParams p;
    CHECK(alpha(100, p) == 0.0);
    CHECK(alpha(200, p) == 0.0);
    CHECK(alpha(450, p) == 1.5);
    CHECK(alpha(700, p) == 3.0);
    CHECK(alpha(900, p) == 3.0);
    CHECK(pseudo_batches(100, p) == 0);
    CHECK(pseudo_batches(700, p) == 188);
    CHECK(pseudo_batches(900, p) == 188);
    CHECK(pseudo_batches(450, p) == 150);
}

TEST_CASE("refresh epochs") {
    ScheduleParams p;
    CHECK(refresh_epochs(1000, p) == std::vector<int>{200, 400, 600, 800});
    CHECK(refresh_epochs(200, p).empty());
    p.refresh_period = 500;
    CHECK(refresh_epochs(1000, p) == std::vector<int>{500});
    CHECK_THROWS_AS(refresh_epochs(100, p), ParamError);
}

TEST_CASE("monotone, bounded, continuous") {
    const ScheduleParams p;
    double last_a = 0.0;
    int last_n = 0;
    for (int e = 0; e <= 1200; ++e) {
        const double a = alpha(e, p);
        const int n = pseudo_batches(e, p);
        CHECK(a >= last_a);
        CHECK(n >= last_n);
        CHECK(n <= p.n_t);
        last_a = a;
        last_n = n;
    }
    CHECK(alpha(p.t1, p) == 0.0);
    CHECK(alpha(p.t1 + 1, p) == doctest::Approx(3.0 / 500));
    CHECK(static_cast<double>(pseudo_batches(p.t2, p)) / p.n_t == doctest::Approx(0.752));
}

TEST_CASE("invalid schedules") {
    ScheduleParams p;
    p.t2 = p.t1;
    CHECK_THROWS_AS(alpha(0, p), ParamError);
    p = {};
    p.alpha_f = -1;
    CHECK_THROWS_AS(alpha(0, p), ParamError);
    p = {};
    p.n_t = 0;
    CHECK_THROWS_AS(pseudo_batches(0, p), ParamError);
    CHECK_THROWS_AS(alpha(-1, ScheduleParams{}), ParamError);
}
