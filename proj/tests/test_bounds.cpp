#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "collapsemap/bounds.hpp"
#include "collapsemap/catalog.hpp"
#include "test_util.hpp"

using namespace collapsemap;
namespace cat = collapsemap::catalog;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

PiecewiseBound constant_bound(double c) {
    return PiecewiseBound({PowerLawSegment{c, 0.0, 0.0, kInf}});
}
} // namespace

TEST_CASE("bound_at picks the segment containing sigma") {
    // supercurrent-style first branch: lambda <= 10 sigma up to 1e-3 m
    PiecewiseBound pb({PowerLawSegment{10.0, 1.0, 0.0, 1e-3},
                       PowerLawSegment{1e7, 3.0, 1e-3, kInf}});
    auto v = bound_at(pb, 1e-3);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(1e-2).epsilon(1e-12));

    CHECK(*bound_at(constant_bound(42.0), 1e-30) == 42.0);
    CHECK(*bound_at(constant_bound(42.0), 1e10) == 42.0);

    auto xray = cat::xray_constraint(Theory::GRW).bound;
    auto b = bound_at(xray, 1e-10);
    REQUIRE(b.has_value());
    // sigma^4 branch binds: min(1e26*1e-40, 1e7*1e-20) = 1e-14
    CHECK(*b == doctest::Approx(1e-14).epsilon(1e-12));
}

TEST_CASE("bound_at outside the covered range is no bound") {
    PiecewiseBound sound({PowerLawSegment{1e-32, 0.0, 0.0, 1e-16}});
    CHECK(!bound_at(sound, 1e-15).has_value());
    CHECK(bound_at(sound, 1e-17).has_value());
}

TEST_CASE("is_excluded is strict") {
    auto cave = cat::cave_warming_constraint(Theory::GRW, codata2018()).bound;
    CHECK(!is_excluded(cave, ParamPoint(1e-7, 1e-16)));

    // on-boundary point is not excluded
    double b = *bound_at(cave, 1e-7);
    CHECK(!is_excluded(cave, ParamPoint(1e-7, b)));
    CHECK(is_excluded(cave, ParamPoint(1e-7, b * (1 + 1e-12))));

    CHECK(!is_excluded(constant_bound(1e-30), ParamPoint(1.0, 1e-300)));

    // Gerlich 2011, GRW: sigma below the grating period, lambda above 1e-1
    cat::DiffractionExperiment ge11{2011, "Gerlich", "Ge11", 7e3, 1e-3, 3e-7, {}, false};
    auto c = cat::diffraction_constraint(ge11, Theory::GRW);
    CHECK(is_excluded(c.bound, ParamPoint(1e-7, 1.0)));
}

TEST_CASE("lower_envelope of constants is the smaller constant") {
    auto env = lower_envelope({constant_bound(1e2), constant_bound(1e3)});
    CHECK(*bound_at(env, 1e-5) == 1e2);
    CHECK(env.segments().size() == 1);
}

TEST_CASE("lower_envelope finds the x-ray style crossing") {
    PiecewiseBound quad({PowerLawSegment{1e7, 2.0, 0.0, kInf}});
    PiecewiseBound quart({PowerLawSegment{1e26, 4.0, 0.0, kInf}});
    auto env = lower_envelope({quad, quart});
    REQUIRE(env.segments().size() == 2);
    double crossing = env.segments()[0].sigma_hi;
    CHECK(crossing == doctest::Approx(std::pow(10.0, -9.5)).epsilon(1e-9));
    CHECK(env.segments()[0].exponent == 4.0);
    CHECK(env.segments()[1].exponent == 2.0);
}

TEST_CASE("lower_envelope rejects an empty list") {
    CHECK_THROWS_AS(lower_envelope({}), std::invalid_argument);
}

namespace {
std::vector<PiecewiseBound> grw_solid_catalog() {
    auto exps = cat::load_experiments_file(testutil::data_dir() + "/diffraction.tab");
    std::vector<PiecewiseBound> bounds;
    bounds.push_back(cat::xray_constraint(Theory::GRW).bound);
    bounds.push_back(cat::cave_warming_constraint(Theory::GRW, codata2018()).bound);
    for (const auto& e : exps)
        bounds.push_back(cat::diffraction_constraint(e, Theory::GRW).bound);
    return bounds;
}
} // namespace

TEST_CASE("envelope equals the pointwise minimum over the full GRW catalog") {
    auto bounds = grw_solid_catalog();
    auto env = lower_envelope(bounds);
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1000; ++i) {
        double sigma = testutil::log_uniform(rng, 1e-12, 1.0);
        double expected = kInf;
        for (const auto& b : bounds) {
            auto v = bound_at(b, sigma);
            if (v) expected = std::min(expected, *v);
        }
        auto got = bound_at(env, sigma);
        REQUIRE(got.has_value());
        CHECK(testutil::rel_close(*got, expected, 1e-12));
    }
}

TEST_CASE("envelope exclusion matches the brute-force disjunction") {
    auto bounds = grw_solid_catalog();
    auto env = lower_envelope(bounds);
    std::mt19937_64 rng(202);
    for (int i = 0; i < 1000; ++i) {
        ParamPoint pt(testutil::log_uniform(rng, 1e-12, 1.0),
                      testutil::log_uniform(rng, 1e-36, 1e4));
        bool any = std::any_of(bounds.begin(), bounds.end(),
                               [&](const PiecewiseBound& b) { return is_excluded(b, pt); });
        CHECK(is_excluded(env, pt) == any);
    }
}

TEST_CASE("lower_envelope is idempotent and order-independent") {
    auto bounds = grw_solid_catalog();
    auto env = lower_envelope(bounds);
    auto env2 = lower_envelope({env});

    auto shuffled = bounds;
    std::mt19937_64 rng(303);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto env3 = lower_envelope(shuffled);

    for (int i = 0; i < 500; ++i) {
        double sigma = testutil::log_uniform(rng, 1e-12, 1.0);
        double v1 = *bound_at(env, sigma);
        CHECK(testutil::rel_close(v1, *bound_at(env2, sigma), 1e-12));
        CHECK(testutil::rel_close(v1, *bound_at(env3, sigma), 1e-12));
    }
}

TEST_CASE("envelope breakpoint count stays within the quadratic bound") {
    auto bounds = grw_solid_catalog();
    std::size_t n_segments = 0;
    for (const auto& b : bounds) n_segments += b.segments().size();
    auto env = lower_envelope(bounds);
    CHECK(env.segments().size() <= n_segments * n_segments + 2 * n_segments);
}

TEST_CASE("diffraction constructor is continuous at the grating period") {
    cat::DiffractionExperiment arndt{1999, "Arndt", "Zei99", 720.0, 6e-3, 1e-7, {}, false};
    for (auto theory : {Theory::GRW, Theory::CSL}) {
        auto c = cat::diffraction_constraint(arndt, theory);
        double d = arndt.grating_period;
        double below = *bound_at(c.bound, d * (1 - 1e-9));
        double above = *bound_at(c.bound, d * (1 + 1e-9));
        CHECK(testutil::rel_close(below, above, 1e-6));
    }
}
