#include <doctest.h>

#include "dubline/angle_set.hpp"
#include "dubline/error.hpp"

using namespace dubline;

TEST_CASE("range is inclusive and evenly stepped") {
    const AngleSet a = AngleSet::range(-15.0, 15.0, 1.0);
    CHECK(a.size() == 31);
    CHECK(a[0] == doctest::Approx(-15.0));
    CHECK(a[30] == doctest::Approx(15.0));
    CHECK(a.step() == 1.0);
}

TEST_CASE("default set is the union of the vertical and horizontal bands") {
    const AngleSet d = default_angle_set();
    CHECK(d.size() == 31 + 11);
    CHECK(d.includes(AngleSet::vertical_band()));
    CHECK(d.includes(AngleSet::horizontal_band()));
    CHECK_FALSE(d.contains(45.0));
    CHECK(d.index_of(85.0).value() == 31);
}

TEST_CASE("invalid angle sets are rejected") {
    CHECK_THROWS_AS(AngleSet({0.0, 0.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(AngleSet({5.0, 1.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(AngleSet({180.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(AngleSet({-91.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(AngleSet({1.0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(concat_angle_sets(AngleSet::range(0, 5), AngleSet::range(5, 8)), InvalidArgument);
}

TEST_CASE("concatenation keeps order and the finer step") {
    const AngleSet c = concat_angle_sets(AngleSet::range(0, 2, 1.0), AngleSet::range(10, 11, 0.5));
    CHECK(c.size() == 6);
    CHECK(c.step() == 0.5);
    CHECK(c[3] == doctest::Approx(10.0));
}
