#include "burgers/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace burgers;

TEST_SUITE("lattice") {

TEST_CASE("mode counts") {
    CHECK(ModeLattice(2, 1.0).size() == 4);
    CHECK(ModeLattice(2, 2.0).size() == 12);
    CHECK(ModeLattice(3, 1.0).size() == 26);
    CHECK(ModeLattice(3, 2.0).size() == 124);

    const ModeLattice unit(2, 1.0);
    std::set<Mode> got(unit.modes().begin(), unit.modes().end());
    std::set<Mode> want{Mode{1, 0}, Mode{-1, 0}, Mode{0, 1}, Mode{0, -1}};
    CHECK(got == want);
}

TEST_CASE("brute-force count in the disc") {
    for (double M : {2.0, 3.5, 7.0}) {
        std::size_t n = 0;
        const int R = static_cast<int>(M);
        for (int a = -R; a <= R; ++a)
            for (int b = -R; b <= R; ++b)
                if ((a || b) && a * a + b * b <= M * M) ++n;
        CHECK(ModeLattice(2, M).size() == n);
    }
}

TEST_CASE("ordering is lexicographic and lookup is consistent") {
    for (int d : {2, 3, 4}) {
        const ModeLattice lat(d, 2.0);
        CHECK(std::is_sorted(lat.modes().begin(), lat.modes().end()));
        for (std::size_t i = 0; i < lat.size(); ++i) {
            CHECK(lat.index_of(lat.mode(i)) == i);
            CHECK(lat.mode(lat.negated(i)) == -lat.mode(i));
            CHECK(lat.in_half(i) != lat.in_half(lat.negated(i)));
        }
    }
}

TEST_CASE("default norms") {
    CHECK(ModeLattice(2, 3.0).norm_kind() == NormKind::euclidean);
    CHECK(ModeLattice(3, 3.0).norm_kind() == NormKind::sup);
    CHECK(ModeLattice(5, 1.0).norm_kind() == NormKind::sup);
}

TEST_CASE("interaction indicator") {
    const ModeLattice lat(2, 2.0);
    CHECK_FALSE(lat.j_indicator({1, 0}, {-1, 0}));
    CHECK(lat.j_indicator({1, 0}, {1, 0}));
    CHECK_FALSE(lat.j_indicator({2, 0}, {1, 0}));
    for (const auto& l : lat.modes())
        for (const auto& m : lat.modes()) {
            CHECK(lat.j_indicator(l, m) == lat.j_indicator(m, l));
            CHECK(lat.j_indicator(l, m) == lat.j_indicator(-l, -m));
        }
}

TEST_CASE("weak coupling constant") {
    CHECK(lambda_eps(2, 10.0) == doctest::Approx(0.4659906).epsilon(1e-7));
    CHECK(lambda_eps(3, 100.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(lambda_eps(4, 10.0) == doctest::Approx(0.1).epsilon(1e-14));
    for (int d = 2; d <= 5; ++d)
        for (double M = 2.0; M < 100.0; M *= 1.7) CHECK(lambda_eps(d, M * 1.1) < lambda_eps(d, M));
    CHECK_THROWS_AS(lambda_eps(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(ModeLattice(2, 1.0).lambda(), std::domain_error);
}

TEST_CASE("invalid geometry") {
    CHECK_THROWS_AS(ModeLattice(1, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(ModeLattice(6, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(ModeLattice(2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(parse_norm_kind("l1"), std::invalid_argument);
}

TEST_CASE("boundary modes are included") {
    const ModeLattice e(2, 5.0);
    CHECK(e.contains({3, 4}));
    CHECK(e.contains({5, 0}));
    CHECK_FALSE(e.contains({5, 1}));
    const ModeLattice s(3, 2.0);
    CHECK(s.contains({2, -2, 2}));
    CHECK_FALSE(s.contains({3, 0, 0}));
    CHECK_FALSE(s.contains({0, 0, 0}));
}

}
