#include "burgers/field.hpp"
#include "burgers/fock.hpp"
#include "burgers/fock_dense.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

using namespace burgers;

namespace {

double max_abs_diff(const FockKernel& a, const FockKernel& b) {
    double m = 0.0;
    for (const auto& [t, v] : a.values()) m = std::max(m, std::abs(v - b.value(t)));
    for (const auto& [t, v] : b.values()) m = std::max(m, std::abs(v - a.value(t)));
    return m;
}

ChaosVector random_vector(LatticePtr lat, int low, int high, Rng& rng, std::size_t support) {
    ChaosVector v(lat, low, high);
    for (int n = low; n <= high; ++n) v.level(n) = random_kernel(lat, n, support, rng);
    return v;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("tuples") {
    const auto t = ModeTuple::from({5, 2, 5, 1});
    CHECK(t.level() == 4);
    CHECK(t[0] == 1);
    CHECK(t[3] == 5);
    CHECK(t.count(5) == 2);
    CHECK(t.orbit_size() == doctest::Approx(12.0));
    CHECK(t.erase_at(0) == ModeTuple::from({2, 5, 5}));
    CHECK(t.insert(3) == ModeTuple::from({1, 2, 3, 5, 5}));
    CHECK(ModeTuple::from({7, 7, 7}).orbit_size() == 1.0);
    CHECK(fock_weight(ModeTuple::from({1, 2})) == 4.0);
}

TEST_CASE("inner product examples") {
    auto lat = make_lattice(2, 3.0);
    const Mode k{1, 0}, l{0, 2};
    const auto ek = FockKernel::unit(lat, {k});
    CHECK(inner_product(ek, ek) == Complex(1.0));
    const auto sym = symmetric_product(ek, FockKernel::unit(lat, {l}));
    CHECK(sym.at({k, l}) == Complex(0.5));
    CHECK(inner_product(sym, sym).real() == doctest::Approx(1.0));
    CHECK(inner_product(ek, sym) == Complex{});
    const auto kk = symmetric_product(ek, ek);
    CHECK(kk.at({k, k}) == Complex(1.0));
    CHECK(inner_product(kk, kk).real() == doctest::Approx(2.0));
}

TEST_CASE("L0 multiplier") {
    auto lat = make_lattice(2, 3.0);
    CHECK(apply_L0(FockKernel::unit(lat, {Mode{1, 0}})).at({Mode{1, 0}}) == Complex(-0.5));
    CHECK(apply_L0(FockKernel::unit(lat, {Mode{1, 0}, Mode{0, 2}})).at({Mode{1, 0}, Mode{0, 2}}) == Complex(-2.5));
    Rng rng = derived_rng(1, 0);
    const auto f = random_kernel(lat, 3, 40, rng);
    const auto back = apply_neg_L0_power(apply_L0(f), -1.0);
    CHECK(max_abs_diff(back, apply_multiplier(f, [](const ModeTuple&) { return -1.0; })) < 1e-14);
}

TEST_CASE("A+ creates two particles") {
    auto lat = make_lattice(2, 4.0);
    const NonlinearitySpec spec{{1.0, 0.0}, 1.0};
    const Mode k{1, 1};
    const auto out = apply_Aplus(FockKernel::unit(lat, {k}), spec);
    CHECK(out.level() == 2);
    std::size_t pairs = 0;
    for (const auto& l : lat->modes()) {
        const Mode m = k - l;
        if (!lat->j_indicator(l, m)) continue;
        ++pairs;
        CHECK(std::abs(out.at({l, m}) - Complex(0.0, -1.0 / (2.0 * kPi))) < 1e-15);
    }
    CHECK(pairs > 0);
    std::size_t support = 0;
    for (const auto& [t, v] : out.values()) {
        CHECK(total_momentum(*lat, t) == k);
        support += v != Complex{};
    }
    CHECK(2 * support >= pairs);

    const auto perp = apply_Aplus(FockKernel::unit(lat, {Mode{0, 1}}), spec);
    for (const auto& [t, v] : perp.values()) CHECK(v == Complex{});
}

TEST_CASE("A- annihilates a pair") {
    auto lat = make_lattice(2, 4.0);
    const NonlinearitySpec spec{{1.0, 0.0}, 1.0};
    const Mode k1{1, 0}, k2{0, 1};
    // Kernel value 1 on both orderings.
    const auto out = apply_Aminus(FockKernel::unit(lat, {k1, k2}), spec);
    CHECK(out.level() == 1);
    CHECK(std::abs(out.at({Mode{1, 1}}) - Complex(0.0, -2.0 / kPi)) < 1e-15);
    CHECK(out.size() == 1);
    // The isometric kernel of eta(k1) eta(k2) is half of that.
    const auto iso = symmetric_product(FockKernel::unit(lat, {k1}), FockKernel::unit(lat, {k2}));
    CHECK(std::abs(apply_Aminus(iso, spec).at({Mode{1, 1}}) - Complex(0.0, -1.0 / kPi)) < 1e-15);
    CHECK(apply_Aminus(FockKernel::unit(lat, {k1}), spec).empty());
}

TEST_CASE("A- on a smooth kernel decays like the coupling") {
    const Mode k1{1, 0}, k2{0, 1};
    double first = 0.0;
    for (double M : {4.0, 8.0, 16.0, 32.0}) {
        auto lat = make_lattice(2, M);
        const auto spec = weak_coupling(*lat, {1.0, 0.0});
        const auto f2 = symmetric_product(FockKernel::unit(lat, {k1}), FockKernel::unit(lat, {k2}));
        const double r = norm(apply_neg_L0_power(apply_Aminus(f2, spec), -0.5)) / spec.coupling;
        if (first == 0.0) first = r;
        CHECK(r == doctest::Approx(first).epsilon(1e-12));
    }
}

TEST_CASE("adjoint identity on random kernels") {
    for (int d : {2, 3}) {
        auto lat = make_lattice(d, d == 2 ? 4.0 : 2.0);
        std::vector<double> w(static_cast<std::size_t>(d), 0.5);
        w[0] = 1.0;
        const auto spec = weak_coupling(*lat, w);
        Rng rng = derived_rng(7, static_cast<std::uint64_t>(d));
        for (int n = 1; n <= 3; ++n) {
            for (int rep = 0; rep < 5; ++rep) {
                const auto f = random_kernel(lat, n, 10, rng);
                // Dense-ish g so the pairing is not trivially zero.
                auto g = apply_Aplus(f, spec);
                g *= Complex(0.3, -1.1);
                g += random_kernel(lat, n + 1, 50, rng);
                const Complex lhs = inner_product(apply_Aplus(f, spec), g);
                const Complex rhs = inner_product(f, apply_Aminus(g, spec));
                CHECK(std::abs(lhs + rhs) <= 1e-13 * (1.0 + std::abs(lhs)));
                CHECK(std::abs(lhs) > 0.0);
            }
        }
    }
}

TEST_CASE("A+ reproduces the tested nonlinearity") {
    auto lat = make_lattice(2, 4.0);
    const auto spec = weak_coupling(*lat, {1.0, 0.3});
    Rng rng = derived_rng(3, 0);
    for (int rep = 0; rep < 5; ++rep) {
        SpectralField eta(lat);
        fill_white_noise(eta, rng);
        SpectralField phi(lat);
        fill_white_noise(phi, rng);
        FockKernel phik(lat, 1);
        for (std::size_t i = 0; i < lat->size(); ++i) phik.set(ModeTuple::from({static_cast<ModeTuple::Index>(i)}), phi[i]);
        FockKernel g(lat, 2);
        for (std::size_t a = 0; a < lat->size(); ++a)
            for (std::size_t b = a; b < lat->size(); ++b)
                g.set(ModeTuple::from({static_cast<ModeTuple::Index>(a), static_cast<ModeTuple::Index>(b)}),
                      0.5 * eta[a] * eta[b]);
        const Complex lhs = inner_product(apply_Aplus(phik, spec), g);
        const Complex rhs = pairing(nonlinearity(eta, spec), phi);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("number and momentum operators") {
    auto lat = make_lattice(2, 3.0);
    Rng rng = derived_rng(2, 0);
    const ChaosVector v(random_kernel(lat, 3, 5, rng));
    const auto nv = number_op(v);
    for (const auto& [t, x] : v.level(3).values()) CHECK(nv.level(3).value(t) == 3.0 * x);
    const ChaosVector ek(FockKernel::unit(lat, {Mode{2, -1}}));
    CHECK(momentum_op(0, ek).level(1).at({Mode{2, -1}}) == Complex(2.0));
    CHECK(momentum_op(1, ek).level(1).at({Mode{2, -1}}) == Complex(-1.0));
}

TEST_CASE("momentum commutes with the generator") {
    for (int d : {2, 3}) {
        auto lat = make_lattice(d, d == 2 ? 4.0 : 2.0);
        std::vector<double> w(static_cast<std::size_t>(d), -0.2);
        w[0] = 1.0;
        const auto spec = weak_coupling(*lat, w);
        Rng rng = derived_rng(5, static_cast<std::uint64_t>(d));
        for (int axis = 0; axis < d; ++axis) {
            const auto v = random_vector(lat, 1, 3, rng, 8);
            auto c = apply_generator(momentum_op(axis, v), spec);
            c -= momentum_op(axis, apply_generator(v, spec));
            CHECK(norm(c) <= 1e-13 * norm(apply_generator(v, spec)));
        }
    }
}

TEST_CASE("graded sector condition on random kernels") {
    double worst = 0.0;
    for (double M : {4.0, 8.0}) {
        auto lat = make_lattice(2, M);
        const auto spec = weak_coupling(*lat, {1.0, 0.0});
        Rng rng = derived_rng(17, static_cast<std::uint64_t>(M));
        for (int n = 1; n <= 3; ++n)
            for (int rep = 0; rep < 10; ++rep) {
                const auto f = random_kernel(lat, n, 3, rng);
                const double lhs = norm(apply_neg_L0_power(apply_Aplus(f, spec), -0.5));
                const double rhs = std::sqrt(static_cast<double>(n)) * norm(apply_neg_L0_power(f, 0.5));
                worst = std::max(worst, lhs / rhs);
            }
    }
    CHECK(worst <= 2.0);
}

TEST_CASE("kernel csv") {
    auto lat = make_lattice(2, 2.0);
    const auto f = FockKernel::unit(lat, {Mode{1, 0}, Mode{0, -1}});
    std::ostringstream os;
    write_csv(os, f);
    CHECK(os.str() == "k1_1,k1_2,k2_1,k2_2,re,im\n0,-1,1,0,1,0\n");
}

TEST_CASE("sector enumeration") {
    auto lat = make_lattice(2, 2.0);
    CHECK(FockBasis::enumerate(lat, 1, std::nullopt).size() == 12);
    CHECK(FockBasis::enumerate(lat, 2, std::nullopt).size() == 78);
    CHECK(FockBasis::enumerate(lat, 3, std::nullopt).size() == 364);
    // Brute force: sector sizes sum to the unrestricted count.
    std::size_t total = 0;
    for (int a = -6; a <= 6; ++a)
        for (int b = -6; b <= 6; ++b) total += count_tuples(*lat, 3, Mode{a, b});
    CHECK(total == 364);
    const auto basis = FockBasis::enumerate(lat, 3, Mode{1, 0});
    for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(total_momentum(*lat, basis.tuple(i)) == Mode{1, 0});
        CHECK(basis.find(basis.tuple(i)) == static_cast<std::int64_t>(i));
        if (i) CHECK(basis.tuple(i - 1) < basis.tuple(i));
    }
    CHECK_THROWS_AS(FockBasis::enumerate(lat, 3, std::nullopt, 100), BudgetExceeded);
    try {
        FockBasis::enumerate(lat, 3, std::nullopt, 100);
    } catch (const BudgetExceeded& e) {
        CHECK(e.requested() == 364);
    }
}

TEST_CASE("dense assemblies match matrix-free application") {
    for (int d : {2, 3}) {
        auto lat = make_lattice(d, 2.0);
        std::vector<double> w(static_cast<std::size_t>(d), 0.4);
        w[0] = 1.0;
        const auto spec = weak_coupling(*lat, w);
        Mode P = lat->mode(lat->size() / 2 + 1);
        Rng rng = derived_rng(9, static_cast<std::uint64_t>(d));
        for (int n = 1; n <= 2; ++n) {
            const auto from = FockBasis::enumerate(lat, n, P);
            const auto to = FockBasis::enumerate(lat, n + 1, P);
            const auto ap = assemble_matrix(OperatorKind::Aplus, from, to, spec);
            const auto am = assemble_matrix(OperatorKind::Aminus, to, from, spec);
            const auto l0 = assemble_matrix(OperatorKind::L0, from, from, spec);
            CHECK(l0.matrix.imag().isZero(0.0));
            CHECK((l0.matrix - Eigen::MatrixXcd(l0.matrix.diagonal().asDiagonal())).isZero(0.0));
            for (std::size_t i = 0; i < from.size(); ++i)
                CHECK(l0.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() ==
                      -kinetic_energy(*lat, from.tuple(i)));
            const double adj = (am.matrix + ap.weighted_adjoint()).cwiseAbs().maxCoeff();
            CHECK(adj <= 1e-12 * ap.matrix.cwiseAbs().maxCoeff());
            CHECK((am.whitened() + ap.whitened().adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
            for (int rep = 0; rep < 20; ++rep) {
                const auto f = random_kernel(lat, n, std::min<std::size_t>(4, from.size()), rng, P);
                const Eigen::VectorXcd y = ap.matrix * coordinates(f, from, Coordinates::canonical);
                const auto g = kernel_from(y, to, Coordinates::canonical);
                const auto ref = apply_Aplus(f, spec);
                CHECK(max_abs_diff(g, ref) <= 1e-12 * (1.0 + norm(ref)));
                const auto h = random_kernel(lat, n + 1, std::min<std::size_t>(4, to.size()), rng, P);
                const Eigen::VectorXcd z = am.matrix * coordinates(h, to, Coordinates::canonical);
                const auto refm = apply_Aminus(h, spec);
                CHECK(max_abs_diff(kernel_from(z, from, Coordinates::canonical), refm) <= 1e-12 * (1.0 + norm(refm)));
            }
        }
    }
}

TEST_CASE("band generator is antisymmetric with imaginary spectrum") {
    auto lat = make_lattice(2, 2.0);
    const auto spec = weak_coupling(*lat, {1.0, 0.5});
    const auto band = BandBasis::enumerate(lat, 1, 3, Mode{1, 0});
    const Eigen::MatrixXcd A(assemble_band(band, spec, 0.0, 1.0));
    CHECK((A + A.adjoint()).cwiseAbs().maxCoeff() <= 1e-13);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    CHECK(es.eigenvalues().real().cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::VectorXcd f = Eigen::VectorXcd::Random(A.rows());
    const Eigen::VectorXcd g = Eigen::VectorXcd::Random(A.rows());
    CHECK(std::abs((A * f).dot(g) + f.dot(A * g)) <= 1e-12);
}

}

TEST_SUITE("fock") {

TEST_CASE("operator algebra report") {
    auto lat2 = make_lattice(2, 2.0);
    const auto r2 = verify_operator_algebra(lat2, weak_coupling(*lat2, {1.0, 0.3}), 3);
    REQUIRE(r2.blocks.size() == 2);
    CHECK_FALSE(r2.blocks[0].momentum.has_value());
    CHECK(r2.blocks[1].codomain_size == 364);
    CHECK(r2.max_adjoint_defect < 1e-12);
    CHECK(r2.max_commutator_defect < 1e-12);

    auto lat3 = make_lattice(3, 2.0);
    const auto r3 = verify_operator_algebra(lat3, weak_coupling(*lat3, {1.0, 0.2, -0.4}), 3);
    CHECK(r3.blocks.size() == 5);
    CHECK(r3.max_adjoint_defect < 1e-12);
    CHECK(r3.max_commutator_defect < 1e-12);
    CHECK_THROWS(verify_operator_algebra(lat2, weak_coupling(*lat2, {1.0, 0.3}), 1));
}

}
