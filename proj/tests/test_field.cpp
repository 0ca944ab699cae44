#include "burgers/fft_convolver.hpp"
#include "burgers/field.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace burgers;

namespace {

SpectralField pair_field(LatticePtr lat, Mode k) {
    SpectralField f(lat);
    f.set(k, 1.0);
    f.set(-k, 1.0);
    return f;
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("nonlinearity of a single cosine") {
    auto lat = make_lattice(2, 3.0);
    const NonlinearitySpec spec{{1.0, 0.0}, 1.0};
    const auto eta = pair_field(lat, {1, 0});
    for (const auto& n : {nonlinearity(eta, spec), nonlinearity_direct(eta, spec)}) {
        CHECK(std::abs(n.at({2, 0}) - Complex(0.0, 1.0 / kPi)) < 1e-14);
        CHECK(std::abs(n.at({-2, 0}) - Complex(0.0, -1.0 / kPi)) < 1e-14);
        double rest = 0.0;
        for (std::size_t i = 0; i < lat->size(); ++i) {
            const auto& q = lat->mode(i);
            if (q == Mode{2, 0} || q == Mode{-2, 0}) continue;
            rest += std::abs(n[i]);
        }
        CHECK(rest < 1e-14);
        CHECK(std::abs(pairing(n, eta)) < 1e-15);
    }
}

TEST_CASE("zero field") {
    auto lat = make_lattice(2, 4.0);
    SpectralField z(lat);
    const auto spec = weak_coupling(*lat, {1.0, 0.0});
    CHECK(nonlinearity(z, spec).energy() == 0.0);
    CHECK(invariance_residual(z, spec) == 0.0);
}

TEST_CASE("pairing") {
    auto lat = make_lattice(2, 3.0);
    const auto eta = pair_field(lat, {1, 0});
    CHECK(pairing(eta, eta) == Complex(2.0));
    SpectralField ek(lat);
    ek.set({0, 1}, 1.0);
    const auto noise = sample_white_noise(lat, 3);
    CHECK(pairing(noise, ek) == noise.at({0, -1}));
    const Complex self = pairing(noise, noise);
    CHECK(std::abs(self.imag()) < 1e-12);
    CHECK(self.real() >= 0.0);
}

TEST_CASE("FFT convolution matches the direct sum") {
    for (int d : {2, 3}) {
        for (double M : {1.0, 2.0, 3.0, 4.0}) {
            auto lat = make_lattice(d, M);
            std::vector<double> w(static_cast<std::size_t>(d), 0.0);
            w[0] = 1.0;
            w[1] = -0.4;
            const NonlinearitySpec spec{w, 0.7};
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto eta = sample_white_noise(lat, seed);
                const auto a = nonlinearity(eta, spec);
                const auto b = nonlinearity_direct(eta, spec);
                double diff = 0.0, scale = 0.0;
                for (std::size_t i = 0; i < lat->size(); ++i) {
                    diff = std::max(diff, std::abs(a[i] - b[i]));
                    scale = std::max(scale, std::abs(b[i]));
                }
                CHECK(diff <= 1e-12 * std::max(scale, 1.0));
                CHECK(a.is_hermitian(1e-12));
            }
        }
    }
}

TEST_CASE("quadratic scaling and w-orthogonal modes") {
    auto lat = make_lattice(2, 6.0);
    const NonlinearitySpec spec{{1.0, 0.0}, 0.9};
    const auto eta = sample_white_noise(lat, 11);
    auto scaled = eta;
    scaled *= 1.7;
    const auto a = nonlinearity(eta, spec);
    const auto b = nonlinearity(scaled, spec);
    for (std::size_t i = 0; i < lat->size(); ++i) {
        CHECK(std::abs(b[i] - 1.7 * 1.7 * a[i]) <= 1e-12 * (1.0 + std::abs(b[i])));
        if (lat->mode(i)[0] == 0) CHECK(a[i] == Complex{});
    }
}

TEST_CASE("invariance residual on random fields") {
    for (int d : {2, 3}) {
        auto lat = make_lattice(d, d == 2 ? 8.0 : 4.0);
        std::vector<double> w(static_cast<std::size_t>(d), 0.3);
        w[0] = 1.0;
        const auto spec = weak_coupling(*lat, w);
        FftConvolver fft(lat);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto eta = sample_white_noise(lat, seed);
            const double e = eta.energy();
            CHECK(std::abs(pairing(nonlinearity(eta, spec, fft), eta)) < 1e-12 * std::pow(e, 1.5));
        }
    }
}

TEST_CASE("white noise statistics") {
    auto lat = make_lattice(2, 4.0);
    const std::size_t samples = 100000;
    std::vector<double> second(lat->size(), 0.0);
    Complex cross{};
    const auto i10 = lat->index_of({1, 0});
    const auto i01 = lat->index_of({0, 1});
    SpectralField eta(lat);
    Rng rng = derived_rng(5, 0);
    for (std::size_t s = 0; s < samples; ++s) {
        fill_white_noise(eta, rng);
        REQUIRE(eta.is_hermitian());
        for (std::size_t i = 0; i < lat->size(); ++i) second[i] += std::norm(eta[i]);
        cross += eta[i10] * eta[lat->negated(i01)];
    }
    for (double v : second) CHECK(std::abs(v / samples - 1.0) < 0.02);
    CHECK(std::abs(cross / static_cast<double>(samples)) < 0.02);
}

TEST_CASE("replica streams are reproducible and distinct") {
    Rng a = derived_rng(42, 7), b = derived_rng(42, 7), c = derived_rng(42, 8);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
}

TEST_CASE("binary and csv round trip") {
    auto lat = make_lattice(3, 2.0);
    const auto eta = sample_white_noise(lat, 9);
    std::stringstream ss;
    write_binary(ss, eta);
    const auto back = read_binary(ss);
    CHECK(back.lattice().dim() == 3);
    CHECK(back.lattice().norm_kind() == NormKind::sup);
    REQUIRE(back.size() == eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) CHECK(back[i] == eta[i]);

    std::ostringstream csv;
    write_csv(csv, eta);
    const auto text = csv.str();
    CHECK(text.rfind("k1,k2,k3,re,im\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(eta.size() + 1));

    std::stringstream bad("XXXX");
    CHECK_THROWS(read_binary(bad));
}

}
