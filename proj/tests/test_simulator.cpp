#include "burgers/simulator.hpp"

#include <doctest.h>

#include <cmath>

using namespace burgers;

namespace {

SimConfig small_config(double cutoff, double coupling, double dt, double horizon, std::size_t replicas,
                       std::uint64_t seed) {
    auto lat = make_lattice(2, cutoff);
    return {lat, NonlinearitySpec{{1.0, 0.0}, coupling}, dt, horizon, replicas, seed, 1};
}

ModeTuple single(const ModeLattice& lat, const Mode& k) {
    return ModeTuple::from({static_cast<ModeTuple::Index>(lat.index_of(k))});
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation") {
    auto c = small_config(4.0, 0.5, 0.02, 1.0, 2, 1);
    CHECK_NOTHROW(c.validate());
    CHECK(c.steps() == 50);
    CHECK(SimConfig::default_dt(16.0) == doctest::Approx(0.5 / 256.0));
    auto bad = c;
    bad.dt = 0.2;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.horizon = 0.01;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.replicas = 0;
    CHECK_THROWS(bad.validate());
    bad = c;
    bad.spec.w = {1.0};
    CHECK_THROWS(bad.validate());
    CHECK(parse_scheme(to_string(Scheme::exponential_euler)) == Scheme::exponential_euler);
    CHECK_THROWS(parse_scheme("rk4"));
}

TEST_CASE("linear decay factor") {
    auto c = small_config(2.0, 0.0, 0.1, 1.0, 1, 1);
    const Stepper s(c);
    CHECK(s.decay(c.lattice->index_of({1, 0})) == doctest::Approx(0.951229).epsilon(1e-6));
    CHECK(s.decay(c.lattice->index_of({1, 1})) == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
}

TEST_CASE("step preserves Hermitian symmetry exactly") {
    for (auto scheme : {Scheme::exponential_euler, Scheme::exponential_heun}) {
        auto c = small_config(6.0, 0.8, 0.02, 1.0, 1, 3);
        c.scheme = scheme;
        Stepper s(c);
        Rng rng = derived_rng(3, 0);
        SpectralField f(c.lattice);
        fill_white_noise(f, rng);
        for (int j = 0; j < 50; ++j) s.step(f, rng);
        CHECK(f.is_hermitian(0.0));
    }
}

TEST_CASE("OU transition moments at zero coupling") {
    // eta' = e^{-|k|^2 dt/2} eta + noise: E[eta' conj(eta)] = decay, E|eta'|^2 = 1.
    auto c = small_config(2.0, 0.0, 0.25, 0.25, 1, 5);
    const auto& lat = *c.lattice;
    const auto k = lat.index_of({1, 1});
    Stepper s(c);
    double cross = 0.0, var = 0.0;
    const int R = 40000;
    for (int r = 0; r < R; ++r) {
        Rng rng = derived_rng(11, static_cast<std::uint64_t>(r));
        SpectralField f(c.lattice);
        fill_white_noise(f, rng);
        const Complex x0 = f[k];
        s.step(f, rng);
        cross += (f[k] * std::conj(x0)).real();
        var += std::norm(f[k]);
    }
    CHECK(cross / R == doctest::Approx(std::exp(-0.25)).epsilon(0.02));
    CHECK(var / R == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("stationarity of the full dynamics") {
    auto c = small_config(4.0, 0.6, 0.02, 1.0, 2000, 21);
    const auto rep = stationarity(c, 5);
    CHECK(rep.times.size() == 11);
    CHECK(rep.modes.size() == 24);
    CHECK(rep.max_z_averaged < 4.0);
    const double modes = static_cast<double>(c.lattice->size());
    for (std::size_t j = 0; j < rep.times.size(); ++j)
        CHECK(std::abs(rep.energy_mean[j] - modes) < 4.0 * rep.energy_stderr[j]);
}

TEST_CASE("results do not depend on the thread count") {
    auto c = small_config(4.0, 0.6, 0.02, 0.4, 40, 8);
    const auto one = stationarity(c, 4);
    c.threads = 3;
    const auto three = stationarity(c, 4);
    CHECK(one.mean == three.mean);
    CHECK(one.time_mean == three.time_mean);
}

TEST_CASE("OU correlation decays as exp(-|k|^2 t / 2)") {
    auto c = small_config(3.0, 0.0, 0.05, 40.0, 20, 13);
    const std::vector<double> lags{0.0, 0.25, 0.5, 1.0, 1.5};
    const auto cs = mode_correlation(c, {1, 1}, lags);
    REQUIRE(cs.values.size() == lags.size());
    for (std::size_t j = 0; j < lags.size(); ++j)
        CHECK(std::abs(cs.values[j].real() - std::exp(-lags[j])) < 4.0 * cs.std_err[j]);
    CHECK(std::abs(cs.rate - 1.0) < 4.0 * cs.rate_stderr);
    CHECK_FALSE(cs.wide_errors);
    const std::vector<double> too_long{100.0};
    CHECK_THROWS(mode_correlation(c, {1, 1}, too_long));
}

TEST_CASE("single replica correlation is flagged") {
    auto c = small_config(3.0, 0.0, 0.05, 5.0, 1, 2);
    const std::vector<double> lags{0.0, 0.5};
    const auto cs = mode_correlation(c, {1, 0}, lags);
    CHECK(cs.wide_errors);
}

TEST_CASE("bulk diffusivity") {
    const std::vector<double> ts{0.5, 1.0, 2.0};
    auto off = small_config(4.0, 0.0, 0.02, 2.0, 4, 1);
    for (double d : bulk_diffusivity(off, ts).d) CHECK(d == 1.0);

    auto on = small_config(8.0, 1.0, 0.5 / 64.0, 2.0, 40, 4);
    const auto ds = bulk_diffusivity(on, ts, 4);
    REQUIRE(ds.d.size() == 3);
    for (std::size_t j = 0; j < ds.d.size(); ++j) CHECK(ds.d[j] > 1.0 - 3.0 * ds.std_err[j]);
    CHECK(ds.d[2] > ds.d[0] - 3.0 * (ds.std_err[0] + ds.std_err[2]));
}

TEST_CASE("Wick observables") {
    auto lat = make_lattice(2, 3.0);
    Rng rng = derived_rng(9, 0);
    SpectralField f(lat);
    fill_white_noise(f, rng);
    const Mode a{1, 2}, b{0, 1};

    ChaosVector one(FockKernel::unit(lat, {a}));
    CHECK(ChaosObservable(one)(f) == f.at(-a));

    FockKernel pair(lat, 2);
    pair.set(ModeTuple::from({static_cast<ModeTuple::Index>(lat->index_of(a)),
                              static_cast<ModeTuple::Index>(lat->index_of(-a))}), 1.0);
    // ordered sum over (a,-a) and (-a,a)
    CHECK(std::abs(ChaosObservable(ChaosVector(pair))(f) - 2.0 * (std::norm(f.at(a)) - 1.0)) < 1e-14);

    FockKernel triple(lat, 3);
    const auto ia = static_cast<ModeTuple::Index>(lat->index_of(a));
    const auto ina = static_cast<ModeTuple::Index>(lat->index_of(-a));
    const auto ib = static_cast<ModeTuple::Index>(lat->index_of(b));
    triple.set(ModeTuple::from({ia, ina, ib}), 1.0);
    const Complex expect = 6.0 * (f.at(-a) * f.at(a) - 1.0) * f.at(-b);
    CHECK(std::abs(ChaosObservable(ChaosVector(triple))(f) - expect) < 1e-13);

    CHECK_THROWS(ChaosObservable(ChaosVector(FockKernel(lat, 2))));
}

TEST_CASE("Ito bound at zero coupling") {
    auto c = small_config(2.0, 0.0, 0.02, 2.0, 4000, 17);
    const auto& lat = *c.lattice;
    FockKernel f(c.lattice, 1);
    f.set(single(lat, {1, 0}), 1.0);
    f.set(single(lat, {-1, 0}), 1.0);
    const ChaosVector F(f);
    const auto rep = ito_bound_check(F, c);
    CHECK(rep.rhs == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(rep.lhs_terminal - 16.0 / std::exp(1.0)) < 4.0 * rep.lhs_terminal_stderr);
    CHECK(rep.lhs_sup >= rep.lhs_terminal);
    CHECK(rep.lhs_sup <= rep.rhs);

    ChaosVector scaled = F;
    scaled *= 3.0;
    const auto rs = ito_bound_check(scaled, c);
    CHECK(rs.lhs_sup == doctest::Approx(9.0 * rep.lhs_sup).epsilon(1e-12));
    CHECK(rs.rhs == doctest::Approx(9.0 * rep.rhs).epsilon(1e-12));
}

TEST_CASE("runs are reproducible") {
    auto c = small_config(4.0, 0.6, 0.02, 0.5, 3, 99);
    std::vector<Complex> first, second;
    run_replicas(c, [&](std::size_t, std::size_t s, const SpectralField& f) {
        if (s == c.steps()) first.insert(first.end(), f.coeffs().begin(), f.coeffs().end());
    });
    run_replicas(c, [&](std::size_t, std::size_t s, const SpectralField& f) {
        if (s == c.steps()) second.insert(second.end(), f.coeffs().begin(), f.coeffs().end());
    });
    CHECK(first == second);
}

}
