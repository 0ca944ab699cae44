#include "burgers/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace burgers {

void SimConfig::validate() const {
    if (!lattice) throw std::invalid_argument("simulation needs a lattice");
    spec.validate(lattice->dim());
    const double M = lattice->cutoff();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (dt * M * M > 2.0 * (1.0 + 1e-12)) throw std::invalid_argument("dt * M^2 must not exceed 2");
    if (!(horizon >= dt)) throw std::invalid_argument("horizon must be at least dt");
    if (replicas < 1) throw std::invalid_argument("replicas must be positive");
    if (threads < 1) throw std::invalid_argument("threads must be positive");
}

std::size_t SimConfig::steps() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::exponential_euler ? "exponential_euler" : "exponential_heun";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "exponential_euler") return Scheme::exponential_euler;
    if (name == "exponential_heun") return Scheme::exponential_heun;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

Stepper::Stepper(const SimConfig& config)
    : lattice_(config.lattice), scheme_(config.scheme), fft_(config.lattice), decay_(lattice_->size()),
      drift_(lattice_->size()), noise_(lattice_->size()), noise_draw_(lattice_->size()), square_(lattice_->size()) {
    const double dt = config.dt;
    const Complex pref = kI * config.spec.coupling / fourier_volume_root(lattice_->dim());
    for (std::size_t i = 0; i < lattice_->size(); ++i) {
        const double a = 0.5 * static_cast<double>(lattice_->norm2(i));
        decay_[i] = std::exp(-a * dt);
        const double phi1 = scheme_ == Scheme::exponential_euler ? -std::expm1(-a * dt) / (a * dt) : 1.0;
        drift_[i] = phi1 * dt * pref * config.spec.w_dot(lattice_->mode(i));
        noise_[i] = std::sqrt(-std::expm1(-2.0 * a * dt) / 2.0);
    }
    if (config.spec.coupling == 0.0) drift_.clear();
    if (scheme_ == Scheme::exponential_heun) predictor_.resize(lattice_->size());
}

void Stepper::hermitian_square(std::span<const Complex> in) {
    fft_.square(in, square_);
    const auto& lat = *lattice_;
    for (std::size_t i = 0; i < lat.size(); ++i)
        if (lat.in_half(i)) square_[lat.negated(i)] = std::conj(square_[i]);
}

void Stepper::step(SpectralField& field, Rng& rng) {
    const auto& lat = *lattice_;
    const std::size_t n = lat.size();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!lat.in_half(i)) continue;
        const double a = gauss(rng);
        const double b = gauss(rng);
        noise_draw_[i] = Complex(noise_[i] * a, noise_[i] * b);
        noise_draw_[lat.negated(i)] = std::conj(noise_draw_[i]);
    }
    if (drift_.empty()) {
        for (std::size_t i = 0; i < n; ++i) field[i] = decay_[i] * field[i] + noise_draw_[i];
        return;
    }
    hermitian_square(field.coeffs());
    if (scheme_ == Scheme::exponential_euler) {
        for (std::size_t i = 0; i < n; ++i) field[i] = decay_[i] * field[i] + drift_[i] * square_[i] + noise_draw_[i];
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Complex linear = decay_[i] * field[i] + noise_draw_[i];
        const Complex first = decay_[i] * drift_[i] * square_[i];
        predictor_[i] = linear + first;
        field[i] = linear + 0.5 * first;
    }
    hermitian_square(predictor_);
    for (std::size_t i = 0; i < n; ++i) field[i] += 0.5 * drift_[i] * square_[i];
}

SpectralField step(const SpectralField& field, const SimConfig& config, Rng& rng) {
    config.validate();
    Stepper s(config);
    SpectralField out = field;
    s.step(out, rng);
    return out;
}

namespace {

using Visit = std::function<void(std::size_t, std::size_t, const SpectralField&)>;

void run_range(const SimConfig& config, std::size_t first, std::size_t count, const Visit& visit) {
    const std::size_t workers = std::min<std::size_t>(config.threads, count);
    std::vector<Stepper> steppers;
    steppers.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) steppers.emplace_back(config);
    const std::size_t steps = config.steps();
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&](Stepper& stepper) {
        try {
            for (std::size_t j = next++; j < count; j = next++) {
                const std::size_t r = first + j;
                Rng rng = derived_rng(config.seed, r);
                SpectralField field(config.lattice);
                fill_white_noise(field, rng);
                visit(r, 0, field);
                for (std::size_t s = 1; s <= steps; ++s) {
                    stepper.step(field, rng);
                    visit(r, s, field);
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
        }
    };
    if (workers <= 1) {
        work(steppers.front());
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, std::ref(steppers[w]));
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

// Runs replicas in fixed-size blocks: per-replica states live only for one
// block and are folded in replica order, so results do not depend on threads.
template <class State, class Make, class Fold>
void run_blocked(const SimConfig& config, Make make, const std::function<void(State&, std::size_t, const SpectralField&)>& visit,
                 Fold fold, std::size_t block = 256) {
    for (std::size_t first = 0; first < config.replicas; first += block) {
        const std::size_t count = std::min(block, config.replicas - first);
        std::vector<State> states;
        states.reserve(count);
        for (std::size_t j = 0; j < count; ++j) states.push_back(make());
        run_range(config, first, count, [&](std::size_t r, std::size_t s, const SpectralField& f) {
            visit(states[r - first], s, f);
        });
        for (auto& st : states) fold(st);
    }
}

// Mean and standard error of the mean from running sums.
struct Moments {
    double sum = 0.0;
    double sum2 = 0.0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double std_err() const {
        if (n < 2) return std::numeric_limits<double>::infinity();
        const double m = mean();
        const double var = std::max(0.0, (sum2 - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

std::vector<std::size_t> sampled_steps(std::size_t steps, std::size_t every) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s <= steps; s += every) out.push_back(s);
    return out;
}

}  // namespace

void run_replicas(const SimConfig& config, const Visit& visit) {
    config.validate();
    run_range(config, 0, config.replicas, visit);
}

StationarityReport stationarity(const SimConfig& config, std::size_t sample_every) {
    config.validate();
    if (sample_every < 1) throw std::invalid_argument("sample_every must be positive");
    const auto& lat = *config.lattice;
    std::vector<std::size_t> half;
    for (std::size_t i = 0; i < lat.size(); ++i)
        if (lat.in_half(i)) half.push_back(i);
    const auto samples = sampled_steps(config.steps(), sample_every);
    const std::size_t T = samples.size(), K = half.size();

    struct State {
        std::vector<double> values;  // [sample][mode]
        std::vector<double> energy;
    };
    std::vector<Moments> per(T * K), avg(K), energy(T);

    run_blocked<State>(
        config, [&] { return State{std::vector<double>(T * K), std::vector<double>(T)}; },
        [&](State& st, std::size_t s, const SpectralField& f) {
            if (s % sample_every != 0) return;
            const std::size_t j = s / sample_every;
            for (std::size_t m = 0; m < K; ++m) st.values[j * K + m] = std::norm(f[half[m]]);
            st.energy[j] = f.energy();
        },
        [&](State& st) {
            for (std::size_t m = 0; m < K; ++m) {
                double a = 0.0;
                for (std::size_t j = 0; j < T; ++j) {
                    per[j * K + m].add(st.values[j * K + m]);
                    a += st.values[j * K + m];
                }
                avg[m].add(a / static_cast<double>(T));
            }
            for (std::size_t j = 0; j < T; ++j) energy[j].add(st.energy[j]);
        });

    StationarityReport rep;
    for (auto s : samples) rep.times.push_back(static_cast<double>(s) * config.dt);
    for (auto i : half) rep.modes.push_back(lat.mode(i));
    rep.mean.assign(T, std::vector<double>(K));
    rep.std_err.assign(T, std::vector<double>(K));
    for (std::size_t j = 0; j < T; ++j)
        for (std::size_t m = 0; m < K; ++m) {
            const auto& mo = per[j * K + m];
            rep.mean[j][m] = mo.mean();
            rep.std_err[j][m] = mo.std_err();
            rep.max_z = std::max(rep.max_z, std::abs(mo.mean() - 1.0) / mo.std_err());
        }
    for (std::size_t m = 0; m < K; ++m) {
        rep.time_mean.push_back(avg[m].mean());
        rep.time_stderr.push_back(avg[m].std_err());
        rep.max_z_averaged = std::max(rep.max_z_averaged, std::abs(avg[m].mean() - 1.0) / avg[m].std_err());
    }
    for (std::size_t j = 0; j < T; ++j) {
        rep.energy_mean.push_back(energy[j].mean());
        rep.energy_stderr.push_back(energy[j].std_err());
    }
    return rep;
}

namespace {

std::vector<std::size_t> lag_steps(std::span<const double> lags, double dt, std::size_t steps) {
    std::vector<std::size_t> out;
    for (double t : lags) {
        if (!(t >= 0.0)) throw std::invalid_argument("lags must be non-negative");
        const auto s = static_cast<std::size_t>(std::llround(t / dt));
        if (s > steps) throw std::invalid_argument("lag exceeds the horizon");
        out.push_back(s);
    }
    return out;
}

struct RateFit {
    double rate = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
};

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& c, const std::vector<std::size_t>& use) {
    if (use.size() < 2) return {};
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (auto j : use) {
        if (!(c[j] > 0.0)) return {};
        const double y = std::log(c[j]);
        st += t[j];
        sy += y;
        stt += t[j] * t[j];
        sty += t[j] * y;
    }
    const double n = static_cast<double>(use.size());
    const double den = n * stt - st * st;
    if (!(den > 0.0)) return {};
    return {-(n * sty - st * sy) / den, true};
}

}  // namespace

CorrelationSeries mode_correlation(const SimConfig& config, const Mode& k, std::span<const double> lags,
                                   double fit_floor) {
    config.validate();
    const auto& lat = *config.lattice;
    const auto idx = lat.index_of(k);
    const std::size_t steps = config.steps();
    const auto ls = lag_steps(lags, config.dt, steps);
    const std::size_t L = ls.size();
    const std::size_t span = ls.empty() ? 1 : *std::max_element(ls.begin(), ls.end()) + 1;

    struct State {
        std::vector<Complex> ring;
        std::vector<Complex> sums;
    };
    std::vector<std::vector<Complex>> per_replica;
    per_replica.reserve(config.replicas);

    run_blocked<State>(
        config, [&] { return State{std::vector<Complex>(span), std::vector<Complex>(L)}; },
        [&](State& st, std::size_t s, const SpectralField& f) {
            const Complex x = f[idx];
            st.ring[s % span] = x;
            for (std::size_t j = 0; j < L; ++j)
                if (s >= ls[j]) st.sums[j] += x * std::conj(st.ring[(s - ls[j]) % span]);
        },
        [&](State& st) {
            for (std::size_t j = 0; j < L; ++j) st.sums[j] /= static_cast<double>(steps - ls[j] + 1);
            per_replica.push_back(std::move(st.sums));
        });

    const std::size_t R = per_replica.size();
    CorrelationSeries out;
    out.k = k;
    out.wide_errors = R < 2;
    std::vector<Complex> total(L);
    for (const auto& c : per_replica)
        for (std::size_t j = 0; j < L; ++j) total[j] += c[j];
    for (std::size_t j = 0; j < L; ++j) {
        out.lags.push_back(static_cast<double>(ls[j]) * config.dt);
        out.values.push_back(total[j] / static_cast<double>(R));
        Moments m;
        for (const auto& c : per_replica) m.add(c[j].real());
        out.std_err.push_back(m.std_err());
    }

    std::vector<double> re(L);
    std::vector<std::size_t> use;
    for (std::size_t j = 0; j < L; ++j) {
        re[j] = out.values[j].real();
        if (re[j] > fit_floor) use.push_back(j);
    }
    out.fit_points = use.size();
    const auto fit = fit_rate(out.lags, re, use);
    out.rate = fit.rate;
    if (!fit.ok) {
        out.wide_errors = true;
        out.rate_stderr = std::numeric_limits<double>::infinity();
        return out;
    }
    if (R < 2) {
        out.rate_stderr = std::numeric_limits<double>::infinity();
        return out;
    }
    std::vector<double> loo(L);
    double jsum = 0.0, jsum2 = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t j = 0; j < L; ++j)
            loo[j] = (total[j].real() - per_replica[r][j].real()) / static_cast<double>(R - 1);
        const auto f = fit_rate(out.lags, loo, use);
        if (!f.ok) {
            out.wide_errors = true;
            out.rate_stderr = std::numeric_limits<double>::infinity();
            return out;
        }
        jsum += f.rate;
        jsum2 += f.rate * f.rate;
    }
    const double jm = jsum / static_cast<double>(R);
    const double var = std::max(0.0, jsum2 / static_cast<double>(R) - jm * jm);
    out.rate_stderr = std::sqrt(static_cast<double>(R - 1) * var);
    return out;
}

DiffusivitySeries bulk_diffusivity(const SimConfig& config, std::span<const double> t_grid, std::size_t lag_stride) {
    config.validate();
    if (lag_stride < 1) throw std::invalid_argument("lag_stride must be positive");
    const auto& lat = *config.lattice;
    const std::size_t steps = config.steps();
    const double h = config.dt * static_cast<double>(lag_stride);
    std::vector<std::size_t> tj;  // t in units of h
    for (double t : t_grid) {
        const auto j = static_cast<std::size_t>(std::llround(t / h));
        if (j < 1) throw std::invalid_argument("diffusivity times must be positive");
        if (j * lag_stride > steps) throw std::invalid_argument("diffusivity time exceeds the horizon");
        tj.push_back(j);
    }
    const std::size_t J = tj.empty() ? 0 : *std::max_element(tj.begin(), tj.end());
    const std::size_t span = J * lag_stride + 1;
    const double norm = 1.0 / fourier_volume_root(lat.dim());

    struct State {
        std::vector<double> ring;
        std::vector<double> sums;
    };
    const double pref = 2.0 * config.spec.w_norm2() * config.spec.coupling * config.spec.coupling;
    std::vector<Moments> d(tj.size());

    run_blocked<State>(
        config, [&] { return State{std::vector<double>(span), std::vector<double>(J + 1)}; },
        [&](State& st, std::size_t s, const SpectralField& f) {
            double q = 0.0;
            for (std::size_t i = 0; i < lat.size(); ++i) q += std::norm(f[i]) - 1.0;
            q *= norm;
            st.ring[s % span] = q;
            for (std::size_t j = 0; j <= J; ++j) {
                const std::size_t lag = j * lag_stride;
                if (s >= lag) st.sums[j] += q * st.ring[(s - lag) % span];
            }
        },
        [&](State& st) {
            for (std::size_t j = 0; j <= J; ++j) st.sums[j] /= static_cast<double>(steps - j * lag_stride + 1);
            for (std::size_t g = 0; g < tj.size(); ++g) {
                const double t = static_cast<double>(tj[g]) * h;
                double integral = 0.0;
                for (std::size_t j = 0; j <= tj[g]; ++j) {
                    const double w = (j == 0 || j == tj[g]) ? 0.5 : 1.0;
                    integral += w * (t - static_cast<double>(j) * h) * st.sums[j];
                }
                integral *= h;
                d[g].add(1.0 + pref / t * integral);
            }
        });

    DiffusivitySeries out;
    out.wide_errors = config.replicas < 2;
    for (std::size_t g = 0; g < tj.size(); ++g) {
        out.t.push_back(static_cast<double>(tj[g]) * h);
        out.d.push_back(d[g].mean());
        out.std_err.push_back(pref == 0.0 ? 0.0 : d[g].std_err());
    }
    return out;
}

ChaosObservable::ChaosObservable(const ChaosVector& f) : lattice_(f.lattice_ptr()) {
    if (f.low() < 1 && !f.level(0).empty()) throw std::invalid_argument("observable must not have a level-0 part");
    const auto& lat = *lattice_;
    for (int n = std::max(1, f.low()); n <= f.high(); ++n) {
        std::map<ModeTuple, Complex> sorted(f.level(n).values().begin(), f.level(n).values().end());
        for (const auto& [t, v] : sorted) {
            if (v == Complex{}) continue;
            Term term{v * t.orbit_size(), {}};
            for (auto i : t.indices()) term.modes.push_back(lat.negated(i));
            terms_.push_back(std::move(term));
        }
    }
    if (terms_.empty()) throw std::invalid_argument("observable kernel is zero");
}

namespace {

// :x_1 ... x_n: for centred Gaussians with E[eta(a) eta(b)] = 1{a = -b}.
Complex wick(const ModeLattice& lat, const SpectralField& f, std::vector<std::size_t>& idx, std::size_t n) {
    if (n == 0) return 1.0;
    const std::size_t last = idx[n - 1];
    Complex out = f[last] * wick(lat, f, idx, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (idx[j] != lat.negated(last)) continue;
        std::vector<std::size_t> rest;
        rest.reserve(n - 2);
        for (std::size_t a = 0; a + 1 < n; ++a)
            if (a != j) rest.push_back(idx[a]);
        out -= wick(lat, f, rest, rest.size());
    }
    return out;
}

}  // namespace

Complex ChaosObservable::operator()(const SpectralField& field) const {
    Complex sum{};
    for (const auto& term : terms_) {
        auto idx = term.modes;
        sum += term.coeff * wick(*lattice_, field, idx, idx.size());
    }
    return sum;
}

std::vector<ItoReport> ito_bound_check(std::span<const ChaosVector> observables, const SimConfig& config) {
    config.validate();
    std::vector<ChaosObservable> obs;
    for (const auto& f : observables) obs.emplace_back(f);
    const std::size_t K = obs.size();
    const double dt = config.dt;

    struct State {
        std::vector<Complex> prev, integral;
        std::vector<double> sup;
    };
    std::vector<Moments> sup(K), terminal(K);

    run_blocked<State>(
        config, [&] { return State{std::vector<Complex>(K), std::vector<Complex>(K), std::vector<double>(K)}; },
        [&](State& st, std::size_t s, const SpectralField& f) {
            for (std::size_t j = 0; j < K; ++j) {
                const Complex F = obs[j](f);
                if (s > 0) {
                    st.integral[j] += 0.5 * dt * (st.prev[j] + F);
                    st.sup[j] = std::max(st.sup[j], std::norm(st.integral[j]));
                }
                st.prev[j] = F;
            }
        },
        [&](State& st) {
            for (std::size_t j = 0; j < K; ++j) {
                sup[j].add(st.sup[j]);
                terminal[j].add(std::norm(st.integral[j]));
            }
        });

    std::vector<ItoReport> out;
    for (std::size_t j = 0; j < K; ++j) {
        const double h = norm(apply_neg_L0_power(observables[j], -0.5));
        out.push_back({sup[j].mean(), sup[j].std_err(), terminal[j].mean(), terminal[j].std_err(),
                       config.final_time() * h * h});
    }
    return out;
}

ItoReport ito_bound_check(const ChaosVector& observable, const SimConfig& config) {
    return ito_bound_check(std::span<const ChaosVector>(&observable, 1), config).front();
}

}  // namespace burgers
