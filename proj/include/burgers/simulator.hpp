#pragma once

#include "burgers/fft_convolver.hpp"
#include "burgers/field.hpp"
#include "burgers/fock.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace burgers {

// exponential_euler: e^{-a dt} eta + phi1 dt N(eta) + noise.
// exponential_heun: trapezoidal rule on the drift in integrating-factor form,
// which keeps the invariant measure to second order in dt.
enum class Scheme { exponential_euler, exponential_heun };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct SimConfig {
    LatticePtr lattice;
    NonlinearitySpec spec;
    double dt = 0.0;
    double horizon = 0.0;
    std::size_t replicas = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    Scheme scheme = Scheme::exponential_heun;

    static double default_dt(double cutoff) { return 0.5 / (cutoff * cutoff); }

    void validate() const;
    std::size_t steps() const;
    double final_time() const { return static_cast<double>(steps()) * dt; }
};

// Exponential integrator step (Euler or Heun) for the cutoff equation. Holds the per-mode factors
// and an FFT workspace; one per thread.
class Stepper {
public:
    explicit Stepper(const SimConfig& config);

    void step(SpectralField& field, Rng& rng);
    double decay(std::size_t mode) const { return decay_[mode]; }

private:
    void hermitian_square(std::span<const Complex> in);

    LatticePtr lattice_;
    Scheme scheme_;
    FftConvolver fft_;
    std::vector<double> decay_;
    std::vector<Complex> drift_;  // dt * i lambda (w.q) / (2pi)^(d/2), times phi1 for Euler
    std::vector<double> noise_;   // sqrt(1 - e^{-|k|^2 dt}) / sqrt(2)
    std::vector<Complex> noise_draw_;
    std::vector<Complex> square_;
    std::vector<Complex> predictor_;
};

SpectralField step(const SpectralField& field, const SimConfig& config, Rng& rng);

// Runs every replica from a white-noise start; visit(replica, step, field) is
// called at step 0 and after each step. Replicas are distributed over threads,
// so visit must only touch replica-indexed state.
void run_replicas(const SimConfig& config,
                  const std::function<void(std::size_t, std::size_t, const SpectralField&)>& visit);

struct StationarityReport {
    std::vector<double> times;
    std::vector<Mode> modes;             // representatives of +-k pairs
    std::vector<std::vector<double>> mean;     // [time][mode] replica mean of |eta_hat|^2
    std::vector<std::vector<double>> std_err;  // [time][mode]
    std::vector<double> time_mean;       // per mode, replica mean of the time average
    std::vector<double> time_stderr;
    std::vector<double> energy_mean;     // per time, sum over all modes
    std::vector<double> energy_stderr;
    double max_z = 0.0;           // over (time, mode)
    double max_z_averaged = 0.0;  // over modes, time-averaged
};

StationarityReport stationarity(const SimConfig& config, std::size_t sample_every = 1);

struct CorrelationSeries {
    Mode k;
    std::vector<double> lags;
    std::vector<Complex> values;
    std::vector<double> std_err;
    double rate = 0.0;
    double rate_stderr = 0.0;
    std::size_t fit_points = 0;
    bool wide_errors = false;
};

// E[eta_t(k) eta_0(-k)] averaged over replicas and time origins. The decay
// rate is a least-squares fit of log Re C over the lags with Re C > fit_floor.
CorrelationSeries mode_correlation(const SimConfig& config, const Mode& k, std::span<const double> lags,
                                   double fit_floor = 0.1);

struct DiffusivitySeries {
    std::vector<double> t;
    std::vector<double> d;
    std::vector<double> std_err;
    bool wide_errors = false;
};

// 1 + (2 |w|^2 lambda^2 / t) int_0^t (t - r) C(r) dr, where C is the time
// correlation of the Wick-squared zero mode (2pi)^(-d/2) sum_k (|eta_k|^2 - 1).
DiffusivitySeries bulk_diffusivity(const SimConfig& config, std::span<const double> t_grid,
                                   std::size_t lag_stride = 1);

// Wick polynomial sum_t f(t) :eta(-t_1)...eta(-t_n): summed over ordered tuples.
class ChaosObservable {
public:
    explicit ChaosObservable(const ChaosVector& f);
    Complex operator()(const SpectralField& field) const;

private:
    struct Term {
        Complex coeff;
        std::vector<std::size_t> modes;  // indices of -k_j
    };
    LatticePtr lattice_;
    std::vector<Term> terms_;
};

struct ItoReport {
    double lhs_sup = 0.0;  // E sup_t |int_0^t F|^2 over the step grid
    double lhs_sup_stderr = 0.0;
    double lhs_terminal = 0.0;  // E |int_0^T F|^2
    double lhs_terminal_stderr = 0.0;
    double rhs = 0.0;  // T ||(-L0)^{-1/2} F||^2
};

std::vector<ItoReport> ito_bound_check(std::span<const ChaosVector> observables, const SimConfig& config);
ItoReport ito_bound_check(const ChaosVector& observable, const SimConfig& config);

}  // namespace burgers
