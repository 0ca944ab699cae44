#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace burgers {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

// (2*pi)^(d/2), the normalisation of e_k.
double fourier_volume_root(int dim);

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::size_t requested, std::size_t budget)
        : std::runtime_error(what + ": requested " + std::to_string(requested) + ", budget " +
                             std::to_string(budget)),
          requested_(requested),
          budget_(budget) {}

    std::size_t requested() const { return requested_; }
    std::size_t budget() const { return budget_; }

private:
    std::size_t requested_;
    std::size_t budget_;
};

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace burgers
