#pragma once

#include "burgers/fock.hpp"
#include "burgers/lattice.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace burgers {

// lambda^2 log(1 + M^2 / x) for x >= 1/2, d = 2.
double L_eps(double x, const ModeLattice& lattice);
double L_eps(double x, double cutoff);

// G(x) = ((3|w|^2 x / 2pi + 1)^{2/3} - 1) / |w|^2, the solution of
// G' = 1 / (pi sqrt(1 + |w|^2 G)), G(0) = 0.
class GFunction {
public:
    explicit GFunction(double w_norm2);

    double operator()(double x) const;
    double derivative(double x) const;
    // |pi G'(x) sqrt(1 + |w|^2 G(x)) - 1|
    double ode_residual(double x) const;
    double w_norm2() const { return w2_; }

private:
    double w2_;
};

// Effective diffusivity G(1).
double d_she(double w_norm2);

// 2 / (|k|^2 + (w.k)^2 G(L(|k|^2 / 2))) summed over the tuple, i.e. the
// multiplier of (-L0 - L0^w G)^{-1}.
double sigma_multiplier(const ModeTuple& t, const ModeLattice& lattice, const NonlinearitySpec& spec);
double sigma_multiplier(std::span<const Mode> modes, const ModeLattice& lattice, const NonlinearitySpec& spec);

// (lambda^2 / pi^2) sum_{l+m=k} J(l,m) sigma(l, m, spectators...).
double psi_eps(const Mode& k, const ModeLattice& lattice, const NonlinearitySpec& spec,
               std::span<const Mode> spectators = {});

// Fast evaluation of psi_eps for a whole k-sample at large cutoffs: iterates
// the disc directly with a lookup table of G(L(S/2)) in the integer S.
class PsiEvaluator {
public:
    PsiEvaluator(double cutoff, std::vector<double> w);
    double operator()(const Mode& k) const;
    double cutoff() const { return M_; }
    double lambda2() const { return lambda2_; }
    double g_of_L(double half_norm2) const;

private:
    double M_;
    int R_;
    double lambda2_;
    std::vector<double> w_;
    GFunction G_;
    std::vector<double> table_;  // G(L(S/2)), S = 0..2R^2
};

struct PsiSample {
    Mode k;
    double psi;
    double g_of_L;     // G(L(|k|^2/2))
    double deviation;  // |psi - g_of_L|
};

// Sample of modes along rays: radii 1, 2, 4, ... <= M, angles 0..pi/2 in 5 steps.
std::vector<Mode> ray_sample(double cutoff);
std::vector<PsiSample> psi_deviation(double cutoff, const std::vector<double>& w);

struct ReplacementSolution {
    FockKernel input;
    int low;   // i
    int high;  // n
    ChaosVector v;
};

inline constexpr std::size_t kDefaultReplacementBudget = 5'000'000;

// v_j = sigma (A+ v_{j-1} + 1_{j=i} A+ f), levels i..n.
ReplacementSolution solve_replacement_eq(const FockKernel& f, int low, int high, const NonlinearitySpec& spec,
                                         std::size_t budget = kDefaultReplacementBudget);

struct FdtResiduals {
    std::optional<double> h1;  // absent when the level n+1 image exceeds the budget
    double l2;
    double diff;
};

FdtResiduals fdt_residuals(const ReplacementSolution& sol, const NonlinearitySpec& spec,
                           std::size_t budget = kDefaultReplacementBudget);

// ||v|| for the replacement solution with levels low..high, where the top level
// is never stored: its norm is accumulated by pulling values tuple by tuple.
double replacement_l2_streamed(const FockKernel& f, int low, int high, const NonlinearitySpec& spec,
                               std::size_t budget = kDefaultReplacementBudget);

// [-A- sigma A+ + L0^w G] psi, the defect of the replacement approximation.
FockKernel replacement_defect(const FockKernel& psi, const NonlinearitySpec& spec);

}  // namespace burgers
