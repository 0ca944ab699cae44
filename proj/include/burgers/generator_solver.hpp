#pragma once

#include "burgers/fock.hpp"
#include "burgers/fock_dense.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace burgers {

// -(L0 + P A P) u = g on levels low..high, g supported on low..rhs_high.
struct TruncatedSystem {
    NonlinearitySpec spec;
    int low = 1;
    int high = 1;
    ChaosVector rhs;

    void validate() const;
};

struct TruncatedSolution {
    ChaosVector u;
    // Per-level relative plug-back residual, index 0 is level `low`.
    std::vector<double> residuals;
    double max_residual = 0.0;
    // Relative difference to the monolithic sparse solve, when requested.
    std::optional<double> oracle_difference;
};

struct SolveOptions {
    std::size_t budget = kDefaultTupleBudget;
    bool run_oracle = false;
};

TruncatedSolution solve_truncated(const TruncatedSystem& system, const SolveOptions& options = {});

// Level-wise residual of -(L0 + PAP)u - g, each relative to ||g||.
std::vector<double> truncated_residuals(const TruncatedSystem& system, const ChaosVector& u);

// Self-adjoint operator on one level and momentum sector, in whitened coordinates.
struct HOperator {
    int depth = 0;
    int level = 1;
    FockBasis basis;
    Eigen::MatrixXcd matrix;

    Eigen::VectorXd eigenvalues() const;
};

// H_0 = 0, H_{j+1} = -A- (-L0 + H_j)^{-1} A+ on the next level up.
HOperator h_operator(int depth, int level, LatticePtr lattice, const NonlinearitySpec& spec,
                     std::optional<Mode> momentum, std::size_t budget = kDefaultTupleBudget);

// ||H_{j+1} - H_j|| (operator 2-norm) for j = 0..max_depth-1.
std::vector<double> h_fixed_point_gaps(int max_depth, int level, LatticePtr lattice, const NonlinearitySpec& spec,
                                       std::optional<Mode> momentum, std::size_t budget = kDefaultTupleBudget);

// ||N^k (-L0)^{1/2} u|| / ||(-L0)^{-1/2} g||.
double apriori_ratio(const ChaosVector& u, const ChaosVector& g, double k);

struct ResolventBound {
    double lhs;  // ||(mu - L)^{-1} psi||
    double rhs;  // mu^{-1/2} ||(mu - L0)^{-1/2} psi||
};

// Resolvent of the generator truncated to levels low..high.
ResolventBound resolvent_contraction(const ChaosVector& psi, double mu, int low, int high,
                                     const NonlinearitySpec& spec, std::size_t budget = kDefaultTupleBudget);

}  // namespace burgers
