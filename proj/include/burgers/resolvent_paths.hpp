#pragma once

#include "burgers/fock.hpp"
#include "burgers/fock_dense.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace burgers {

enum class Sign { plus, minus };

// (-L0)^{-1/2} A^{+-} (-L0)^{-1/2}
FockKernel t_operator(Sign sign, const FockKernel& f, const NonlinearitySpec& spec);

// Height path p_0 = 1, p_1 = 2, steps of +-1, interior heights in 2..band.
struct PathSpec {
    std::vector<int> heights;
    int band = 0;

    int length() const { return static_cast<int>(heights.size()) - 1; }
    int end() const { return heights.back(); }
    void validate() const;
};

// All admissible paths of the given length ending at end_height, in
// lexicographic order of heights.
std::vector<PathSpec> enumerate_paths(int length, int band, int end_height);

// T_{p_L - p_{L-1}} ... T_{p_2 - p_1} T_+ f for a level-1 input.
FockKernel apply_path(const PathSpec& path, const FockKernel& f, const NonlinearitySpec& spec);

// 2i / (2pi)^(d/2)
Complex c1_constant(int dim);
// -4 C1^2 = 16 / (2pi)^d
double c3_constant(int dim);

struct DirectTerm {
    double value;
    double over_eps2;  // value * M^2
};

// 3 C2^2 lambda^4 (w.k/|k|)^2 sum_{k1+k2+k3=k} (w.q)^2 J(k1,k2) J(q,k3)
//   / (|k_{1:3}|^4 (|q|^2 + |k3|^2)^2),  q = k1 + k2,  C2 = (2/3) C1^2.
// Sup-norm lattices use a separable double Laplace quadrature; Euclidean
// lattices are summed directly.
DirectTerm direct_term(const Mode& k, const ModeLattice& lattice, const NonlinearitySpec& spec);
DirectTerm direct_term_bruteforce(const Mode& k, const ModeLattice& lattice, const NonlinearitySpec& spec);

// ||(-L0)^{-1/2} T+ T+ e_k||^2 and the sum of squared single-merge contributions.
struct SecondOrderNorm {
    double total;
    double direct;
};
SecondOrderNorm double_creation_norm(const Mode& k, LatticePtr lattice, const NonlinearitySpec& spec);

// S_{d-1} int_0^1 r^{d-1} / (2 r^2) dr by composite Gauss-Legendre.
double integral_I(int dim, int panels = 16);

struct PathDiffusivity {
    double value;                 // C3 lambda^2 sum_{l+m=k} J / (|l|^2 + |m|^2)
    double target;                // I * C3
    double relative_error;
    double operator_coefficient;  // e_k coefficient of T- T+ e_k divided by -(w.k)^2/|k|^2
};
PathDiffusivity d_path_121(const ModeLattice& lattice, const NonlinearitySpec& spec, const Mode& k);

struct DiagramReport {
    Mode k;
    double eps;
    Complex diagonal;   // coefficient of the input direction
    double predicted;   // -(C3/2) (w.k)^2 / |k| lambda^2 sum J / (|l|^2 + |m|^2 + |k|^2)
    double off_diagonal_norm2;
    bool momentum_conserved;
};
// |k| T- T+ applied to e_k (x) e_k.
DiagramReport diagonal_split(const Mode& k, LatticePtr lattice, const NonlinearitySpec& spec);

// ||(-L0)^{-1} A+ psi||^2 / ||N^{1/2} (-L0)^{1/2} psi||^2
double first_order_ratio(const FockKernel& psi, const NonlinearitySpec& spec);

// T restricted to one momentum sector of levels low..high, whitened: anti-Hermitian.
struct BandT {
    BandBasis band;
    Eigen::MatrixXcd T;
};
BandT band_t_operator(LatticePtr lattice, int low, int high, const Mode& momentum, const NonlinearitySpec& spec,
                      std::size_t budget = kDefaultTupleBudget);

struct ResolventCheck {
    double discrepancy;  // ||x1 - x2|| / ||b||
    double residual;     // ||(I - T) x1 - b|| / ||b||
    std::size_t dimension;
};
// x1 = (I - T)^{-1} b against x2 = int_0^S e^{-s} e^{sT} b ds, 64-point
// Gauss-Legendre per unit interval.
ResolventCheck resolvent_identity_check(const BandT& op, const Eigen::VectorXcd& b, int horizon);

}  // namespace burgers
