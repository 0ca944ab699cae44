#pragma once

#include "burgers/fock.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace burgers {

inline constexpr std::size_t kDefaultTupleBudget = 20000;

using SparseMatrix = Eigen::SparseMatrix<Complex>;

// canonical: coefficient per orbit. whitened: coefficient times sqrt(n! * orbit),
// so that the Fock inner product becomes the Euclidean one.
enum class Coordinates { canonical, whitened };

// Canonical tuples of one chaos level, optionally restricted to a total momentum.
class FockBasis {
public:
    static constexpr std::int64_t npos = -1;

    static FockBasis enumerate(LatticePtr lattice, int level, std::optional<Mode> momentum,
                               std::size_t budget = kDefaultTupleBudget);

    int level() const { return level_; }
    const std::optional<Mode>& momentum() const { return momentum_; }
    const ModeLattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }

    std::size_t size() const { return tuples_.size(); }
    const ModeTuple& tuple(std::size_t i) const { return tuples_[i]; }
    std::int64_t find(const ModeTuple& t) const;
    double weight(std::size_t i) const { return weight_[i]; }
    double energy(std::size_t i) const { return energy_[i]; }  // -L0 multiplier

    Eigen::VectorXd weights() const;
    Eigen::VectorXd energies() const;

private:
    LatticePtr lattice_;
    int level_ = 0;
    std::optional<Mode> momentum_;
    std::vector<ModeTuple> tuples_;
    std::vector<double> weight_;
    std::vector<double> energy_;
    std::unordered_map<ModeTuple, std::size_t, ModeTupleHash> index_;
};

// Visits canonical tuples in increasing order until visit returns false.
void for_each_tuple(const ModeLattice& lattice, int level, const std::optional<Mode>& momentum,
                    const std::function<bool(const ModeTuple&)>& visit);

// Number of canonical tuples without storing them.
std::size_t count_tuples(const ModeLattice& lattice, int level, std::optional<Mode> momentum);

enum class OperatorKind { L0, Aplus, Aminus, number, momentum };

SparseMatrix assemble_sparse(OperatorKind kind, const FockBasis& domain, const FockBasis& codomain,
                             const NonlinearitySpec& spec, Coordinates coords, int axis = 0);

// Dense realization in canonical coordinates with the diagonal inner-product weights.
struct FockOperator {
    OperatorKind kind;
    int domain_level;
    int codomain_level;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXd domain_weight;
    Eigen::VectorXd codomain_weight;

    // Matrix in whitened coordinates.
    Eigen::MatrixXcd whitened() const;
    // Adjoint with respect to the weighted inner products.
    Eigen::MatrixXcd weighted_adjoint() const;
};

FockOperator assemble_matrix(OperatorKind kind, const FockBasis& domain, const FockBasis& codomain,
                             const NonlinearitySpec& spec, int axis = 0,
                             std::size_t budget = kDefaultTupleBudget);

Eigen::VectorXcd coordinates(const FockKernel& f, const FockBasis& basis, Coordinates coords);
FockKernel kernel_from(const Eigen::VectorXcd& x, const FockBasis& basis, Coordinates coords);

// Bases for consecutive levels of a single momentum sector.
struct BandBasis {
    int low = 1;
    std::vector<FockBasis> levels;

    int high() const { return low + static_cast<int>(levels.size()) - 1; }
    const FockBasis& level(int n) const { return levels[static_cast<std::size_t>(n - low)]; }
    std::size_t offset(int n) const;
    std::size_t size() const;

    static BandBasis enumerate(LatticePtr lattice, int low, int high, std::optional<Mode> momentum,
                               std::size_t budget = kDefaultTupleBudget);
};

// Block matrix on the band in whitened coordinates: a*L0 + b*(A+ + A-), with A
// acting only inside the band.
SparseMatrix assemble_band(const BandBasis& band, const NonlinearitySpec& spec, double l0_coeff, double a_coeff);

Eigen::VectorXcd band_coordinates(const ChaosVector& v, const BandBasis& band);
ChaosVector band_vector(const Eigen::VectorXcd& x, const BandBasis& band);

// Total momenta carried by any tuple of v, sorted.
std::vector<Mode> sectors_of(const ChaosVector& v);
// Restriction of v to one momentum sector.
ChaosVector sector_part(const ChaosVector& v, const Mode& momentum);

struct AlgebraBlock {
    int level;                     // A+ maps level -> level + 1
    std::optional<Mode> momentum;  // nullopt: unrestricted bases
    std::size_t domain_size;
    std::size_t codomain_size;
    double adjoint_defect;         // max|A- + (A+)^#| / max|A+|
    double commutator_defect;      // max over axes of max|[P_axis, A+-]| / max|A+-|
};

struct AlgebraReport {
    std::vector<AlgebraBlock> blocks;
    double max_adjoint_defect = 0.0;
    double max_commutator_defect = 0.0;
};

// Dense A+, A- between consecutive levels 1..max_level. Unrestricted bases are
// used when they fit the budget, otherwise a fixed set of momentum sectors.
AlgebraReport verify_operator_algebra(LatticePtr lattice, const NonlinearitySpec& spec, int max_level,
                                      std::size_t budget = kDefaultTupleBudget);

}  // namespace burgers
