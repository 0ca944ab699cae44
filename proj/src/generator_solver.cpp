#include "burgers/generator_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace burgers {

void TruncatedSystem::validate() const {
    if (low < 1) throw std::invalid_argument("truncated system needs low level >= 1");
    if (high < low) throw std::invalid_argument("truncated system needs high >= low");
    if (high >= kMaxLevel) throw std::invalid_argument("truncation level too large");
    for (int n = rhs.low(); n <= rhs.high(); ++n)
        if (!rhs.level(n).empty() && (n < low || n > high))
            throw std::invalid_argument("right-hand side must be supported on levels low..high");
    spec.validate(rhs.lattice().dim());
}

namespace {

// S_j of the block elimination: diagonal at the top level, dense below.
struct Schur {
    bool diagonal = true;
    Eigen::VectorXd diag;
    Eigen::MatrixXcd dense;
    Eigen::LLT<Eigen::MatrixXcd> llt;

    template <class Rhs>
    Eigen::MatrixXcd solve(const Rhs& b) const {
        if (diagonal) return diag.cwiseInverse().asDiagonal() * Eigen::MatrixXcd(b);
        return llt.solve(Eigen::MatrixXcd(b));
    }

    Eigen::MatrixXcd matrix() const {
        if (diagonal) return Eigen::MatrixXcd(diag.cast<Complex>().asDiagonal());
        return dense;
    }
};

// Next Schur complement one level down: diag(e) + B^H S^{-1} B with B = A+.
Schur eliminate(const Schur& upper, const SparseMatrix& aplus, const Eigen::VectorXd& energy) {
    Schur s;
    s.diagonal = false;
    if (upper.diagonal) {
        const SparseMatrix scaled = upper.diag.cwiseInverse().cast<Complex>().asDiagonal() * aplus;
        s.dense = Eigen::MatrixXcd(SparseMatrix(aplus.adjoint() * scaled));
    } else {
        const Eigen::MatrixXcd x = upper.llt.solve(Eigen::MatrixXcd(aplus));
        s.dense = aplus.adjoint() * x;
    }
    s.dense = 0.5 * (s.dense + s.dense.adjoint()).eval();
    s.dense.diagonal() += energy.cast<Complex>();
    s.llt.compute(s.dense);
    if (s.llt.info() != Eigen::Success) throw std::runtime_error("Schur complement is not positive definite");
    return s;
}

struct BandOperators {
    BandBasis band;
    std::vector<SparseMatrix> aplus;  // aplus[j - low]: level j -> j+1, whitened
};

BandOperators band_operators(LatticePtr lattice, int low, int high, const std::optional<Mode>& momentum,
                             const NonlinearitySpec& spec, std::size_t budget) {
    BandOperators ops{BandBasis::enumerate(std::move(lattice), low, high, momentum, budget), {}};
    for (int j = low; j < high; ++j)
        ops.aplus.push_back(assemble_sparse(OperatorKind::Aplus, ops.band.level(j), ops.band.level(j + 1), spec,
                                            Coordinates::whitened));
    return ops;
}

}  // namespace

TruncatedSolution solve_truncated(const TruncatedSystem& system, const SolveOptions& options) {
    system.validate();
    const auto& lat_ptr = system.rhs.lattice_ptr();
    const int lo = system.low;
    const int hi = system.high;
    TruncatedSolution result{ChaosVector(lat_ptr, lo, hi), {}, 0.0, std::nullopt};
    double oracle_diff2 = 0.0;
    double u_norm2 = 0.0;

    for (const auto& P : sectors_of(system.rhs)) {
        const auto ops = band_operators(lat_ptr, lo, hi, P, system.spec, options.budget);
        const auto& band = ops.band;
        const ChaosVector g = sector_part(system.rhs, P);
        std::vector<Eigen::VectorXcd> gt(static_cast<std::size_t>(hi - lo + 1));
        for (int j = lo; j <= hi; ++j) {
            const auto& b = band.level(j);
            gt[static_cast<std::size_t>(j - lo)] = g.has_level(j) ? coordinates(g.level(j), b, Coordinates::whitened)
                                                                  : Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
        }
        std::vector<Schur> schur(static_cast<std::size_t>(hi - lo + 1));
        schur.back().diag = band.level(hi).energies();
        for (int j = hi; j > lo; --j) {
            const auto& S = schur[static_cast<std::size_t>(j - lo)];
            const auto& B = ops.aplus[static_cast<std::size_t>(j - 1 - lo)];
            schur[static_cast<std::size_t>(j - 1 - lo)] = eliminate(S, B, band.level(j - 1).energies());
            gt[static_cast<std::size_t>(j - 1 - lo)] -= B.adjoint() * S.solve(gt[static_cast<std::size_t>(j - lo)]);
        }
        std::vector<Eigen::VectorXcd> u(gt.size());
        u[0] = schur[0].solve(gt[0]);
        for (int j = lo + 1; j <= hi; ++j) {
            const auto idx = static_cast<std::size_t>(j - lo);
            u[idx] = schur[idx].solve(gt[idx] + ops.aplus[idx - 1] * u[idx - 1]);
        }
        Eigen::VectorXcd x(static_cast<Eigen::Index>(band.size()));
        for (int j = lo; j <= hi; ++j) {
            const auto idx = static_cast<std::size_t>(j - lo);
            x.segment(static_cast<Eigen::Index>(band.offset(j)), u[idx].size()) = u[idx];
            result.u.level(j) += kernel_from(u[idx], band.level(j), Coordinates::whitened);
        }
        u_norm2 += x.squaredNorm();

        if (options.run_oracle) {
            const SparseMatrix K = assemble_band(band, system.spec, -1.0, -1.0);
            Eigen::SparseLU<SparseMatrix> lu;
            lu.compute(K);
            if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU of the band failed");
            const Eigen::VectorXcd ref = lu.solve(band_coordinates(g, band));
            oracle_diff2 += (ref - x).squaredNorm();
        }
    }
    if (options.run_oracle) result.oracle_difference = std::sqrt(oracle_diff2 / std::max(u_norm2, 1e-300));
    result.residuals = truncated_residuals(system, result.u);
    for (double r : result.residuals) result.max_residual = std::max(result.max_residual, r);
    return result;
}

std::vector<double> truncated_residuals(const TruncatedSystem& system, const ChaosVector& u) {
    const double gnorm = norm(system.rhs);
    std::vector<double> out;
    for (int j = system.low; j <= system.high; ++j) {
        FockKernel r = apply_L0(u.level(j));
        r *= -1.0;
        if (j > system.low) r -= apply_Aplus(u.level(j - 1), system.spec);
        if (j < system.high) r -= apply_Aminus(u.level(j + 1), system.spec);
        if (system.rhs.has_level(j)) r -= system.rhs.level(j);
        out.push_back(norm(r) / std::max(gnorm, 1e-300));
    }
    return out;
}

Eigen::VectorXd HOperator::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

HOperator h_operator(int depth, int level, LatticePtr lattice, const NonlinearitySpec& spec,
                     std::optional<Mode> momentum, std::size_t budget) {
    if (depth < 0 || level < 1) throw std::invalid_argument("h_operator needs depth >= 0 and level >= 1");
    const auto ops = band_operators(lattice, level, level + depth, momentum, spec, budget);
    const auto& base = ops.band.level(level);
    HOperator h{depth, level, base, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(base.size()),
                                                            static_cast<Eigen::Index>(base.size()))};
    if (depth == 0) return h;
    Schur s;
    s.diag = ops.band.level(level + depth).energies();
    for (int j = level + depth; j > level; --j)
        s = eliminate(s, ops.aplus[static_cast<std::size_t>(j - 1 - level)], ops.band.level(j - 1).energies());
    h.matrix = s.dense;
    h.matrix.diagonal() -= base.energies().cast<Complex>();
    return h;
}

std::vector<double> h_fixed_point_gaps(int max_depth, int level, LatticePtr lattice, const NonlinearitySpec& spec,
                                       std::optional<Mode> momentum, std::size_t budget) {
    std::vector<double> gaps;
    Eigen::MatrixXcd prev = h_operator(0, level, lattice, spec, momentum, budget).matrix;
    for (int j = 1; j <= max_depth; ++j) {
        Eigen::MatrixXcd cur = h_operator(j, level, lattice, spec, momentum, budget).matrix;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cur - prev, Eigen::EigenvaluesOnly);
        gaps.push_back(es.eigenvalues().cwiseAbs().maxCoeff());
        prev = std::move(cur);
    }
    return gaps;
}

double apriori_ratio(const ChaosVector& u, const ChaosVector& g, double k) {
    const double den = norm(apply_neg_L0_power(g, -0.5));
    if (!(den > 0.0)) throw std::invalid_argument("a-priori ratio needs a nonzero right-hand side");
    return norm(number_power(apply_neg_L0_power(u, 0.5), k)) / den;
}

ResolventBound resolvent_contraction(const ChaosVector& psi, double mu, int low, int high,
                                     const NonlinearitySpec& spec, std::size_t budget) {
    if (!(mu > 0.0)) throw std::invalid_argument("resolvent parameter must be positive");
    double lhs2 = 0.0;
    for (const auto& P : sectors_of(psi)) {
        const auto band = BandBasis::enumerate(psi.lattice_ptr(), low, high, P, budget);
        SparseMatrix K = assemble_band(band, spec, -1.0, -1.0);
        SparseMatrix id(K.rows(), K.cols());
        id.setIdentity();
        K += mu * id;
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU of the resolvent failed");
        lhs2 += lu.solve(band_coordinates(sector_part(psi, P), band)).squaredNorm();
    }
    const auto& lat = psi.lattice();
    const double rhs = norm(apply_multiplier(psi, [&](const ModeTuple& t) {
                           return 1.0 / std::sqrt(mu + kinetic_energy(lat, t));
                       })) / std::sqrt(mu);
    return {std::sqrt(lhs2), rhs};
}

}  // namespace burgers
