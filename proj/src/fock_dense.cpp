#include "burgers/fock_dense.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>

namespace burgers {

namespace {

using Index = ModeTuple::Index;

}  // namespace

void for_each_tuple(const ModeLattice& lat, int level, const std::optional<Mode>& momentum,
                    const std::function<bool(const ModeTuple&)>& visit) {
    if (level < 1 || level > kMaxLevel) throw std::invalid_argument("basis level out of range");
    const int d = lat.dim();
    const int R = lat.radius();
    const double M = lat.cutoff();
    const bool euclid = lat.norm_kind() == NormKind::euclidean;
    std::array<Index, kMaxLevel> idx{};
    bool stop = false;

    auto feasible = [&](const Mode& p, int slots) {
        if (slots == 0) return p.is_zero();
        for (int a = 0; a < d; ++a)
            if (std::abs(p[a]) > slots * R) return false;
        if (euclid && static_cast<double>(p.norm2()) > slots * slots * M * M * (1.0 + 1e-12)) return false;
        return true;
    };

    std::function<void(int, Index, Mode)> rec = [&](int slot, Index from, Mode rest) {
        if (stop) return;
        const int left = level - slot;
        if (momentum && left == 1) {
            const auto last = lat.find(rest);
            if (last == ModeLattice::npos || static_cast<Index>(last) < from) return;
            idx[static_cast<std::size_t>(slot)] = static_cast<Index>(last);
            if (!visit(ModeTuple::from(std::span<const Index>(idx.data(), static_cast<std::size_t>(level))))) stop = true;
            return;
        }
        for (Index i = from; i < lat.size() && !stop; ++i) {
            idx[static_cast<std::size_t>(slot)] = i;
            if (left == 1) {
                if (!visit(ModeTuple::from(std::span<const Index>(idx.data(), static_cast<std::size_t>(level))))) stop = true;
                continue;
            }
            if (momentum) {
                const Mode next = rest - lat.mode(i);
                if (!feasible(next, left - 1)) continue;
                rec(slot + 1, i, next);
            } else {
                rec(slot + 1, i, rest);
            }
        }
    };
    Mode start = momentum ? *momentum : lat.mode(0);
    rec(0, 0, start);
}

std::size_t count_tuples(const ModeLattice& lattice, int level, std::optional<Mode> momentum) {
    std::size_t n = 0;
    for_each_tuple(lattice, level, momentum, [&](const ModeTuple&) {
        ++n;
        return true;
    });
    return n;
}

FockBasis FockBasis::enumerate(LatticePtr lattice, int level, std::optional<Mode> momentum, std::size_t budget) {
    FockBasis b;
    b.lattice_ = std::move(lattice);
    b.level_ = level;
    b.momentum_ = momentum;
    const auto& lat = *b.lattice_;
    bool over = false;
    for_each_tuple(lat, level, momentum, [&](const ModeTuple& t) {
        if (b.tuples_.size() >= budget) {
            over = true;
            return false;
        }
        b.tuples_.push_back(t);
        return true;
    });
    if (over)
        throw BudgetExceeded("Fock basis at level " + std::to_string(level), count_tuples(lat, level, momentum), budget);
    b.weight_.reserve(b.tuples_.size());
    b.energy_.reserve(b.tuples_.size());
    b.index_.reserve(b.tuples_.size());
    for (std::size_t i = 0; i < b.tuples_.size(); ++i) {
        b.weight_.push_back(fock_weight(b.tuples_[i]));
        b.energy_.push_back(kinetic_energy(lat, b.tuples_[i]));
        b.index_.emplace(b.tuples_[i], i);
    }
    return b;
}

std::int64_t FockBasis::find(const ModeTuple& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? npos : static_cast<std::int64_t>(it->second);
}

Eigen::VectorXd FockBasis::weights() const {
    return Eigen::Map<const Eigen::VectorXd>(weight_.data(), static_cast<Eigen::Index>(weight_.size()));
}

Eigen::VectorXd FockBasis::energies() const {
    return Eigen::Map<const Eigen::VectorXd>(energy_.data(), static_cast<Eigen::Index>(energy_.size()));
}

namespace {

int level_shift(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::Aplus: return 1;
        case OperatorKind::Aminus: return -1;
        default: return 0;
    }
}

}  // namespace

SparseMatrix assemble_sparse(OperatorKind kind, const FockBasis& domain, const FockBasis& codomain,
                             const NonlinearitySpec& spec, Coordinates coords, int axis) {
    if (codomain.level() != domain.level() + level_shift(kind))
        throw std::invalid_argument("codomain level does not match the operator");
    const auto& lat = domain.lattice();
    std::vector<Eigen::Triplet<Complex>> trip;
    auto scale = [&](std::size_t row, std::size_t col) {
        return coords == Coordinates::whitened ? std::sqrt(codomain.weight(row) / domain.weight(col)) : 1.0;
    };
    for (std::size_t col = 0; col < domain.size(); ++col) {
        const auto& t = domain.tuple(col);
        auto emit = [&](const ModeTuple& s, Complex c) {
            const auto row = codomain.find(s);
            if (row == FockBasis::npos) throw std::logic_error("operator leaves the codomain basis");
            trip.emplace_back(static_cast<int>(row), static_cast<int>(col), c * scale(static_cast<std::size_t>(row), col));
        };
        switch (kind) {
            case OperatorKind::L0: emit(t, -domain.energy(col)); break;
            case OperatorKind::number: emit(t, static_cast<double>(t.level())); break;
            case OperatorKind::momentum: {
                double s = 0.0;
                for (auto i : t.indices()) s += lat.mode(i)[axis];
                emit(t, s);
                break;
            }
            case OperatorKind::Aplus: push_Aplus(lat, spec, t, emit); break;
            case OperatorKind::Aminus: push_Aminus(lat, spec, t, emit); break;
        }
    }
    SparseMatrix m(static_cast<Eigen::Index>(codomain.size()), static_cast<Eigen::Index>(domain.size()));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Eigen::MatrixXcd FockOperator::whitened() const {
    const Eigen::VectorXd a = codomain_weight.cwiseSqrt();
    const Eigen::VectorXd b = domain_weight.cwiseSqrt().cwiseInverse();
    return a.asDiagonal() * matrix * b.asDiagonal();
}

Eigen::MatrixXcd FockOperator::weighted_adjoint() const {
    // <Af, g>_W = <f, A^# g>_W with A^# = W_dom^{-1} A^H W_cod.
    return domain_weight.cwiseInverse().asDiagonal() * matrix.adjoint() * codomain_weight.asDiagonal();
}

FockOperator assemble_matrix(OperatorKind kind, const FockBasis& domain, const FockBasis& codomain,
                             const NonlinearitySpec& spec, int axis, std::size_t budget) {
    const std::size_t total = domain.size() + (kind == OperatorKind::Aplus || kind == OperatorKind::Aminus ? codomain.size() : 0);
    if (total > budget) throw BudgetExceeded("dense operator assembly", total, budget);
    FockOperator op{kind, domain.level(), codomain.level(),
                    Eigen::MatrixXcd(assemble_sparse(kind, domain, codomain, spec, Coordinates::canonical, axis)),
                    domain.weights(), codomain.weights()};
    return op;
}

Eigen::VectorXcd coordinates(const FockKernel& f, const FockBasis& basis, Coordinates coords) {
    if (f.level() != basis.level()) throw std::invalid_argument("kernel level does not match the basis");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (const auto& [t, v] : f.values()) {
        const auto i = basis.find(t);
        if (i == FockBasis::npos) {
            if (v == Complex{}) continue;
            throw std::invalid_argument("kernel has support outside the basis");
        }
        x[i] = coords == Coordinates::whitened ? v * std::sqrt(basis.weight(static_cast<std::size_t>(i))) : v;
    }
    return x;
}

FockKernel kernel_from(const Eigen::VectorXcd& x, const FockBasis& basis, Coordinates coords) {
    FockKernel f(basis.lattice_ptr(), basis.level());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Complex v = x[static_cast<Eigen::Index>(i)];
        if (v == Complex{}) continue;
        f.set(basis.tuple(i), coords == Coordinates::whitened ? v / std::sqrt(basis.weight(i)) : v);
    }
    return f;
}

std::size_t BandBasis::offset(int n) const {
    std::size_t o = 0;
    for (int j = low; j < n; ++j) o += level(j).size();
    return o;
}

std::size_t BandBasis::size() const { return offset(high() + 1); }

BandBasis BandBasis::enumerate(LatticePtr lattice, int low, int high, std::optional<Mode> momentum, std::size_t budget) {
    if (low < 1 || high < low) throw std::invalid_argument("band needs 1 <= low <= high");
    BandBasis band;
    band.low = low;
    std::size_t used = 0;
    for (int n = low; n <= high; ++n) {
        if (used >= budget) throw BudgetExceeded("Fock band", used + count_tuples(*lattice, n, momentum), budget);
        try {
            band.levels.push_back(FockBasis::enumerate(lattice, n, momentum, budget - used));
        } catch (const BudgetExceeded& e) {
            throw BudgetExceeded("Fock band", used + e.requested(), budget);
        }
        used += band.levels.back().size();
    }
    return band;
}

SparseMatrix assemble_band(const BandBasis& band, const NonlinearitySpec& spec, double l0_coeff, double a_coeff) {
    const auto n = static_cast<Eigen::Index>(band.size());
    std::vector<Eigen::Triplet<Complex>> trip;
    auto add_block = [&](const SparseMatrix& m, std::size_t row0, std::size_t col0, double c) {
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                trip.emplace_back(static_cast<int>(row0 + static_cast<std::size_t>(it.row())),
                                  static_cast<int>(col0 + static_cast<std::size_t>(it.col())), c * it.value());
    };
    for (int lv = band.low; lv <= band.high(); ++lv) {
        const auto& b = band.level(lv);
        if (l0_coeff != 0.0)
            for (std::size_t i = 0; i < b.size(); ++i) {
                const auto r = static_cast<int>(band.offset(lv) + i);
                trip.emplace_back(r, r, Complex(-l0_coeff * b.energy(i)));
            }
        if (a_coeff == 0.0) continue;
        if (lv < band.high())
            add_block(assemble_sparse(OperatorKind::Aplus, b, band.level(lv + 1), spec, Coordinates::whitened),
                      band.offset(lv + 1), band.offset(lv), a_coeff);
        if (lv > band.low)
            add_block(assemble_sparse(OperatorKind::Aminus, b, band.level(lv - 1), spec, Coordinates::whitened),
                      band.offset(lv - 1), band.offset(lv), a_coeff);
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Eigen::VectorXcd band_coordinates(const ChaosVector& v, const BandBasis& band) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(band.size()));
    for (int n = v.low(); n <= v.high(); ++n) {
        if (v.level(n).empty()) continue;
        if (n < band.low || n > band.high()) throw std::invalid_argument("vector has levels outside the band");
        x.segment(static_cast<Eigen::Index>(band.offset(n)), static_cast<Eigen::Index>(band.level(n).size())) =
            coordinates(v.level(n), band.level(n), Coordinates::whitened);
    }
    return x;
}

ChaosVector band_vector(const Eigen::VectorXcd& x, const BandBasis& band) {
    ChaosVector v(band.levels.front().lattice_ptr(), band.low, band.high());
    for (int n = band.low; n <= band.high(); ++n) {
        const Eigen::VectorXcd seg =
            x.segment(static_cast<Eigen::Index>(band.offset(n)), static_cast<Eigen::Index>(band.level(n).size()));
        v.level(n) = kernel_from(seg, band.level(n), Coordinates::whitened);
    }
    return v;
}

std::vector<Mode> sectors_of(const ChaosVector& v) {
    std::set<Mode> s;
    for (const auto& f : v.levels())
        for (const auto& [t, val] : f.values())
            if (val != Complex{}) s.insert(total_momentum(v.lattice(), t));
    return {s.begin(), s.end()};
}

ChaosVector sector_part(const ChaosVector& v, const Mode& momentum) {
    ChaosVector out(v.lattice_ptr(), v.low(), v.high());
    for (int n = v.low(); n <= v.high(); ++n)
        for (const auto& [t, val] : v.level(n).values())
            if (total_momentum(v.lattice(), t) == momentum) out.level(n).set(t, val);
    return out;
}


namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

AlgebraBlock check_block(int n, const FockBasis& from, const FockBasis& to, const NonlinearitySpec& spec,
                         std::size_t budget) {
    AlgebraBlock b{n, from.momentum(), from.size(), to.size(), 0.0, 0.0};
    const auto ap = assemble_matrix(OperatorKind::Aplus, from, to, spec, 0, budget);
    const auto am = assemble_matrix(OperatorKind::Aminus, to, from, spec, 0, budget);
    const double scale = max_abs(ap.matrix);
    if (scale == 0.0) return b;
    b.adjoint_defect = max_abs(am.matrix + ap.weighted_adjoint()) / scale;
    for (int axis = 0; axis < from.lattice().dim(); ++axis) {
        const Eigen::VectorXcd pd = assemble_sparse(OperatorKind::momentum, from, from, spec, Coordinates::canonical, axis).diagonal();
        const Eigen::VectorXcd pc = assemble_sparse(OperatorKind::momentum, to, to, spec, Coordinates::canonical, axis).diagonal();
        const double up = max_abs(pc.asDiagonal() * ap.matrix - ap.matrix * pd.asDiagonal()) / scale;
        const double down = max_abs(pd.asDiagonal() * am.matrix - am.matrix * pc.asDiagonal()) / std::max(max_abs(am.matrix), 1e-300);
        b.commutator_defect = std::max({b.commutator_defect, up, down});
    }
    return b;
}

}  // namespace

AlgebraReport verify_operator_algebra(LatticePtr lattice, const NonlinearitySpec& spec, int max_level,
                                      std::size_t budget) {
    if (max_level < 2) throw std::invalid_argument("max_level must be at least 2");
    spec.validate(lattice->dim());
    const int d = lattice->dim();
    std::vector<Mode> sectors;
    {
        std::vector<int> c(static_cast<std::size_t>(d), 0);
        sectors.emplace_back(c);
        c[0] = 1;
        sectors.emplace_back(c);
        if (d > 1) c[1] = 1;
        sectors.emplace_back(c);
        if (d > 2) c[2] = -1;
        sectors.emplace_back(c);
    }
    AlgebraReport rep;
    for (int n = 1; n < max_level; ++n) {
        const std::size_t unrestricted = count_tuples(*lattice, n, std::nullopt) + count_tuples(*lattice, n + 1, std::nullopt);
        if (unrestricted <= budget) {
            rep.blocks.push_back(check_block(n, FockBasis::enumerate(lattice, n, std::nullopt, budget),
                                             FockBasis::enumerate(lattice, n + 1, std::nullopt, budget), spec, budget));
        } else {
            for (const auto& p : sectors)
                rep.blocks.push_back(check_block(n, FockBasis::enumerate(lattice, n, p, budget),
                                                 FockBasis::enumerate(lattice, n + 1, p, budget), spec, budget));
        }
    }
    for (const auto& b : rep.blocks) {
        rep.max_adjoint_defect = std::max(rep.max_adjoint_defect, b.adjoint_defect);
        rep.max_commutator_defect = std::max(rep.max_commutator_defect, b.commutator_defect);
    }
    return rep;
}

}  // namespace burgers
