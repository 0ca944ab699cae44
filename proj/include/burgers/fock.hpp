#pragma once

#include "burgers/common.hpp"
#include "burgers/field.hpp"
#include "burgers/lattice.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace burgers {

inline constexpr int kMaxLevel = 10;

// Sorted multiset of lattice indices; the canonical representative of a
// permutation orbit of mode tuples.
class ModeTuple {
public:
    using Index = std::uint32_t;

    ModeTuple() = default;
    // Sorts the input.
    static ModeTuple from(std::span<const Index> indices);
    static ModeTuple from(std::initializer_list<Index> indices);

    int level() const { return n_; }
    Index operator[](int i) const { return idx_[static_cast<std::size_t>(i)]; }
    std::span<const Index> indices() const { return {idx_.data(), static_cast<std::size_t>(n_)}; }

    // Copy with position pos removed.
    ModeTuple erase_at(int pos) const;
    // Copy with one more index, kept sorted.
    ModeTuple insert(Index i) const;
    int count(Index i) const;
    // Number of distinct orderings, n! / prod(c_j!).
    double orbit_size() const;

    friend bool operator==(const ModeTuple& a, const ModeTuple& b) {
        return a.n_ == b.n_ && a.idx_ == b.idx_;
    }
    friend std::strong_ordering operator<=>(const ModeTuple& a, const ModeTuple& b);

    std::size_t hash() const;

private:
    std::array<Index, kMaxLevel> idx_{};
    std::uint8_t n_ = 0;
};

struct ModeTupleHash {
    std::size_t operator()(const ModeTuple& t) const { return t.hash(); }
};

double factorial(int n);

// n! * orbit size: the weight of a canonical tuple in the n!-scaled inner product.
inline double fock_weight(const ModeTuple& t) { return factorial(t.level()) * t.orbit_size(); }

Mode total_momentum(const ModeLattice& lattice, const ModeTuple& t);
// 1/2 sum |k_j|^2, the multiplier of -L0.
double kinetic_energy(const ModeLattice& lattice, const ModeTuple& t);

// Symmetric function of n lattice modes, stored once per orbit.
class FockKernel {
public:
    using Map = std::unordered_map<ModeTuple, Complex, ModeTupleHash>;

    FockKernel(LatticePtr lattice, int level);

    // Kernel equal to 1 on the orbit of (k_1..k_n).
    static FockKernel unit(LatticePtr lattice, std::span<const Mode> modes);
    static FockKernel unit(LatticePtr lattice, std::initializer_list<Mode> modes);

    int level() const { return level_; }
    const ModeLattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const Map& values() const { return values_; }

    Complex value(const ModeTuple& t) const;
    Complex at(std::initializer_list<Mode> modes) const;
    void set(const ModeTuple& t, Complex v);
    void add(const ModeTuple& t, Complex v);
    ModeTuple tuple_of(std::span<const Mode> modes) const;

    // Drops entries with |value| <= tol.
    void prune(double tol = 0.0);

    FockKernel& operator*=(Complex s);
    FockKernel& operator+=(const FockKernel& other);
    FockKernel& operator-=(const FockKernel& other);

private:
    LatticePtr lattice_;
    int level_;
    Map values_;
};

// (phi (x) psi + psi (x) phi) / 2 for two level-1 kernels.
FockKernel symmetric_product(const FockKernel& phi, const FockKernel& psi);

// Finite direct sum of kernels on contiguous levels low..high.
class ChaosVector {
public:
    ChaosVector(LatticePtr lattice, int low, int high);
    explicit ChaosVector(FockKernel single);

    int low() const { return low_; }
    int high() const { return low_ + static_cast<int>(levels_.size()) - 1; }
    const ModeLattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }

    bool has_level(int n) const { return n >= low() && n <= high(); }
    FockKernel& level(int n);
    const FockKernel& level(int n) const;
    std::span<FockKernel> levels() { return levels_; }
    std::span<const FockKernel> levels() const { return levels_; }

    ChaosVector& operator+=(const ChaosVector& other);
    ChaosVector& operator-=(const ChaosVector& other);
    ChaosVector& operator*=(Complex s);

private:
    LatticePtr lattice_;
    int low_;
    std::vector<FockKernel> levels_;
};

Complex inner_product(const FockKernel& f, const FockKernel& g);
Complex inner_product(const ChaosVector& f, const ChaosVector& g);
double norm(const FockKernel& f);
double norm(const ChaosVector& f);

FockKernel apply_multiplier(const FockKernel& f, const std::function<double(const ModeTuple&)>& m);
ChaosVector apply_multiplier(const ChaosVector& v, const std::function<double(const ModeTuple&)>& m);

FockKernel apply_L0(const FockKernel& f);
// (-L0)^p for real p.
FockKernel apply_neg_L0_power(const FockKernel& f, double p);
ChaosVector apply_neg_L0_power(const ChaosVector& v, double p);

FockKernel apply_Aplus(const FockKernel& f, const NonlinearitySpec& spec);
// Level-1 input yields an empty level-0 kernel.
FockKernel apply_Aminus(const FockKernel& f, const NonlinearitySpec& spec);

ChaosVector number_op(const ChaosVector& v);
// Powers of N; p may be fractional.
ChaosVector number_power(const ChaosVector& v, double p);
ChaosVector momentum_op(int axis, const ChaosVector& v);

// L0 + A+ + A- on the levels of v, output on levels low-1..high+1 (level 0 dropped).
ChaosVector apply_generator(const ChaosVector& v, const NonlinearitySpec& spec);

// Random complex kernel with support on `support` random orbits, optionally
// restricted to a total momentum.
FockKernel random_kernel(LatticePtr lattice, int level, std::size_t support, Rng& rng,
                         std::optional<Mode> momentum = std::nullopt);
// f(-t) = conj f(t): the kernel of a real random variable.
FockKernel hermitian_part(const FockKernel& f);

void write_csv(std::ostream& os, const FockKernel& f);

// Calls body(l, m) for every unordered interacting split l + m = q with l <= m.
void for_each_split(const ModeLattice& lattice, std::size_t q,
                    const std::function<void(std::size_t, std::size_t)>& body);

// Push form of A+ applied to the canonical unit kernel on t: emit(s, coefficient).
void push_Aplus(const ModeLattice& lattice, const NonlinearitySpec& spec, const ModeTuple& t,
                const std::function<void(const ModeTuple&, Complex)>& emit);
void push_Aminus(const ModeLattice& lattice, const NonlinearitySpec& spec, const ModeTuple& t,
                 const std::function<void(const ModeTuple&, Complex)>& emit);

}  // namespace burgers
