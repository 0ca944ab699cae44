#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace burgers {

inline constexpr int kMaxDim = 5;

enum class NormKind { euclidean, sup };

std::string to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& name);

// Integer Fourier index. Components beyond dim() are kept at zero so that
// defaulted comparison is lexicographic on the active components.
class Mode {
public:
    Mode() = default;
    Mode(std::initializer_list<int> components);
    explicit Mode(std::span<const int> components);

    int dim() const { return dim_; }
    int operator[](int axis) const { return c_[static_cast<std::size_t>(axis)]; }
    int& operator[](int axis) { return c_[static_cast<std::size_t>(axis)]; }

    bool is_zero() const;
    long norm2() const;
    int sup_norm() const;
    double dot(std::span<const double> w) const;

    Mode operator-() const;
    friend Mode operator+(const Mode& a, const Mode& b);
    friend Mode operator-(const Mode& a, const Mode& b);

    friend bool operator==(const Mode&, const Mode&) = default;
    friend std::strong_ordering operator<=>(const Mode& a, const Mode& b);

    std::string str() const;

private:
    std::array<int, kMaxDim> c_{};
    int dim_ = 0;
};

NormKind default_norm(int dim);

// Weak-coupling constant: 1/sqrt(log M^2) in d=2, M^(1-d/2) for d>=3.
double lambda_eps(int dim, double cutoff);

// Cheap description of a truncated lattice; does not enumerate modes.
struct LatticeGeometry {
    int dim = 2;
    double cutoff = 1.0;
    NormKind norm = NormKind::euclidean;

    static LatticeGeometry make(int dim, double cutoff);
    static LatticeGeometry make(int dim, double cutoff, NormKind norm);

    int radius() const;
    double norm_of(const Mode& k) const;
    bool contains(const Mode& k) const;
    bool interacts(const Mode& l, const Mode& m) const;
    double coupling() const { return lambda_eps(dim, cutoff); }
    void validate() const;
};

// Enumerated mode set {k != 0 : |k| <= M} in lexicographic order with an
// O(1) box-addressed lookup from components to contiguous index.
class ModeLattice {
public:
    static constexpr std::int32_t npos = -1;

    ModeLattice(int dim, double cutoff);
    ModeLattice(int dim, double cutoff, NormKind norm);
    explicit ModeLattice(const LatticeGeometry& geometry);

    const LatticeGeometry& geometry() const { return geom_; }
    int dim() const { return geom_.dim; }
    double cutoff() const { return geom_.cutoff; }
    NormKind norm_kind() const { return geom_.norm; }
    // Throws std::domain_error when M <= 1.
    double lambda() const;
    int radius() const { return radius_; }

    std::size_t size() const { return modes_.size(); }
    const Mode& mode(std::size_t i) const { return modes_[i]; }
    std::span<const Mode> modes() const { return modes_; }

    std::int32_t find(const Mode& k) const;
    std::size_t index_of(const Mode& k) const;  // throws if absent
    bool contains(const Mode& k) const { return find(k) != npos; }

    std::size_t negated(std::size_t i) const { return neg_[i]; }
    long norm2(std::size_t i) const { return norm2_[i]; }
    // First nonzero component positive.
    bool in_half(std::size_t i) const { return half_[i] != 0; }

    bool j_indicator(const Mode& l, const Mode& m) const;
    // Index of mode(i)+mode(j) when (i, j) interact, npos otherwise.
    std::int32_t interacting_sum(std::size_t i, std::size_t j) const;
    // Index of k - mode(i) when (mode(i), k - mode(i)) interact, npos otherwise.
    std::int32_t interacting_partner(const Mode& k, std::size_t i) const;

private:
    LatticeGeometry geom_;
    double lambda_;
    int radius_;
    std::size_t side_;
    std::vector<Mode> modes_;
    std::vector<std::int32_t> box_;
    std::vector<std::size_t> neg_;
    std::vector<long> norm2_;
    std::vector<std::uint8_t> half_;
};

using LatticePtr = std::shared_ptr<const ModeLattice>;

LatticePtr make_lattice(int dim, double cutoff);
LatticePtr make_lattice(int dim, double cutoff, NormKind norm);

}  // namespace burgers
