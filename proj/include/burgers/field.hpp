#pragma once

#include "burgers/common.hpp"
#include "burgers/lattice.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace burgers {

struct NonlinearitySpec {
    std::vector<double> w;   // drift direction
    double coupling = 0.0;   // lambda, or a user override

    double w_dot(const Mode& k) const { return k.dot(w); }
    double w_norm2() const;
    void validate(int dim) const;
};

// NonlinearitySpec with the weak-coupling constant of the lattice.
NonlinearitySpec weak_coupling(const ModeLattice& lattice, std::vector<double> w);

// Fourier coefficients eta_hat(k) indexed like lattice modes. Hermitian
// symmetry is an invariant of the SPDE state but is not enforced so that
// test functions and intermediate products can share the type.
class SpectralField {
public:
    explicit SpectralField(LatticePtr lattice);
    SpectralField(LatticePtr lattice, std::vector<Complex> coeffs);

    const ModeLattice& lattice() const { return *lattice_; }
    const LatticePtr& lattice_ptr() const { return lattice_; }
    std::size_t size() const { return coeffs_.size(); }

    Complex& operator[](std::size_t i) { return coeffs_[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
    Complex at(const Mode& k) const;
    void set(const Mode& k, Complex value);

    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }

    bool is_hermitian(double tol = 0.0) const;
    double energy() const;  // sum |eta_hat(k)|^2

    SpectralField& operator*=(double s);
    SpectralField& operator+=(const SpectralField& other);

private:
    LatticePtr lattice_;
    std::vector<Complex> coeffs_;
};

using Rng = std::mt19937_64;

// Stream for (seed, replica); distinct replicas get decorrelated states.
Rng derived_rng(std::uint64_t seed, std::uint64_t stream);

void fill_white_noise(SpectralField& field, Rng& rng);
SpectralField sample_white_noise(LatticePtr lattice, std::uint64_t seed);

class FftConvolver;

// N_hat(q) = i/(2pi)^(d/2) * lambda * (w.q) * sum_{l+m=q} J(l,m) eta(l) eta(m).
// The FFT path requires a Hermitian input.
SpectralField nonlinearity(const SpectralField& field, const NonlinearitySpec& spec);
SpectralField nonlinearity(const SpectralField& field, const NonlinearitySpec& spec, FftConvolver& fft);
SpectralField nonlinearity_direct(const SpectralField& field, const NonlinearitySpec& spec);

// sum_k eta(k) phi(-k)
Complex pairing(const SpectralField& field, const SpectralField& testfn);

double invariance_residual(const SpectralField& field, const NonlinearitySpec& spec);

void write_binary(std::ostream& os, const SpectralField& field);
SpectralField read_binary(std::istream& is);
void write_csv(std::ostream& os, const SpectralField& field);

}  // namespace burgers
