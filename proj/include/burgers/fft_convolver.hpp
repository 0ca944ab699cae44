#pragma once

#include "burgers/common.hpp"
#include "burgers/lattice.hpp"

#include <memory>
#include <span>
#include <vector>

namespace burgers {

// Linear autoconvolution of a Hermitian coefficient vector through a
// zero-padded real FFT grid. Each instance owns its buffers and plans;
// use one per thread.
class FftConvolver {
public:
    explicit FftConvolver(LatticePtr lattice);
    ~FftConvolver();
    FftConvolver(const FftConvolver&) = delete;
    FftConvolver& operator=(const FftConvolver&) = delete;
    FftConvolver(FftConvolver&&) noexcept;
    FftConvolver& operator=(FftConvolver&&) noexcept;

    // out[q] = sum over l+m=q of in[l] in[m], for every lattice mode q.
    void square(std::span<const Complex> in, std::span<Complex> out);

    int grid_size() const;
    const ModeLattice& lattice() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Smallest 2,3,5-smooth integer >= n.
int smooth_size(int n);

}  // namespace burgers
