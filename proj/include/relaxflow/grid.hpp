#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace relaxflow {

using Complex = std::complex<double>;
using RealArray = std::vector<double>;
using ComplexArray = std::vector<Complex>;

class FftPlans;

/// Periodic torus [0, L)^dim sampled with n points per dimension.
///
/// Mode storage follows FFTW order: array index i along one axis carries the
/// integer wavenumber k = i for i <= n/2 and k = i - n otherwise, so that
/// k ranges over {-n/2+1, ..., n/2}. The physical frequency is 2*pi*k/L.
///
/// Coefficient normalization (used by every module):
///   c_k = (1/N) * sum_x f(x) exp(-i xi.x),   N = n^dim,
/// so a constant field 1 maps to c_0 = 1, and the torus L2 norm obeys
///   ||f||_{L2}^2 = L^dim * sum_k |c_k|^2.
class Grid {
public:
    Grid(int dim, int n_per_dim, double domain_length);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double length() const { return length_; }
    std::size_t size() const { return size_; }
    double spacing() const { return length_ / n_; }
    double volume() const;
    /// 2*pi/L, the smallest nonzero frequency magnitude.
    double base_frequency() const;

    /// Integer wavenumber of array index i along one axis.
    int wavenumber(int i) const { return i <= n_ / 2 ? i : i - n_; }
    /// Array index of integer wavenumber k along one axis.
    int index_of(int k) const { return k >= 0 ? k : k + n_; }

    /// Integer wavenumber vector of flat mode index.
    void wavenumbers(std::size_t idx, int* k) const;
    std::size_t flat_index(const int* k) const;
    /// Flat index of the mode -k.
    std::size_t mirror(std::size_t idx) const;

    /// Physical frequency component m of a mode.
    double frequency(std::size_t idx, int m) const;
    /// Frequency used by first-order derivatives: zero on the Nyquist index.
    double derivative_frequency(std::size_t idx, int m) const;
    double frequency_norm_sq(std::size_t idx) const;
    /// Largest |xi| over all stored modes (Nyquist corner included).
    double max_frequency() const;

    /// True if the mode survives the 2/3 dealiasing rule (|k_m| <= n/3 for all m).
    bool dealiased_keep(std::size_t idx) const;

    /// Physical coordinate m of flat sample index.
    double coordinate(std::size_t idx, int m) const;

    const FftPlans& plans() const { return *plans_; }

    bool operator==(const Grid& other) const
    {
        return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    int dim_;
    int n_;
    double length_;
    std::size_t size_;
    std::vector<double> deriv_freq_1d_;
    std::vector<double> freq_1d_;
    std::shared_ptr<const FftPlans> plans_;
};

/// FFTW plans for one grid shape. Execution is thread-safe; creation is
/// serialized internally.
class FftPlans {
public:
    FftPlans(int dim, int n);
    ~FftPlans();
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    /// Unnormalized forward DFT (sign -1), in place allowed.
    void forward(const Complex* in, Complex* out) const;
    /// Unnormalized backward DFT (sign +1).
    void backward(const Complex* in, Complex* out) const;

private:
    void* forward_ = nullptr;
    void* backward_ = nullptr;
};

} // namespace relaxflow
