#include "relaxflow/grid.hpp"

#include "relaxflow/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace relaxflow {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

// ============================================================================
// FFT plans
// ============================================================================

FftPlans::FftPlans(int dim, int n)
{
    std::vector<int> shape(static_cast<std::size_t>(dim), n);
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(n);

    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* buf = fftw_alloc_complex(total);
    // ESTIMATE keeps the chosen algorithm (and therefore every output bit)
    // independent of machine load; UNALIGNED allows execution on std::vector storage.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(dim, shape.data(), buf, buf, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(dim, shape.data(), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (!forward_ || !backward_) throw NumericalError("FFTW planning failed");
}

FftPlans::~FftPlans()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void FftPlans::forward(const Complex* in, Complex* out) const
{
    auto* i = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in));
    fftw_execute_dft(static_cast<fftw_plan>(forward_), i, reinterpret_cast<fftw_complex*>(out));
}

void FftPlans::backward(const Complex* in, Complex* out) const
{
    auto* i = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in));
    fftw_execute_dft(static_cast<fftw_plan>(backward_), i, reinterpret_cast<fftw_complex*>(out));
}

// ============================================================================
// Grid
// ============================================================================

Grid::Grid(int dim, int n_per_dim, double domain_length)
    : dim_(dim), n_(n_per_dim), length_(domain_length)
{
    if (dim < 2 || dim > 3)
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
    if (n_per_dim < 8 || !is_power_of_two(n_per_dim))
        throw ConfigError("modes per dimension must be a power of two >= 8, got " +
                          std::to_string(n_per_dim));
    if (!(domain_length > 0.0) || !std::isfinite(domain_length))
        throw ConfigError("domain length must be positive and finite");

    size_ = 1;
    for (int i = 0; i < dim_; ++i) size_ *= static_cast<std::size_t>(n_);

    const double k0 = base_frequency();
    freq_1d_.resize(static_cast<std::size_t>(n_));
    deriv_freq_1d_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        freq_1d_[i] = k0 * wavenumber(i);
        deriv_freq_1d_[i] = (i == n_ / 2) ? 0.0 : freq_1d_[i];
    }
    plans_ = std::make_shared<const FftPlans>(dim_, n_);
}

double Grid::volume() const { return std::pow(length_, dim_); }

double Grid::base_frequency() const { return 2.0 * std::numbers::pi / length_; }

void Grid::wavenumbers(std::size_t idx, int* k) const
{
    for (int m = dim_ - 1; m >= 0; --m) {
        k[m] = wavenumber(static_cast<int>(idx % static_cast<std::size_t>(n_)));
        idx /= static_cast<std::size_t>(n_);
    }
}

std::size_t Grid::flat_index(const int* k) const
{
    std::size_t idx = 0;
    for (int m = 0; m < dim_; ++m) idx = idx * static_cast<std::size_t>(n_) + index_of(k[m]);
    return idx;
}

std::size_t Grid::mirror(std::size_t idx) const
{
    int k[3];
    wavenumbers(idx, k);
    for (int m = 0; m < dim_; ++m) {
        k[m] = -k[m];
        if (k[m] == -n_ / 2) k[m] = n_ / 2; // Nyquist is its own mirror
    }
    return flat_index(k);
}

double Grid::frequency(std::size_t idx, int m) const
{
    for (int s = dim_ - 1; s > m; --s) idx /= static_cast<std::size_t>(n_);
    return freq_1d_[idx % static_cast<std::size_t>(n_)];
}

double Grid::derivative_frequency(std::size_t idx, int m) const
{
    for (int s = dim_ - 1; s > m; --s) idx /= static_cast<std::size_t>(n_);
    return deriv_freq_1d_[idx % static_cast<std::size_t>(n_)];
}

double Grid::frequency_norm_sq(std::size_t idx) const
{
    double s = 0.0;
    for (int m = dim_ - 1; m >= 0; --m) {
        const double f = freq_1d_[idx % static_cast<std::size_t>(n_)];
        s += f * f;
        idx /= static_cast<std::size_t>(n_);
    }
    return s;
}

double Grid::max_frequency() const { return base_frequency() * (n_ / 2) * std::sqrt(double(dim_)); }

bool Grid::dealiased_keep(std::size_t idx) const
{
    const int kmax = n_ / 3;
    for (int m = 0; m < dim_; ++m) {
        const int k = wavenumber(static_cast<int>(idx % static_cast<std::size_t>(n_)));
        if (k > kmax || k < -kmax) return false;
        idx /= static_cast<std::size_t>(n_);
    }
    return true;
}

double Grid::coordinate(std::size_t idx, int m) const
{
    for (int s = dim_ - 1; s > m; --s) idx /= static_cast<std::size_t>(n_);
    return spacing() * static_cast<double>(idx % static_cast<std::size_t>(n_));
}

} // namespace relaxflow
