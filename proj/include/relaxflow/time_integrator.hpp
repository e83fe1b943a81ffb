#pragma once

#include "relaxflow/linear_spectrum.hpp"
#include "relaxflow/models.hpp"

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace relaxflow {

struct StepperConfig {
    double dt = 0.01;
    double t_end = 2.0;
    /// Snapshots per unit time on the uniform output grid.
    double output_stride = 50.0;
    double cfl_safety = 0.5;
    /// Fixed by the dealiasing rule; kept for the record.
    double dealias_fraction = 2.0 / 3.0;
    int max_halvings = 20;
    /// Additional output times merged into the uniform schedule.
    std::vector<double> extra_output_times;

    void validate() const;
    /// 0, the uniform grid up to t_end, t_end, and the extra times; sorted and unique.
    std::vector<double> output_times() const;
};

/// Geometric times eps^2 * [lo, hi] that resolve the initial layer.
std::vector<double> initial_layer_times(double epsilon, double lo, double hi, int count);

class KsnsStepper;

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<DiagnosticsSample> diagnostics;
    long accepted_steps = 0;
    long halvings = 0;
    bool failed = false;
    std::string failure;
};

/// Exponential Runge-Kutta (two stages, c2 = 1/2, stiffly second order) with
/// the linear part of each mode treated exactly:
///   U1 = e^{hL/2} U + h/2 phi1(hL/2) N(U)
///   U+ = e^{hL} U + h (phi1 - 2 phi2)(hL) N(U) + 2h phi2(hL) N(U1).
/// The E-NS linear part splits per mode into B1 on (a, xi_hat.w) and B2 on
/// (Pw_m, u_m); the mean of w and u follows B2 at xi = 0 and the mean of a is fixed.
class EnsStepper {
public:
    EnsStepper(const Grid& grid, double epsilon, double mu, EnsOptions options = {});
    ~EnsStepper();
    EnsStepper(EnsStepper&&) noexcept;

    /// Advance by h. Rejects and halves (taking 2^k substeps) while h exceeds
    /// the transport CFL limit; throws CflError after max_halvings.
    EnsState step(const EnsState& s, double h, const StepperConfig& cfg);
    /// One step of size h without CFL control.
    EnsState step_unchecked(const EnsState& s, double h);

    long accepted_steps() const { return accepted_; }
    long halvings() const { return halvings_; }
    const EnsOptions& options() const { return opt_; }

private:
    struct Coefficients {
        double h = 0.0;
        // Indexed by integer |k|^2: B1 and B2 blocks of e^{hL/2}, h/2 phi1(hL/2),
        // e^{hL}, h(phi1 - 2 phi2)(hL), 2h phi2(hL).
        std::vector<std::array<Mat2, 5>> b1;
        std::vector<std::array<Mat2, 5>> b2;
    };

    const Coefficients& coefficients(double h);
    EnsState combine(const EnsState& U, const EnsState& N0, const EnsState* N1, const Coefficients& c,
                     bool second_stage) const;
    EnsState limit_step(const EnsState& s, double h);
    void restore(EnsState& s) const;
    double transport_speed(const EnsState& s) const;

    Grid grid_;
    double epsilon_;
    double mu_;
    EnsOptions opt_;
    std::vector<int> radial_key_;
    int max_key_ = 0;
    std::deque<Coefficients> cache_;
    std::unique_ptr<KsnsStepper> limit_;
    long accepted_ = 0;
    long halvings_ = 0;
};

/// Same scheme for KS-NS with the heat symbols -|xi|^2 (a) and -mu|xi|^2 (u).
class KsnsStepper {
public:
    /// linear_only drops the advection terms (control experiments).
    KsnsStepper(const Grid& grid, double mu, bool linear_only = false);

    KsnsState step(const KsnsState& s, double h, const StepperConfig& cfg);
    KsnsState step_unchecked(const KsnsState& s, double h);

    long accepted_steps() const { return accepted_; }
    long halvings() const { return halvings_; }

private:
    struct Coefficients {
        double h = 0.0;
        // Per |k|^2: [a | u] x {e^{z/2}, h/2 phi1(z/2), e^z, h(phi1 - 2phi2)(z), 2h phi2(z)}.
        std::vector<std::array<double, 10>> c;
    };

    const Coefficients& coefficients(double h);

    Grid grid_;
    double mu_;
    bool linear_only_;
    std::vector<int> radial_key_;
    int max_key_ = 0;
    std::deque<Coefficients> cache_;
    long accepted_ = 0;
    long halvings_ = 0;
};

using EnsHook = std::function<void(double, const EnsState&)>;
using KsnsHook = std::function<void(double, const KsnsState&)>;
using PairHook = std::function<void(double, const EnsState&, const KsnsState&)>;

/// Step through cfg.output_times(); the hook runs at each emitted time.
/// Errors stop the run and are reported through Trajectory::failed.
Trajectory<EnsState> integrate(const EnsState& initial, const StepperConfig& cfg, const EnsOptions& opt = {},
                               const EnsHook& hook = {}, bool store_states = true);
Trajectory<KsnsState> integrate(const KsnsState& initial, const StepperConfig& cfg, const KsnsHook& hook = {},
                                bool store_states = true);

/// E-NS and KS-NS advanced to the same output times, diagnostics evaluated at
/// each. The returned trajectory stores E-NS states only if store_states.
Trajectory<EnsState> integrate_pair(const EnsState& ens0, const KsnsState& ksns0, const StepperConfig& cfg,
                                    const ThresholdConfig& threshold, const EnsOptions& opt = {},
                                    const PairHook& hook = {}, bool store_states = false);

} // namespace relaxflow
