#pragma once

#include "relaxflow/linear_spectrum.hpp"

#include <string>
#include <vector>

namespace relaxflow {

/// Radial data profile |f(xi)| on continuous frequency.
///   Power:    |xi|^-(sigma1 + d/2) for |xi| <= cutoff_hi, 0 beyond
///   Gaussian: e^{-|xi|^2}
struct RadialProfile {
    enum class Kind { Power, Gaussian };

    Kind kind = Kind::Power;
    double sigma1 = -1.0;
    int d = 2;
    double cutoff_hi = 10.0;

    void validate() const;
    double amplitude(double xi) const;
    /// Exponent p with |f|^2 xi^{d + 2 sigma} ~ xi^p as xi -> 0.
    double small_xi_exponent(double sigma) const;
    /// The same profile one degree rougher (sigma1 - 1).
    RadialProfile lower_regularity() const;
};

enum class SymbolKind { Heat, B1, B2 };

/// Output row applied to the 2x2 Green matrix (both data columns carry the profile):
///   Density              B1, (1, 0)
///   CompressibleVelocity B1, (0, 1)
///   Pw                   B2, (1, 0)
///   U                    B2, (0, 1)
///   R                    B2, (1, -eps)   R = Pw - eps u
/// The heat symbol ignores the selector.
enum class Component { Density, CompressibleVelocity, Pw, U, R };

struct DecayQuery {
    SymbolKind symbol = SymbolKind::Heat;
    Component component = Component::Density;
    double epsilon = 0.1;
    double mu = 1.0;
    double sigma = 0.0;
};

std::string to_string(SymbolKind s);
std::string to_string(Component c);
SymbolKind parse_symbol(const std::string& s);
Component parse_component(const std::string& s);

/// sum over data columns of |row . G(t, xi) e_col|^2.
double green_row_energy(const DecayQuery& q, double xi, double t);

/// (int_0^inf |xi|^{2 sigma} |row G(t, xi)|^2 |f(xi)|^2 xi^{d-1} dxi)^{1/2} by adaptive
/// Gauss-Kronrod (7/15) on unit panels in log xi, plus the analytic small-xi tail.
/// Requires t >= 0 and a convergent small-xi tail; NumericalError if the
/// adaptive refinement does not converge.
double semigroup_norm(const RadialProfile& profile, const DecayQuery& q, double t, double rtol = 1e-8);

struct DecayFit {
    double sigma = 0.0;
    double t_lo = 10.0;
    double t_hi = 1000.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double stderr_slope = 0.0;
    std::vector<double> times;
    std::vector<double> norms;
};

/// Least-squares slope of log norm against log t over geometric samples; needs t_hi >= 10 t_lo.
DecayFit fit_decay(const RadialProfile& profile, const DecayQuery& q, double t_lo = 10.0, double t_hi = 1000.0,
                   int samples = 40, double rtol = 1e-8);

/// (int phi(2^-j xi)^2 |f(xi)|^2 xi^{d-1} dxi)^{1/2}, the continuous dyadic block norm.
double profile_block_norm(const RadialProfile& profile, int j);

} // namespace relaxflow
