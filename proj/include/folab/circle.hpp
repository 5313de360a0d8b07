#pragma once

#include "folab/estimators.hpp"
#include "folab/foliated.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace folab {

/// Lift F(x) = x + displacement(x mod 1) of a circle map, so that
/// F(x + 1) = F(x) + 1 by construction. Monotonicity is verified on a
/// dense grid at construction and cached; estimators that require a
/// homeomorphism lift refuse non-monotone instances.
class CircleLift {
public:
    /// Rigid rotation by rho0.
    static CircleLift rigid(double rho0);

    /// Arnold family F(x) = x + Omega + (K / 2π) sin(2πx); monotone iff 0 ≤ K ≤ 1.
    static CircleLift arnold(double Omega, double K);

    /// User displacement, grid-checked for monotonicity (default 2^12 points).
    static CircleLift custom(std::string name, std::function<double(double)> displacement,
                             int monotonicity_grid = 4096);

    double displacement(double x) const { return disp_(wrap01(x)); }
    double operator()(double x) const { return x + displacement(x); }

    bool monotone() const { return monotone_; }
    const std::string& name() const { return name_; }

private:
    CircleLift(std::string name, std::function<double(double)> disp, bool monotone)
        : name_(std::move(name)), disp_(std::move(disp)), monotone_(monotone) {}

    std::string name_;
    std::function<double(double)> disp_;
    bool monotone_ = true;
};

struct PeriodicOrbitWitness {
    long p = 0;
    long q = 1;       // candidate rotation number p/q, gcd(p, q) = 1
    double point = 0; // residual = |F^q(point) − point − p|
    double residual = 0;
};

/// Adapter to the foliated engine: leaf flow x ⊙ t = x + t mod 1,
/// trivial transversal action, τ_1 = displacement.
class CircleFoliation final : public FoliatedSystem {
public:
    explicit CircleFoliation(CircleLift lift) : lift_(std::move(lift)) {}

    TimeDomain time_domain() const override { return TimeDomain::discrete(); }
    Point leaf_translate(const Point& x, double s) const override {
        return Point{wrap01(x[0] + s)};
    }
    Point transversal(const Point& x, double) const override { return x; }
    double translation_step(const Point& x) const override { return lift_.displacement(x[0]); }
    double distance(const Point& x, const Point& y) const override {
        return circle_dist(x[0], y[0]);
    }

    const CircleLift& lift() const { return lift_; }

private:
    CircleLift lift_;
};

/// (F^N(x0) − x0) / N with a Cauchy gap against N/2.
/// Throws InvalidLiftError if the lift is not monotone.
TranslationEstimate rotation_number(const CircleLift& lift, double x0, long long N);

/// Rotation number by an exponentially weighted Birkhoff average of the
/// displacement. Far more accurate than the endpoint ratio for smoothly
/// conjugated Diophantine rotations; used by the parameter tuner.
double rotation_number_weighted(const CircleLift& lift, double x0, long long N);

/// Farey-ordered search over q ≤ q_max with grid-seeded bisection on
/// F^q(x) − x − p; returns a witness with residual ≤ tol or nothing.
std::optional<PeriodicOrbitWitness> detect_periodic_orbit(const CircleLift& lift, long q_max,
                                                          double tol);

/// Bisect Omega within [rho_target − K, rho_target + K] until the measured
/// rotation number of arnold(Omega, K) is within tol of rho_target.
/// Throws TuningFailureError if the iteration cap is reached first.
double tune_omega_to_rho(double K, double rho_target, double tol, long long N = 1000000,
                         int max_iter = 200);

/// γ̂ on a uniform grid of leaf points and the residual of h ∘ f vs
/// R_rho ∘ h in the circle metric. Requires no periodic orbit up to
/// q_max_check (irrationality surrogate), else throws NotApplicableError.
SemiconjugacyReport circle_semiconjugacy(const CircleLift& lift, double rho, int grid_size,
                                         double horizon, long q_max_check = 20);

} // namespace folab
