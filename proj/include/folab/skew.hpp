#pragma once

#include "folab/estimators.hpp"
#include "folab/foliated.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace folab {

/// Φ̂_1^{x0}(x') given the base point x0 in T^d and fiber lift coordinate x'.
using FiberLift = std::function<double(std::span<const double>, double)>;

/// Discrete skew product over a torus translation: the base moves by the
/// frequency vector w each step, the fiber by a circle-lift map depending
/// on the base point. Fiber periodicity Φ̂(x0, x'+1) = Φ̂(x0, x')+1 and
/// fiber monotonicity are checked on grids at construction; the base
/// frequency vector (1, w) is screened for bounded integer relations as a
/// minimality surrogate.
class SkewProduct {
public:
    /// Fiber x' + Omega + (K/2π) sin(2π x') + A sin(2π x0_1).
    static SkewProduct qpf_arnold(double Omega, double K, double A, std::vector<double> base_freq);

    /// Product rotation seen through the fiberwise shear x' ↦ x' + c sin(2π x0_1):
    /// the fiber lift is x' + rho + c (sin(2π(x0_1 + w_1)) − sin(2π x0_1)).
    static SkewProduct sheared_product(double rho, double c, std::vector<double> base_freq);

    static SkewProduct custom(std::string name, std::vector<double> base_freq, FiberLift lift,
                              int check_grid = 512);

    int base_dim() const { return static_cast<int>(base_freq_.size()); }
    const std::vector<double>& base_frequency() const { return base_freq_; }
    double fiber_lift(std::span<const double> x0, double xp) const { return lift_(x0, xp); }
    const std::string& name() const { return name_; }

    bool fiber_periodic_ok() const { return periodic_ok_; }
    bool fiber_monotone() const { return monotone_; }
    bool base_screened() const { return base_screened_; }

private:
    SkewProduct(std::string name, std::vector<double> w, FiberLift lift, bool periodic_ok,
                bool monotone);

    std::string name_;
    std::vector<double> base_freq_;
    FiberLift lift_;
    bool periodic_ok_ = true;
    bool monotone_ = true;
    bool base_screened_ = true;
};

/// Foliated view: state (x0, x'), leaf flow shifts the fiber circle,
/// transversal action translates the base, τ_1 = Φ̂_1^{x0}(x') − x'.
class SkewFoliation final : public FoliatedSystem {
public:
    explicit SkewFoliation(SkewProduct system) : sys_(std::move(system)) {}

    TimeDomain time_domain() const override { return TimeDomain::discrete(); }

    Point leaf_translate(const Point& x, double s) const override {
        Point y = x;
        y[x.size() - 1] = wrap01(x[x.size() - 1] + s);
        return y;
    }
    Point transversal(const Point& x, double t) const override {
        Point y = x;
        const auto& w = sys_.base_frequency();
        for (std::size_t i = 0; i < w.size(); ++i) y[i] = wrap01(x[i] + t * w[i]);
        return y;
    }
    double translation_step(const Point& x) const override {
        const std::size_t d = x.size() - 1;
        return sys_.fiber_lift({x.coords().data(), d}, x[d]) - x[d];
    }
    double distance(const Point& x, const Point& y) const override {
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            m = std::max(m, circle_dist(x[i], y[i]));
        return m;
    }

    const SkewProduct& system() const { return sys_; }

private:
    SkewProduct sys_;
};

/// Adapter construction; throws InvalidSystemError if the construction
/// checks (fiber periodicity, fiber monotonicity, base screening) failed.
SkewFoliation as_foliated(const SkewProduct& system);

/// Endpoint fiber rotation number from the state (x0, x').
TranslationEstimate fiber_rotation_number(const SkewProduct& system, const Point& x, long long N);

/// Spread of the estimate over `count` seeded random initial states.
double fiber_rho_spread(const SkewProduct& system, long long N, int count, unsigned long seed);

/// Worst-case deviation profile over seeded random initial states.
DeviationProfile bmm_test(const SkewProduct& system, double rho, double horizon, int sample_count,
                          unsigned long seed = 1);

/// γ̂ on a base × fiber product grid and the residual of h ∘ Φ_1 against
/// the product translation T^ρ_1 (x0, x') = (x0 + w, x' + ρ).
SemiconjugacyReport fiber_semiconjugacy(const SkewProduct& system, double rho, int base_grid,
                                        int fiber_grid, double horizon);

} // namespace folab
