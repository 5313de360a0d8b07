#pragma once

#include "folab/point.hpp"

namespace folab {

enum class TimeKind { Discrete, Continuous };

/// Time axis of a flow. Discrete systems step in integers; continuous
/// systems are sampled on multiples of sample_step.
struct TimeDomain {
    TimeKind kind = TimeKind::Discrete;
    double sample_step = 1.0;

    static TimeDomain discrete() { return {TimeKind::Discrete, 1.0}; }
    static TimeDomain continuous(double step) { return {TimeKind::Continuous, step}; }
};

/// A flow preserving a one-dimensional foliation, split into its three
/// ingredients: the leaf flow x ⊙ s, a commuting transversal action
/// ω_t(x), and the leafwise translation τ_t(x), so that one step of the
/// full flow is ω_h(x) ⊙ τ_h(x) with h the sample step.
///
/// Implementations must satisfy, up to numeric tolerance,
///   (x ⊙ s) ⊙ t = x ⊙ (s + t),
///   ω_s(x ⊙ t) = ω_s(x) ⊙ t,
///   τ_{s+t}(x) = τ_s(ω_t(x) ⊙ τ_t(x)) + τ_t(x),
///   t + τ(x ⊙ t) ≥ τ(x) for t ≥ 0.
/// The checkers in estimators.hpp measure the residuals.
class FoliatedSystem {
public:
    virtual ~FoliatedSystem() = default;

    virtual TimeDomain time_domain() const = 0;

    /// Leaf flow x ⊙ s (s is a leaf time, any real).
    virtual Point leaf_translate(const Point& x, double s) const = 0;

    /// Transversal action ω_t(x).
    virtual Point transversal(const Point& x, double t) const = 0;

    /// One-step translation τ_h(x) with h = time_domain().sample_step.
    virtual double translation_step(const Point& x) const = 0;

    virtual double distance(const Point& x, const Point& y) const = 0;
};

} // namespace folab
