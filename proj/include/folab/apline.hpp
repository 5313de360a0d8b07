#pragma once

#include "folab/estimators.hpp"
#include "folab/foliated.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace folab {

/// One oscillatory term a · cos(2π λ x + θ). Frequencies are counted in
/// cycles per unit length, so a 1-periodic displacement has λ ∈ Z.
struct TrigTerm {
    double freq = 0.0;
    double amp = 0.0;
    double phase = 0.0;
};

/// Finite trigonometric sum φ(x) = a0 + Σ a_k cos(2π λ_k x + θ_k), the
/// almost-periodic displacement of a line map f(x) = x + φ(x).
class TrigPoly {
public:
    TrigPoly(double mean, std::vector<TrigTerm> terms);

    double operator()(double x) const;

    double mean_value() const { return mean_; }
    double amplitude_sum() const;      // Σ |a_k|
    double lipschitz_certificate() const; // Σ |a_k| λ_k
    double derivative_bound() const;   // 2π Σ |a_k| λ_k, a true bound on |φ'|

    const std::vector<TrigTerm>& terms() const { return terms_; }

private:
    double mean_ = 0.0;
    std::vector<TrigTerm> terms_;
};

/// (1/2N) ∫_{−N}^{N} q, composite Gauss–Legendre on unit panels.
double mean_value_numeric(const TrigPoly& q, double N);

/// Z-module of frequencies, kept as a rationally independent generator list.
struct FrequencyModule {
    std::vector<double> generators;
};

struct IndependenceVerdict {
    enum class Kind { IndependentUpTo, Dependent, Inconclusive };
    Kind kind = Kind::Inconclusive;
    int search_bound = 0;
    double tol = 0.0;
    // witness for Kind::Dependent: k·x = Σ coeffs[v]·λ_v up to residual
    long k = 0;
    std::vector<long> coeffs;
    double residual = 0.0;
};

/// Bounded search for a nonzero integer vector c with |Σ c_i v_i| ≤ tol,
/// |c_i| ≤ K. Returns the first hit in canonical order, or nothing.
std::optional<std::vector<long>> find_integer_relation(std::span<const double> values, int K,
                                                       double tol);

/// True if no bounded integer relation is found among the values.
bool screen_rational_independence(std::span<const double> values, int K, double tol);

/// Reduce the term frequencies of φ to a rationally independent generator
/// list for the same Z-module, using bounded relation detection and an
/// integer row-echelon pass over the detected rational coordinates.
FrequencyModule frequency_module_of(const TrigPoly& phi, int K = 20, double tol = 1e-9);

/// Is x = Σ j_v g_v attainable with |j_v| ≤ K?
bool module_contains(const FrequencyModule& m, double x, int K, double tol);

/// Exhaustive search for k·x = Σ j_v g_v with 1 ≤ k ≤ K, |j_v| ≤ K.
IndependenceVerdict rational_independence(double x, const FrequencyModule& m, int K, double tol);

/// Birkhoff estimate (1/N) Σ φ(f^i(x0)) of the translation number of
/// f = id + φ. Requires the certificates a0 − Σ|a_k| > 0 (displacement
/// bounded away from zero) and Σ|a_k| λ_k < 1; throws NotApplicableError
/// naming the violated bound otherwise.
TranslationEstimate kwapisz_rho(const TrigPoly& phi, double x0, long long N);

/// max − min of the estimate over the given initial points.
double kwapisz_rho_spread(const TrigPoly& phi, long long N, std::span<const double> x0s);

/// Combined semiconjugacy criterion: bounded deviation of the cocycle plus
/// rational independence of 1/ρ̂ from the frequency module. Both verdicts
/// come from finite searches; caveats record the bounds used.
struct KwapiszReport {
    TranslationEstimate rho;
    DeviationProfile deviation;
    IndependenceVerdict independence;
    bool criterion_met = false;
    std::vector<std::string> caveats;
};

KwapiszReport kwapisz_criterion(const TrigPoly& phi, long long N, int K, double tol);
KwapiszReport kwapisz_criterion(const TrigPoly& phi, const FrequencyModule& module, long long N,
                                int K, double tol);

/// Foliated view of f = id + φ: leaf flow is translation of R, the
/// transversal action is trivial, τ_1 = φ.
class TrigLineFoliation final : public FoliatedSystem {
public:
    explicit TrigLineFoliation(TrigPoly phi) : phi_(std::move(phi)) {}

    TimeDomain time_domain() const override { return TimeDomain::discrete(); }
    Point leaf_translate(const Point& x, double s) const override { return Point{x[0] + s}; }
    Point transversal(const Point& x, double) const override { return x; }
    double translation_step(const Point& x) const override { return phi_(x[0]); }
    double distance(const Point& x, const Point& y) const override {
        return std::abs(x[0] - y[0]);
    }

    const TrigPoly& displacement() const { return phi_; }

private:
    TrigPoly phi_;
};

} // namespace folab
