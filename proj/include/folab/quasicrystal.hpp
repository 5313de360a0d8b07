#pragma once

#include "folab/estimators.hpp"
#include "folab/foliated.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace folab {

/// Two-sided substitution data: letter images and tile lengths.
/// Primitivity is verified by powering the incidence matrix; tile lengths
/// inconsistent with the Perron inflation factor only raise a warning flag
/// (self-similarity is not required to build segments).
struct SubstitutionRule {
    std::vector<char> alphabet;
    std::map<char, std::string> images;
    std::map<char, double> tile_lengths;

    /// L → LS, S → L with lengths (golden mean, 1).
    static SubstitutionRule fibonacci();

    bool primitive() const;
    /// Per-letter inflation estimates Σ_b count(b, image(a)) · len(b) / len(a);
    /// lengths are self-similar when these agree.
    bool lengths_self_similar(double tol = 1e-9) const;
};

/// n-fold application of the rule to the seed word.
/// Throws InvalidSeedError on letters outside the alphabet.
std::string iterate_substitution(const SubstitutionRule& rule, const std::string& seed, int n);

/// Finite window of a Delone set: strictly increasing points plus the
/// set of gap values that occur (finite local complexity).
struct DeloneSegment {
    std::vector<double> points;
    std::vector<double> gap_alphabet;

    double window_lo() const { return points.front(); }
    double window_hi() const { return points.back(); }
    double min_gap() const;
    double max_gap() const;
};

/// Tile endpoints accumulated from the anchor using the rule's lengths.
DeloneSegment word_to_delone(const std::string& word, const SubstitutionRule& rule, double anchor);

/// Local configuration X ∩ [x−R, x+R], stored relative to the center.
struct Patch {
    double center = 0.0;
    double radius = 0.0;
    std::vector<double> relative_points;
};

/// Throws WindowExceededError when [x−R, x+R] leaves the segment window.
Patch patch_at(const DeloneSegment& X, double x, double R);

/// Same cardinality and pointwise agreement within tol after centering.
bool patch_equivalent(const Patch& a, const Patch& b, double tol = 1e-9);

struct PatchFrequencyReport {
    Patch patch;
    double window_N = 0.0;
    std::vector<double> anchors;
    std::vector<long> counts; // n(P, N, t) per anchor
    std::vector<double> frequencies;
    double frequency_estimate = 0.0; // mean of n/2N over anchors
    double uniformity_spread = 0.0;  // max − min over anchors
};

/// Count centers y in X ∩ [t−N, t+N] whose R-patch is equivalent to P.
/// Requires [t−N−R, t+N+R] inside the window for every anchor.
PatchFrequencyReport patch_frequency(const DeloneSegment& X, const Patch& P, double N,
                                     std::span<const double> anchors, double tol = 1e-9);

/// Smallest M such that every length-M interval met in the window contains
/// the center of a patch equivalent to P (measured recurrence gap).
double repetitivity_gap(const DeloneSegment& X, const Patch& P, double tol = 1e-9);

/// Strongly pattern-equivariant displacement built as a kernel sum over
/// nearby points: φ(x) = offset + Σ_{θ ∈ X, |θ−x| ≤ radius} kernel(θ − x).
/// Equivariant by construction with equivariance radius = kernel radius.
struct KernelDisplacement {
    std::function<double(double)> kernel;
    double radius = 0.0;
    double offset = 0.0;

    static KernelDisplacement tent(double amp, double radius, double offset);

    double operator()(const DeloneSegment& X, double x) const;
};

/// Foliated view of the induced line map f(t) = t + φ(t) along the orbit
/// {X − t}: leaf flow translates the marker, trivial transversal action,
/// τ_1(t) = φ(t). Construction certifies inf φ > 0 by dense sampling and
/// throws DisplacementSignError otherwise.
class DeloneFoliation final : public FoliatedSystem {
public:
    DeloneFoliation(std::shared_ptr<const DeloneSegment> X, KernelDisplacement phi,
                    int sign_check_grid = 4096);

    TimeDomain time_domain() const override { return TimeDomain::discrete(); }
    Point leaf_translate(const Point& x, double s) const override { return Point{x[0] + s}; }
    Point transversal(const Point& x, double) const override { return x; }
    double translation_step(const Point& x) const override { return phi_(*X_, x[0]); }
    double distance(const Point& x, const Point& y) const override {
        return std::abs(x[0] - y[0]);
    }

    const DeloneSegment& segment() const { return *X_; }
    const KernelDisplacement& displacement() const { return phi_; }

private:
    std::shared_ptr<const DeloneSegment> X_;
    KernelDisplacement phi_;
};

DeloneFoliation induced_line_map(std::shared_ptr<const DeloneSegment> X, KernelDisplacement phi);

/// Translation number of the induced map plus a deviation classification
/// of the Birkhoff sums; minimality of the limit translation is an
/// assumption recorded in the caveats, never verified.
struct DeloneCriterionReport {
    TranslationEstimate rho;
    DeviationProfile deviation;
    std::vector<std::string> caveats;
};

DeloneCriterionReport delone_semiconjugacy_criterion(std::shared_ptr<const DeloneSegment> X,
                                                     const KernelDisplacement& phi, long long N,
                                                     double horizon);

} // namespace folab
