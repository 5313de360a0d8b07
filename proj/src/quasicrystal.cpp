#include "folab/quasicrystal.hpp"

#include "folab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace folab {

namespace {

constexpr double edge_eps = 1e-9;

std::vector<std::vector<long>> incidence_matrix(const SubstitutionRule& rule) {
    const std::size_t n = rule.alphabet.size();
    std::vector<std::vector<long>> M(n, std::vector<long>(n, 0));
    for (std::size_t a = 0; a < n; ++a) {
        const auto it = rule.images.find(rule.alphabet[a]);
        if (it == rule.images.end()) continue;
        for (char c : it->second) {
            for (std::size_t b = 0; b < n; ++b)
                if (rule.alphabet[b] == c) ++M[a][b];
        }
    }
    return M;
}

} // namespace

SubstitutionRule SubstitutionRule::fibonacci() {
    SubstitutionRule rule;
    rule.alphabet = {'L', 'S'};
    rule.images = {{'L', "LS"}, {'S', "L"}};
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    rule.tile_lengths = {{'L', golden}, {'S', 1.0}};
    return rule;
}

bool SubstitutionRule::primitive() const {
    const std::size_t n = alphabet.size();
    if (n == 0) return false;
    auto M = incidence_matrix(*this);
    // boolean powering; a primitive matrix is positive by power n^2
    std::vector<std::vector<long>> P = M;
    for (std::size_t step = 1; step <= n * n; ++step) {
        bool all_positive = true;
        for (const auto& row : P)
            for (long v : row)
                if (v == 0) all_positive = false;
        if (all_positive) return true;
        std::vector<std::vector<long>> Q(n, std::vector<long>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                if (P[i][k] == 0) continue;
                for (std::size_t j = 0; j < n; ++j)
                    Q[i][j] = std::min<long>(Q[i][j] + P[i][k] * std::min(M[k][j], 1L), 1000);
            }
        P = std::move(Q);
    }
    return false;
}

bool SubstitutionRule::lengths_self_similar(double tol) const {
    double lambda = 0.0;
    bool first = true;
    for (char a : alphabet) {
        const auto img = images.find(a);
        const auto len = tile_lengths.find(a);
        if (img == images.end() || len == tile_lengths.end()) return false;
        double total = 0.0;
        for (char c : img->second) {
            const auto it = tile_lengths.find(c);
            if (it == tile_lengths.end()) return false;
            total += it->second;
        }
        const double ratio = total / len->second;
        if (first) {
            lambda = ratio;
            first = false;
        } else if (std::abs(ratio - lambda) > tol) {
            return false;
        }
    }
    return true;
}

std::string iterate_substitution(const SubstitutionRule& rule, const std::string& seed, int n) {
    if (n < 0) throw Error("iterate_substitution: n must be >= 0");
    auto known = [&](char c) {
        return std::find(rule.alphabet.begin(), rule.alphabet.end(), c) != rule.alphabet.end();
    };
    for (char c : seed)
        if (!known(c))
            throw InvalidSeedError(std::string("iterate_substitution: unknown letter '") + c +
                                   "' in seed");
    std::string word = seed;
    for (int it = 0; it < n; ++it) {
        std::string next;
        next.reserve(word.size() * 2);
        for (char c : word) {
            const auto img = rule.images.find(c);
            if (img == rule.images.end())
                throw InvalidSeedError(std::string("iterate_substitution: no image for letter '") +
                                       c + "'");
            next += img->second;
        }
        word = std::move(next);
    }
    return word;
}

double DeloneSegment::min_gap() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < points.size(); ++i) m = std::min(m, points[i] - points[i - 1]);
    return m;
}

double DeloneSegment::max_gap() const {
    double m = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) m = std::max(m, points[i] - points[i - 1]);
    return m;
}

DeloneSegment word_to_delone(const std::string& word, const SubstitutionRule& rule,
                             double anchor) {
    if (word.empty()) throw Error("word_to_delone: empty word");
    DeloneSegment X;
    X.points.reserve(word.size() + 1);
    X.points.push_back(anchor);
    KahanSum offset;
    std::set<double> gaps;
    for (char c : word) {
        const auto len = rule.tile_lengths.find(c);
        if (len == rule.tile_lengths.end())
            throw InvalidSeedError(std::string("word_to_delone: no tile length for letter '") + c +
                                   "'");
        offset.add(len->second);
        X.points.push_back(anchor + offset.value());
        gaps.insert(len->second);
    }
    X.gap_alphabet.assign(gaps.begin(), gaps.end());
    return X;
}

Patch patch_at(const DeloneSegment& X, double x, double R) {
    if (!(R > 0.0)) throw Error("patch_at: radius must be positive");
    if (x - R < X.window_lo() - edge_eps || x + R > X.window_hi() + edge_eps) {
        std::ostringstream msg;
        msg << "patch_at: [" << x - R << ", " << x + R << "] exceeds window [" << X.window_lo()
            << ", " << X.window_hi() << "]";
        throw WindowExceededError(msg.str());
    }
    Patch P;
    P.center = x;
    P.radius = R;
    auto lo = std::lower_bound(X.points.begin(), X.points.end(), x - R - edge_eps);
    auto hi = std::upper_bound(X.points.begin(), X.points.end(), x + R + edge_eps);
    for (auto it = lo; it != hi; ++it) P.relative_points.push_back(*it - x);
    return P;
}

bool patch_equivalent(const Patch& a, const Patch& b, double tol) {
    if (std::abs(a.radius - b.radius) > tol) return false;
    if (a.relative_points.size() != b.relative_points.size()) return false;
    for (std::size_t i = 0; i < a.relative_points.size(); ++i)
        if (std::abs(a.relative_points[i] - b.relative_points[i]) > tol) return false;
    return true;
}

PatchFrequencyReport patch_frequency(const DeloneSegment& X, const Patch& P, double N,
                                     std::span<const double> anchors, double tol) {
    if (!(N > 0.0)) throw Error("patch_frequency: window N must be positive");
    PatchFrequencyReport report;
    report.patch = P;
    report.window_N = N;
    report.anchors.assign(anchors.begin(), anchors.end());

    for (double t : anchors) {
        if (t - N - P.radius < X.window_lo() - edge_eps ||
            t + N + P.radius > X.window_hi() + edge_eps) {
            std::ostringstream msg;
            msg << "patch_frequency: anchor " << t << " with N = " << N << ", R = " << P.radius
                << " exceeds window";
            throw WindowExceededError(msg.str());
        }
        long count = 0;
        auto lo = std::lower_bound(X.points.begin(), X.points.end(), t - N - edge_eps);
        auto hi = std::upper_bound(X.points.begin(), X.points.end(), t + N + edge_eps);
        for (auto it = lo; it != hi; ++it) {
            if (patch_equivalent(patch_at(X, *it, P.radius), P, tol)) ++count;
        }
        report.counts.push_back(count);
        report.frequencies.push_back(static_cast<double>(count) / (2.0 * N));
    }
    double sum = 0.0;
    double fmin = std::numeric_limits<double>::infinity();
    double fmax = -fmin;
    for (double f : report.frequencies) {
        sum += f;
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    report.frequency_estimate = sum / static_cast<double>(report.frequencies.size());
    report.uniformity_spread = fmax - fmin;
    return report;
}

double repetitivity_gap(const DeloneSegment& X, const Patch& P, double tol) {
    const double lo = X.window_lo() + P.radius;
    const double hi = X.window_hi() - P.radius;
    if (!(hi > lo)) throw Error("repetitivity_gap: window smaller than the patch");
    std::vector<double> occurrences;
    auto first = std::lower_bound(X.points.begin(), X.points.end(), lo - edge_eps);
    auto last = std::upper_bound(X.points.begin(), X.points.end(), hi + edge_eps);
    for (auto it = first; it != last; ++it)
        if (patch_equivalent(patch_at(X, *it, P.radius), P, tol)) occurrences.push_back(*it);
    if (occurrences.empty()) return std::numeric_limits<double>::infinity();
    double gap = std::max(occurrences.front() - lo, hi - occurrences.back());
    for (std::size_t i = 1; i < occurrences.size(); ++i)
        gap = std::max(gap, occurrences[i] - occurrences[i - 1]);
    return gap;
}

KernelDisplacement KernelDisplacement::tent(double amp, double radius, double offset) {
    KernelDisplacement g;
    g.radius = radius;
    g.offset = offset;
    g.kernel = [amp, radius](double u) {
        const double v = 1.0 - std::abs(u) / radius;
        return v > 0.0 ? amp * v : 0.0;
    };
    return g;
}

double KernelDisplacement::operator()(const DeloneSegment& X, double x) const {
    if (x - radius < X.window_lo() - edge_eps || x + radius > X.window_hi() + edge_eps) {
        std::ostringstream msg;
        msg << "displacement: evaluation at " << x << " with radius " << radius
            << " exceeds window [" << X.window_lo() << ", " << X.window_hi() << "]";
        throw WindowExceededError(msg.str());
    }
    double v = offset;
    auto lo = std::lower_bound(X.points.begin(), X.points.end(), x - radius - edge_eps);
    auto hi = std::upper_bound(X.points.begin(), X.points.end(), x + radius + edge_eps);
    for (auto it = lo; it != hi; ++it) v += kernel(*it - x);
    return v;
}

DeloneFoliation::DeloneFoliation(std::shared_ptr<const DeloneSegment> X, KernelDisplacement phi,
                                 int sign_check_grid)
    : X_(std::move(X)), phi_(std::move(phi)) {
    if (!X_ || X_->points.size() < 2) throw Error("DeloneFoliation: degenerate segment");
    const double lo = X_->window_lo() + phi_.radius;
    const double hi = X_->window_hi() - phi_.radius;
    if (!(hi > lo)) throw Error("DeloneFoliation: window smaller than the kernel radius");
    double min_phi = std::numeric_limits<double>::infinity();
    double arg_min = lo;
    for (int i = 0; i <= sign_check_grid; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / sign_check_grid;
        const double v = phi_(*X_, t);
        if (v < min_phi) {
            min_phi = v;
            arg_min = t;
        }
    }
    if (!(min_phi > 0.0)) {
        std::ostringstream msg;
        msg << "induced_line_map: displacement reaches " << min_phi << " at t = " << arg_min
            << "; inf phi > 0 required";
        throw DisplacementSignError(msg.str());
    }
}

DeloneFoliation induced_line_map(std::shared_ptr<const DeloneSegment> X, KernelDisplacement phi) {
    return DeloneFoliation(std::move(X), std::move(phi));
}

DeloneCriterionReport delone_semiconjugacy_criterion(std::shared_ptr<const DeloneSegment> X,
                                                     const KernelDisplacement& phi, long long N,
                                                     double horizon) {
    const DeloneFoliation sys(X, phi);
    DeloneCriterionReport report;

    const CocycleTrace rho_trace =
        accumulate_trace(sys, Point{0.0}, static_cast<double>(N), SampleSchedule::linear(512));
    report.rho = estimate_rho(rho_trace);

    const CocycleTrace dev_trace =
        accumulate_trace(sys, Point{0.0}, horizon, SampleSchedule::linear(512));
    report.deviation = deviation_profile(dev_trace, report.rho.rho_hat);

    report.caveats.push_back("minimality of the limit translation is assumed, not verified");
    std::ostringstream c;
    c << "deviation classified from finite horizon " << horizon << ", rho from " << N << " steps";
    report.caveats.push_back(c.str());
    return report;
}

} // namespace folab
