#include "folab/apline.hpp"

#include "folab/errors.hpp"
#include "folab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace folab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// 10-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double gl_x[5] = {0.14887433898163121, 0.43339539412924719, 0.67940956829902441,
                            0.86506336668898451, 0.97390652851717172};
constexpr double gl_w[5] = {0.29552422471475287, 0.26926671930999635, 0.21908636251598204,
                            0.14945134915058059, 0.06667134430868814};

// odometer over j in [-K, K]^m; returns false when exhausted
bool advance(std::vector<long>& j, int K) {
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] < K) {
            ++j[i];
            for (std::size_t r = 0; r < i; ++r) j[r] = -K;
            return true;
        }
    }
    return false;
}

// integer row-echelon form of a small matrix; row space (lattice) preserved
std::vector<std::vector<long long>> row_echelon_lattice(std::vector<std::vector<long long>> rows,
                                                        std::size_t cols) {
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < cols && pivot_row < rows.size(); ++c) {
        for (;;) {
            std::size_t best = rows.size();
            for (std::size_t r = pivot_row; r < rows.size(); ++r) {
                if (rows[r][c] != 0 &&
                    (best == rows.size() || std::llabs(rows[r][c]) < std::llabs(rows[best][c])))
                    best = r;
            }
            if (best == rows.size()) break; // column clear below
            std::swap(rows[pivot_row], rows[best]);
            bool reduced_all = true;
            for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
                if (rows[r][c] == 0) continue;
                const long long q = rows[r][c] / rows[pivot_row][c];
                for (std::size_t cc = 0; cc < cols; ++cc) rows[r][cc] -= q * rows[pivot_row][cc];
                if (rows[r][c] != 0) reduced_all = false;
            }
            if (reduced_all) {
                if (rows[pivot_row][c] < 0)
                    for (std::size_t cc = 0; cc < cols; ++cc) rows[pivot_row][cc] = -rows[pivot_row][cc];
                ++pivot_row;
                break;
            }
        }
    }
    rows.resize(pivot_row);
    return rows;
}

} // namespace

TrigPoly::TrigPoly(double mean, std::vector<TrigTerm> terms)
    : mean_(mean), terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!(terms_[i].freq > 0.0))
            throw Error("TrigPoly: frequencies must be positive");
        for (std::size_t j = i + 1; j < terms_.size(); ++j)
            if (terms_[i].freq == terms_[j].freq)
                throw Error("TrigPoly: frequencies must be distinct");
    }
}

double TrigPoly::operator()(double x) const {
    double v = mean_;
    for (const auto& t : terms_) v += t.amp * std::cos(two_pi * t.freq * x + t.phase);
    return v;
}

double TrigPoly::amplitude_sum() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.amp);
    return s;
}

double TrigPoly::lipschitz_certificate() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.amp) * t.freq;
    return s;
}

double TrigPoly::derivative_bound() const { return two_pi * lipschitz_certificate(); }

double mean_value_numeric(const TrigPoly& q, double N) {
    if (!(N > 0.0)) throw Error("mean_value_numeric: N must be positive");
    const long long panels = std::max<long long>(1, static_cast<long long>(std::ceil(2.0 * N)));
    const double width = 2.0 * N / static_cast<double>(panels);
    KahanSum integral;
    for (long long p = 0; p < panels; ++p) {
        const double mid = -N + (static_cast<double>(p) + 0.5) * width;
        const double half = 0.5 * width;
        for (int i = 0; i < 5; ++i) {
            integral.add(gl_w[i] * half * q(mid + half * gl_x[i]));
            integral.add(gl_w[i] * half * q(mid - half * gl_x[i]));
        }
    }
    return integral.value() / (2.0 * N);
}

std::optional<std::vector<long>> find_integer_relation(std::span<const double> values, int K,
                                                       double tol) {
    if (values.empty()) return std::nullopt;
    const std::size_t m = values.size();
    // solve the last coefficient by rounding; scan the rest
    std::vector<long> c(m - 1, -K);
    if (m == 1) {
        // single value: relation means k·v ≈ 0
        if (std::abs(values[0]) <= tol) return std::vector<long>{1};
        return std::nullopt;
    }
    bool more = true;
    // include the all(-K) starting combination as well
    for (; more; more = advance(c, K)) {
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) partial += static_cast<double>(c[i]) * values[i];
        const double target = -partial;
        const double last = values[m - 1];
        long j0 = (last != 0.0) ? std::lround(target / last) : 0;
        for (long dj = -1; dj <= 1; ++dj) {
            const long j = j0 + dj;
            if (std::labs(j) > K) continue;
            bool all_zero = (j == 0);
            for (std::size_t i = 0; all_zero && i + 1 < m; ++i) all_zero = (c[i] == 0);
            if (all_zero) continue;
            if (std::abs(partial + static_cast<double>(j) * last) <= tol) {
                std::vector<long> out(c.begin(), c.end());
                out.push_back(j);
                // canonical sign: first nonzero coefficient positive
                for (long v : out) {
                    if (v == 0) continue;
                    if (v < 0)
                        for (auto& w : out) w = -w;
                    break;
                }
                return out;
            }
        }
    }
    return std::nullopt;
}

bool screen_rational_independence(std::span<const double> values, int K, double tol) {
    return !find_integer_relation(values, K, tol).has_value();
}

FrequencyModule frequency_module_of(const TrigPoly& phi, int K, double tol) {
    std::vector<double> freqs;
    for (const auto& t : phi.terms())
        if (t.amp != 0.0) freqs.push_back(t.freq);
    if (freqs.empty()) return {};

    // greedy rationally independent basis among the frequencies themselves,
    // recording rational coordinates k·λ = Σ j_v B_v of the rest
    std::vector<double> basis;
    struct Coord {
        long long k = 1;
        std::vector<long long> j; // over final basis, padded later
    };
    std::vector<Coord> coords(freqs.size());
    std::vector<std::size_t> basis_index_of; // basis position -> freq index

    for (std::size_t i = 0; i < freqs.size(); ++i) {
        bool dependent = false;
        for (long kk = 1; kk <= K && !dependent; ++kk) {
            if (basis.empty()) break;
            std::vector<long> j(basis.size() - 1, -K);
            bool more = true;
            for (; more && !dependent; more = advance(j, K)) {
                double partial = kk * freqs[i];
                for (std::size_t v = 0; v + 1 < basis.size(); ++v)
                    partial -= static_cast<double>(j[v]) * basis[v];
                const double last = basis.back();
                const long j0 = std::lround(partial / last);
                if (std::labs(j0) > K) continue;
                if (std::abs(partial - static_cast<double>(j0) * last) <= tol) {
                    Coord c;
                    c.k = kk;
                    c.j.assign(j.begin(), j.end());
                    c.j.push_back(j0);
                    coords[i] = std::move(c);
                    dependent = true;
                }
            }
        }
        if (!dependent) {
            basis.push_back(freqs[i]);
            Coord c;
            c.k = 1;
            c.j.assign(basis.size(), 0);
            c.j.back() = 1;
            coords[i] = std::move(c);
            basis_index_of.push_back(i);
        }
    }

    const std::size_t m = basis.size();
    long long D = 1;
    for (const auto& c : coords) D = std::lcm(D, c.k);

    std::vector<std::vector<long long>> rows;
    rows.reserve(freqs.size());
    for (const auto& c : coords) {
        std::vector<long long> row(m, 0);
        const long long scale = D / c.k;
        for (std::size_t v = 0; v < c.j.size(); ++v) row[v] = scale * c.j[v];
        rows.push_back(std::move(row));
    }
    rows = row_echelon_lattice(std::move(rows), m);

    FrequencyModule module;
    for (const auto& row : rows) {
        double g = 0.0;
        for (std::size_t v = 0; v < m; ++v) g += static_cast<double>(row[v]) * basis[v];
        g /= static_cast<double>(D);
        module.generators.push_back(std::abs(g));
    }
    std::sort(module.generators.begin(), module.generators.end());
    return module;
}

bool module_contains(const FrequencyModule& m, double x, int K, double tol) {
    if (m.generators.empty()) return std::abs(x) <= tol;
    std::vector<long> j(m.generators.size() - 1, -K);
    bool more = true;
    for (; more; more = advance(j, K)) {
        double partial = x;
        for (std::size_t v = 0; v + 1 < m.generators.size(); ++v)
            partial -= static_cast<double>(j[v]) * m.generators[v];
        const double last = m.generators.back();
        const long j0 = std::lround(partial / last);
        if (std::labs(j0) > K) continue;
        if (std::abs(partial - static_cast<double>(j0) * last) <= tol) return true;
    }
    return false;
}

IndependenceVerdict rational_independence(double x, const FrequencyModule& m, int K, double tol) {
    if (K < 1 || tol <= 0.0) throw Error("rational_independence: need K >= 1, tol > 0");
    IndependenceVerdict verdict;
    verdict.search_bound = K;
    verdict.tol = tol;
    if (!std::isfinite(x)) {
        verdict.kind = IndependenceVerdict::Kind::Inconclusive;
        return verdict;
    }

    for (long kk = 1; kk <= K; ++kk) {
        if (m.generators.empty()) {
            if (std::abs(kk * x) <= tol) {
                verdict.kind = IndependenceVerdict::Kind::Dependent;
                verdict.k = kk;
                verdict.residual = std::abs(kk * x);
                return verdict;
            }
            continue;
        }
        std::vector<long> j(m.generators.size() - 1, -K);
        bool more = true;
        for (; more; more = advance(j, K)) {
            double partial = kk * x;
            for (std::size_t v = 0; v + 1 < m.generators.size(); ++v)
                partial -= static_cast<double>(j[v]) * m.generators[v];
            const double last = m.generators.back();
            const long j0 = std::lround(partial / last);
            if (std::labs(j0) > K) continue;
            const double res = std::abs(partial - static_cast<double>(j0) * last);
            if (res <= tol) {
                verdict.kind = IndependenceVerdict::Kind::Dependent;
                verdict.k = kk;
                verdict.coeffs.assign(j.begin(), j.end());
                verdict.coeffs.push_back(j0);
                verdict.residual = res;
                return verdict;
            }
        }
    }
    verdict.kind = IndependenceVerdict::Kind::IndependentUpTo;
    return verdict;
}

TranslationEstimate kwapisz_rho(const TrigPoly& phi, double x0, long long N) {
    if (N < 1) throw Error("kwapisz_rho: N must be >= 1");
    const double inf_cert = phi.mean_value() - phi.amplitude_sum();
    if (!(inf_cert > 0.0)) {
        std::ostringstream msg;
        msg << "kwapisz_rho: displacement not certified away from zero: a0 - sum|a_k| = "
            << inf_cert << " <= 0";
        throw NotApplicableError(msg.str());
    }
    const double lip = phi.lipschitz_certificate();
    if (!(lip < 1.0)) {
        std::ostringstream msg;
        msg << "kwapisz_rho: increasing certificate failed: sum|a_k| lambda_k = " << lip
            << " >= 1";
        throw NotApplicableError(msg.str());
    }

    double y = x0;
    KahanSum tau;
    double tau_half = 0.0;
    const long long half = N / 2;
    for (long long k = 0; k < N; ++k) {
        const double d = phi(y);
        tau.add(d);
        y += d;
        if (k + 1 == half) tau_half = tau.value();
    }
    TranslationEstimate est;
    est.rho_hat = tau.value() / static_cast<double>(N);
    est.horizon = static_cast<double>(N);
    est.cauchy_gap =
        half > 0 ? std::abs(est.rho_hat - tau_half / static_cast<double>(half)) : 0.0;
    return est;
}

double kwapisz_rho_spread(const TrigPoly& phi, long long N, std::span<const double> x0s) {
    if (x0s.empty()) throw Error("kwapisz_rho_spread: no initial points");
    std::vector<double> rhos(x0s.size());
    parallel_for(x0s.size(),
                 [&](std::size_t i) { rhos[i] = kwapisz_rho(phi, x0s[i], N).rho_hat; });
    const auto [lo, hi] = std::minmax_element(rhos.begin(), rhos.end());
    return *hi - *lo;
}

KwapiszReport kwapisz_criterion(const TrigPoly& phi, const FrequencyModule& module, long long N,
                                int K, double tol) {
    KwapiszReport report;
    report.rho = kwapisz_rho(phi, 0.0, N);

    const TrigLineFoliation sys(phi);
    const double starts[] = {0.0, 0.318, 1.72, 4.09, 7.53};
    DeviationProfile merged;
    for (double s : starts) {
        const CocycleTrace trace =
            accumulate_trace(sys, Point{s}, static_cast<double>(N), SampleSchedule::linear(512));
        DeviationProfile p = deviation_profile(trace, report.rho.rho_hat);
        if (merged.checkpoints.empty()) {
            merged = std::move(p);
        } else {
            for (std::size_t j = 0; j < merged.deviations.size(); ++j)
                merged.deviations[j] = std::max(merged.deviations[j], p.deviations[j]);
        }
    }
    report.deviation = make_profile(std::move(merged.checkpoints), std::move(merged.deviations));

    report.independence = rational_independence(1.0 / report.rho.rho_hat, module, K, tol);
    report.criterion_met =
        report.deviation.classification == Boundedness::Bounded &&
        report.independence.kind == IndependenceVerdict::Kind::IndependentUpTo;

    std::ostringstream c1;
    c1 << "deviation classified from finite horizon " << N << " over " << std::size(starts)
       << " starts";
    report.caveats.push_back(c1.str());
    std::ostringstream c2;
    c2 << "independence searched up to coefficient bound " << K << " at tol " << tol;
    report.caveats.push_back(c2.str());
    return report;
}

KwapiszReport kwapisz_criterion(const TrigPoly& phi, long long N, int K, double tol) {
    return kwapisz_criterion(phi, frequency_module_of(phi, K, tol), N, K, tol);
}

} // namespace folab
