#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace folab {

/// A point of the state space: a short coordinate tuple with inline storage.
/// Systems interpret the coordinates themselves (circle position, torus
/// phases, a marker on the line, ...).
class Point {
public:
    static constexpr std::size_t max_dim = 8;

    Point() = default;
    Point(std::initializer_list<double> xs) {
        for (double v : xs) push_back(v);
    }
    explicit Point(std::span<const double> xs) {
        for (double v : xs) push_back(v);
    }
    static Point scalar(double x) { return Point{x}; }

    std::size_t size() const { return n_; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    std::span<const double> coords() const { return {c_.data(), n_}; }

    void push_back(double v) {
        if (n_ == max_dim) throw std::length_error("Point: coordinate capacity exceeded");
        c_[n_++] = v;
    }

    bool finite() const {
        for (std::size_t i = 0; i < n_; ++i)
            if (!std::isfinite(c_[i])) return false;
        return true;
    }

private:
    std::array<double, max_dim> c_{};
    std::size_t n_ = 0;
};

/// Reduce to [0, 1).
inline double wrap01(double x) {
    double y = x - std::floor(x);
    return y < 1.0 ? y : 0.0;
}

/// Distance on the circle R/Z.
inline double circle_dist(double a, double b) {
    double d = wrap01(a - b);
    return d <= 0.5 ? d : 1.0 - d;
}

/// Compensated (Kahan) accumulator for long cocycle sums.
class KahanSum {
public:
    void add(double v) {
        double y = v - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace folab
