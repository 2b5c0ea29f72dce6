#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "rpoly/error.hpp"

namespace rpoly {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 6;

// A point (or vector) in R^d with 1 <= d <= kMaxDim, stored inline.
class Point {
public:
    Point() = default;
    explicit Point(int dim) : dim_(check_dim(dim)) {}
    Point(std::initializer_list<double> coords) : dim_(check_dim(static_cast<int>(coords.size()))) {
        std::size_t i = 0;
        for (double c : coords) x_[i++] = c;
    }
    explicit Point(std::span<const double> coords) : dim_(check_dim(static_cast<int>(coords.size()))) {
        for (std::size_t i = 0; i < coords.size(); ++i) x_[i] = coords[i];
    }

    [[nodiscard]] int dim() const noexcept { return dim_; }
    double& operator[](int i) noexcept { return x_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return x_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::span<const double> coords() const noexcept { return {x_.data(), static_cast<std::size_t>(dim_)}; }
    [[nodiscard]] std::span<double> coords() noexcept { return {x_.data(), static_cast<std::size_t>(dim_)}; }
    [[nodiscard]] const double* data() const noexcept { return x_.data(); }
    double* data() noexcept { return x_.data(); }

    [[nodiscard]] bool finite() const noexcept {
        for (int i = 0; i < dim_; ++i)
            if (!std::isfinite(x_[static_cast<std::size_t>(i)])) return false;
        return true;
    }

    friend bool operator==(const Point& a, const Point& b) noexcept {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

private:
    static int check_dim(int d) {
        if (d < 1 || d > kMaxDim) throw InvalidInput("point dimension must be in [1, 6]");
        return d;
    }

    std::array<double, kMaxDim> x_{};
    int dim_ = 0;
};

inline double dot(const Point& a, const Point& b) noexcept {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }

inline Point operator-(const Point& a, const Point& b) noexcept {
    Point r(a.dim());
    for (int i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Point operator+(const Point& a, const Point& b) noexcept {
    Point r(a.dim());
    for (int i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Point operator*(double s, const Point& a) noexcept {
    Point r(a.dim());
    for (int i = 0; i < a.dim(); ++i) r[i] = s * a[i];
    return r;
}

// Returns a/|a|; throws InvalidInput for the zero vector.
inline Point normalized(const Point& a) {
    const double n = norm(a);
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("cannot normalize a zero or non-finite vector");
    return (1.0 / n) * a;
}

}  // namespace rpoly
