#include "rpoly/predicates.hpp"

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <utility>

namespace rpoly {

namespace {

// Relative threshold against the Hadamard bound. LU with partial pivoting in
// d <= 6 loses at most ~d^3 * 2^(d-1) ulps, far below this margin.
constexpr double kFilterTolerance = 1e-10;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

int filtered_sign(std::span<const Point* const> pts) {
    const int d = pts[0]->dim();
    std::array<double, kMaxDim * kMaxDim> m{};
    double hadamard = 1.0;
    for (int r = 0; r < d; ++r) {
        double row_norm2 = 0.0;
        for (int c = 0; c < d; ++c) {
            const double v = (*pts[static_cast<std::size_t>(r + 1)])[c] - (*pts[0])[c];
            m[static_cast<std::size_t>(r * d + c)] = v;
            row_norm2 += v * v;
        }
        hadamard *= std::sqrt(row_norm2);
    }
    const double det = determinant({m.data(), static_cast<std::size_t>(d * d)}, d);
    if (hadamard > 0.0 && std::fabs(det) > kFilterTolerance * hadamard) return sign_of(det);
    return 2;  // uncertain
}

void check_simplex(std::span<const Point* const> pts) {
    if (pts.empty()) throw InvalidInput("orientation needs d+1 points");
    const int d = pts[0]->dim();
    if (static_cast<int>(pts.size()) != d + 1) throw InvalidInput("orientation needs exactly d+1 points of dimension d");
    for (const Point* p : pts)
        if (p->dim() != d) throw InvalidInput("orientation: dimension mismatch");
}

}  // namespace

double determinant(std::span<double> a, int k) {
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        double best = std::fabs(a[static_cast<std::size_t>(col * k + col)]);
        for (int r = col + 1; r < k; ++r) {
            const double v = std::fabs(a[static_cast<std::size_t>(r * k + col)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < k; ++c)
                std::swap(a[static_cast<std::size_t>(piv * k + c)], a[static_cast<std::size_t>(col * k + c)]);
            det = -det;
        }
        const double p = a[static_cast<std::size_t>(col * k + col)];
        det *= p;
        for (int r = col + 1; r < k; ++r) {
            const double f = a[static_cast<std::size_t>(r * k + col)] / p;
            if (f == 0.0) continue;
            for (int c = col + 1; c < k; ++c)
                a[static_cast<std::size_t>(r * k + c)] -= f * a[static_cast<std::size_t>(col * k + c)];
        }
    }
    return det;
}

int orientation_exact(std::span<const Point* const> pts) {
    check_simplex(pts);
    const int d = pts[0]->dim();
    std::array<std::array<mpq_class, kMaxDim>, kMaxDim> m;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                mpq_class((*pts[static_cast<std::size_t>(r + 1)])[c]) - mpq_class((*pts[0])[c]);
    int sign = 1;
    for (int col = 0; col < d; ++col) {
        int piv = -1;
        for (int r = col; r < d; ++r)
            if (sgn(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) return 0;
        if (piv != col) {
            std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(col)]);
            sign = -sign;
        }
        const mpq_class& p = m[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        sign *= sgn(p);
        for (int r = col + 1; r < d; ++r) {
            auto& row = m[static_cast<std::size_t>(r)];
            if (sgn(row[static_cast<std::size_t>(col)]) == 0) continue;
            const mpq_class f = row[static_cast<std::size_t>(col)] / p;
            for (int c = col + 1; c < d; ++c)
                row[static_cast<std::size_t>(c)] -= f * m[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
    }
    return sign;
}

int orientation(std::span<const Point> simplex) {
    std::array<const Point*, kMaxDim + 1> ptrs{};
    if (simplex.size() > ptrs.size()) throw InvalidInput("orientation: too many points");
    for (std::size_t i = 0; i < simplex.size(); ++i) ptrs[i] = &simplex[i];
    const std::span<const Point* const> view(ptrs.data(), simplex.size());
    check_simplex(view);
    const int s = filtered_sign(view);
    return s != 2 ? s : orientation_exact(view);
}

int orientation(std::span<const Point* const> facet, const Point& apex) {
    std::array<const Point*, kMaxDim + 1> ptrs{};
    if (facet.size() + 1 > ptrs.size()) throw InvalidInput("orientation: too many points");
    for (std::size_t i = 0; i < facet.size(); ++i) ptrs[i] = facet[i];
    ptrs[facet.size()] = &apex;
    const std::span<const Point* const> view(ptrs.data(), facet.size() + 1);
    check_simplex(view);
    const int s = filtered_sign(view);
    return s != 2 ? s : orientation_exact(view);
}

}  // namespace rpoly
