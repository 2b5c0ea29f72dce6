#include "rpoly/hull.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "rpoly/error.hpp"
#include "rpoly/predicates.hpp"

namespace rpoly {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
// Owner tag of a point that is a vertex, was inserted, or is no longer pending.
constexpr std::uint32_t kUsed = kNone - 1;
// Relative depth below the exit facet at which a pending point is certainly interior.
constexpr double kInteriorMargin = 1e-9;
// Same margin as the orientation filter, applied to the cofactor form.
constexpr double kSideTolerance = 1e-10;

using Key = std::array<std::uint32_t, kMaxDim>;

double factorial(int d) {
    double f = 1.0;
    for (int i = 2; i <= d; ++i) f *= i;
    return f;
}

Key make_key(const std::uint32_t* verts, int count) {
    Key k;
    k.fill(kNone);
    std::copy(verts, verts + count, k.begin());
    std::sort(k.begin(), k.begin() + count);
    return k;
}

// Visited-facet bookkeeping for one query: small linear set, hashed when large.
class VisitSet {
public:
    // Returns nullptr when id has not been seen.
    const bool* find(std::uint32_t id) const {
        if (!large_.empty() || small_.size() > kSmall) {
            auto it = large_.find(id);
            return it == large_.end() ? nullptr : &it->second;
        }
        for (const auto& e : small_)
            if (e.first == id) return &e.second;
        return nullptr;
    }
    void insert(std::uint32_t id, bool visible) {
        if (large_.empty() && small_.size() < kSmall) {
            small_.emplace_back(id, visible);
            return;
        }
        if (large_.empty())
            for (const auto& e : small_) large_.emplace(e.first, e.second);
        large_.emplace(id, visible);
    }

private:
    static constexpr std::size_t kSmall = 48;
    std::vector<std::pair<std::uint32_t, bool>> small_;
    std::unordered_map<std::uint32_t, bool> large_;
};

constexpr auto kPopcount = [] {
    std::array<std::uint8_t, 1u << kMaxDim> t{};
    for (unsigned m = 0; m < t.size(); ++m) t[m] = static_cast<std::uint8_t>(std::popcount(m));
    return t;
}();

// Distinct subsets of the given vertex sets, bucketed by size.
// Returns counts[s] = number of distinct s-subsets, for 1 <= s <= max_size.
std::array<std::int64_t, kMaxDim + 1> count_subsets(const std::vector<Key>& sets, int set_size, int only_size = 0) {
    std::array<std::vector<Key>, kMaxDim + 1> buckets;
    for (const Key& s : sets) {
        for (unsigned mask = 1; mask < (1u << set_size); ++mask) {
            const int size = kPopcount[mask];
            if (only_size != 0 && size != only_size) continue;
            Key k;
            k.fill(kNone);
            int pos = 0;
            for (int i = 0; i < set_size; ++i)
                if ((mask >> i) & 1u) k[static_cast<std::size_t>(pos++)] = s[static_cast<std::size_t>(i)];
            buckets[static_cast<std::size_t>(size)].push_back(k);
        }
    }
    std::array<std::int64_t, kMaxDim + 1> counts{};
    for (std::size_t s = 1; s < buckets.size(); ++s) {
        auto& b = buckets[s];
        std::sort(b.begin(), b.end());
        counts[s] = std::unique(b.begin(), b.end()) - b.begin();
    }
    return counts;
}

void check_points(std::span<const Point> points, int& dim) {
    if (points.empty()) throw DegenerateInput("hull of an empty point set");
    dim = points[0].dim();
    if (dim < kMinDim || dim > kMaxDim) throw InvalidInput("hull dimension must be in [2, 6]");
    for (const Point& p : points) {
        if (p.dim() != dim) throw InvalidInput("hull input: dimension mismatch");
        if (!p.finite()) throw InvalidInput("hull input: non-finite coordinate");
    }
    if (points.size() < static_cast<std::size_t>(dim) + 1) throw DegenerateInput("hull needs at least d+1 points");
}

}  // namespace

void Hull::init_points(std::span<const Point> points) {
    points_.assign(points.begin(), points.end());
    incidence_.assign(points_.size(), 0);
}

void Hull::compute_normal(Facet& f) const {
    const int d = dim_;
    std::array<std::array<double, kMaxDim>, kMaxDim> e{};
    const Point& base = points_[f.v[0]];
    double scale = 1.0;
    for (int r = 0; r + 1 < d; ++r) {
        const Point& q = points_[f.v[static_cast<std::size_t>(r + 1)]];
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) {
            const double v = q[c] - base[c];
            e[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
            n2 += v * v;
        }
        scale *= std::sqrt(n2);
    }
    f.scale = scale;
    if (d == 2) {
        f.normal[0] = -e[0][1];
        f.normal[1] = e[0][0];
        return;
    }
    if (d == 3) {
        f.normal[0] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
        f.normal[1] = e[0][2] * e[1][0] - e[0][0] * e[1][2];
        f.normal[2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        return;
    }
    // Cofactors along the last row of det[e_0; ...; e_{d-2}; y], from one
    // fully pivoted elimination of the m x d edge matrix: with pivot columns
    // c_0..c_{m-1}, free column c_m and triangular block T,
    // det[E; y] = sign * det(T) * (y_{c_m} - sum_i z_i y_{c_i}), z = T^-1 (column c_m).
    const int m = d - 1;
    std::array<int, kMaxDim> col{};
    for (int c = 0; c < d; ++c) col[static_cast<std::size_t>(c)] = c;
    double sign = 1.0;
    double det = 1.0;
    auto at = [&](int r, int c) -> double& { return e[static_cast<std::size_t>(r)][static_cast<std::size_t>(col[static_cast<std::size_t>(c)])]; };
    for (int k = 0; k < m; ++k) {
        int pr = k, pc = k;
        double best = 0.0;
        for (int r = k; r < m; ++r)
            for (int c = k; c < d; ++c)
                if (std::fabs(at(r, c)) > best) {
                    best = std::fabs(at(r, c));
                    pr = r;
                    pc = c;
                }
        if (best == 0.0) {
            f.normal.fill(0.0);
            return;
        }
        if (pr != k) {
            std::swap(e[static_cast<std::size_t>(pr)], e[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        if (pc != k) {
            std::swap(col[static_cast<std::size_t>(pc)], col[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        const double piv = at(k, k);
        det *= piv;
        for (int r = k + 1; r < m; ++r) {
            const double factor = at(r, k) / piv;
            if (factor == 0.0) continue;
            for (int c = k; c < d; ++c) at(r, c) -= factor * at(k, c);
        }
    }
    std::array<double, kMaxDim> z{};
    for (int i = m - 1; i >= 0; --i) {
        double v = at(i, m);
        for (int j = i + 1; j < m; ++j) v -= at(i, j) * z[static_cast<std::size_t>(j)];
        z[static_cast<std::size_t>(i)] = v / at(i, i);
    }
    const double s = sign * det;
    f.normal[static_cast<std::size_t>(col[static_cast<std::size_t>(m)])] = s;
    for (int i = 0; i < m; ++i) f.normal[static_cast<std::size_t>(col[static_cast<std::size_t>(i)])] = -s * z[static_cast<std::size_t>(i)];
}

double Hull::side_det(const Facet& f, const Point& x) const {
    const Point& base = points_[f.v[0]];
    double det = 0.0;
    for (int c = 0; c < dim_; ++c) det += f.normal[static_cast<std::size_t>(c)] * (x[c] - base[c]);
    return det;
}

int Hull::side(const Facet& f, const Point& x) const {
    const Point& base = points_[f.v[0]];
    double det = 0.0;
    double y2 = 0.0;
    for (int c = 0; c < dim_; ++c) {
        const double y = x[c] - base[c];
        det += f.normal[static_cast<std::size_t>(c)] * y;
        y2 += y * y;
    }
    const double bound = kSideTolerance * f.scale;
    if (det * det > bound * bound * y2 && f.scale > 0.0) return det > 0.0 ? 1 : -1;
    std::array<const Point*, kMaxDim> pts{};
    for (int i = 0; i < dim_; ++i) pts[static_cast<std::size_t>(i)] = &points_[f.v[static_cast<std::size_t>(i)]];
    return orientation(std::span<const Point* const>(pts.data(), static_cast<std::size_t>(dim_)), x);
}

std::uint32_t Hull::new_facet(const std::array<std::uint32_t, kMaxDim>& verts) {
    std::uint32_t id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
    } else {
        id = static_cast<std::uint32_t>(facets_.size());
        facets_.emplace_back();
    }
    Facet& f = facets_[id];
    f = Facet{};
    f.v = verts;
    f.nbr.fill(kNone);
    compute_normal(f);
    const int s = side(f, center_);
    if (s == 0) throw DegenerateInput("facet hyperplane passes through the interior point");
    if (s > 0) {
        // Swapping two vertices negates the determinant; the normal stays
        // orthogonal to v1 - v0, so the new base vertex changes nothing else.
        std::swap(f.v[0], f.v[1]);
        for (int c = 0; c < dim_; ++c) f.normal[static_cast<std::size_t>(c)] = -f.normal[static_cast<std::size_t>(c)];
    }
    set_depth(f);
    f.alive = true;
    for (int i = 0; i < dim_; ++i)
        if (incidence_[f.v[static_cast<std::size_t>(i)]]++ == 0) ++vertex_count_;
    return id;
}

void Hull::set_depth(Facet& f) const {
    double n2 = 0.0;
    for (int c = 0; c < dim_; ++c) n2 += f.normal[static_cast<std::size_t>(c)] * f.normal[static_cast<std::size_t>(c)];
    const double det = -side_det(f, center_);
    f.center_dist = det / std::sqrt(n2);
    f.inv_depth = 1.0 / det;
}

void Hull::kill_facet(std::uint32_t id) {
    Facet& f = facets_[id];
    for (int i = 0; i < dim_; ++i)
        if (--incidence_[f.v[static_cast<std::size_t>(i)]] == 0) --vertex_count_;
    f.alive = false;
    free_.push_back(id);
}

void Hull::link_new_facets(std::span<const std::uint32_t> ids) {
    struct Slot {
        Key key;
        std::uint32_t facet;
        int slot;
    };
    std::vector<Slot> slots;
    slots.reserve(ids.size() * static_cast<std::size_t>(dim_));
    for (std::uint32_t id : ids) {
        const Facet& f = facets_[id];
        for (int j = 0; j < dim_; ++j) {
            if (f.nbr[static_cast<std::size_t>(j)] != kNone) continue;
            std::array<std::uint32_t, kMaxDim> ridge{};
            int pos = 0;
            for (int i = 0; i < dim_; ++i)
                if (i != j) ridge[static_cast<std::size_t>(pos++)] = f.v[static_cast<std::size_t>(i)];
            slots.push_back({make_key(ridge.data(), dim_ - 1), id, j});
        }
    }
    std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.key < b.key; });
    for (std::size_t i = 0; i < slots.size(); i += 2) {
        if (i + 1 >= slots.size() || slots[i].key != slots[i + 1].key ||
            (i + 2 < slots.size() && slots[i + 2].key == slots[i].key))
            throw DegenerateInput("ridge not shared by exactly two facets (input not in general position)");
        facets_[slots[i].facet].nbr[static_cast<std::size_t>(slots[i].slot)] = slots[i + 1].facet;
        facets_[slots[i + 1].facet].nbr[static_cast<std::size_t>(slots[i + 1].slot)] = slots[i].facet;
    }
}

void Hull::refresh_inradius() {
    double rin = std::numeric_limits<double>::infinity();
    for (const Facet& f : facets_)
        if (f.alive) rin = std::min(rin, f.center_dist);
    rin_ = rin;
    stale_ = 0;
    update_filter();
}

void Hull::update_filter() {
    const double safe = rin_ * (1.0 - 1e-9) - 1e-12 * reach_;
    inradius2_ = safe > 0.0 ? safe * safe : 0.0;
}

void Hull::recenter() {
    // The vertex centroid of the grown hull sits deeper than the first
    // simplex's centroid, which widens the inradius filter.
    Point c(dim_);
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (incidence_[i] > 0) c = c + points_[i];
    c = (1.0 / static_cast<double>(vertex_count_)) * c;
    for (const Facet& f : facets_)
        if (f.alive && side(f, c) >= 0) return;
    center_ = c;
    for (Facet& f : facets_)
        if (f.alive) set_depth(f);
    reach_ = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (incidence_[i] > 0) reach_ = std::max(reach_, norm(points_[i] - center_));
    refresh_inradius();
}

bool Hull::quick_inside(const Point& x) const {
    double d2 = 0.0;
    for (int c = 0; c < dim_; ++c) {
        const double v = x[c] - center_[c];
        d2 += v * v;
    }
    return d2 < inradius2_;
}

std::int64_t Hull::find_visible(const Point& x) const {
    if (quick_inside(x)) return -1;
    for (std::uint32_t id = 0; id < facets_.size(); ++id) {
        const Facet& f = facets_[id];
        if (f.alive && side(f, x) > 0) return id;
    }
    return -1;
}

void Hull::collect_visible(const Point& x, std::uint32_t start, Visibility& vis) const {
    VisitSet seen;
    std::vector<std::uint32_t> stack{start};
    seen.insert(start, true);
    while (!stack.empty()) {
        const std::uint32_t f = stack.back();
        stack.pop_back();
        vis.visible.push_back(f);
        for (int j = 0; j < dim_; ++j) {
            const std::uint32_t g = facets_[f].nbr[static_cast<std::size_t>(j)];
            if (const bool* known = seen.find(g)) {
                if (!*known) vis.horizon.emplace_back(f, j);
                continue;
            }
            const bool visible = side(facets_[g], x) > 0;
            seen.insert(g, visible);
            if (visible) stack.push_back(g);
            else vis.horizon.emplace_back(f, j);
        }
    }
}

Hull Hull::build(std::span<const Point> points) {
    Hull h;
    check_points(points, h.dim_);
    h.init_points(points);
    const int d = h.dim_;
    const std::size_t n = points.size();

    // Greedy well-spread initial simplex: lexicographic minimum, then repeatedly
    // the point farthest from the affine hull of those already chosen.
    std::vector<std::uint32_t> chosen;
    std::uint32_t first = 0;
    for (std::uint32_t i = 1; i < n; ++i)
        if (std::lexicographical_compare(points[i].coords().begin(), points[i].coords().end(),
                                         points[first].coords().begin(), points[first].coords().end()))
            first = i;
    chosen.push_back(first);
    std::vector<Point> basis;
    for (int k = 0; k < d; ++k) {
        double best = -1.0;
        std::uint32_t arg = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            Point r = points[i] - points[first];
            for (const Point& b : basis) r = r + (-dot(r, b)) * b;
            const double dist = dot(r, r);
            if (dist > best) {
                best = dist;
                arg = i;
            }
        }
        if (!(best > 0.0)) throw DegenerateInput("points do not span R^d");
        Point r = points[arg] - points[first];
        for (const Point& b : basis) r = r + (-dot(r, b)) * b;
        basis.push_back(normalized(r));
        chosen.push_back(arg);
    }
    {
        std::array<const Point*, kMaxDim + 1> ptrs{};
        for (int i = 0; i <= d; ++i) ptrs[static_cast<std::size_t>(i)] = &points[chosen[static_cast<std::size_t>(i)]];
        if (orientation_exact(std::span<const Point* const>(ptrs.data(), static_cast<std::size_t>(d + 1))) == 0)
            throw DegenerateInput("points do not span R^d");
    }
    h.center_ = Point(d);
    for (std::uint32_t c : chosen) h.center_ = h.center_ + points[c];
    h.center_ = (1.0 / (d + 1)) * h.center_;

    std::vector<std::uint32_t> ids;
    for (int skip = 0; skip <= d; ++skip) {
        std::array<std::uint32_t, kMaxDim> verts{};
        int pos = 0;
        for (int i = 0; i <= d; ++i)
            if (i != skip) verts[static_cast<std::size_t>(pos++)] = chosen[static_cast<std::size_t>(i)];
        ids.push_back(h.new_facet(verts));
    }
    h.link_new_facets(ids);
    h.volume_ = h.compute_volume();
    h.refresh_inradius();

    for (std::uint32_t c : chosen) h.reach_ = std::max(h.reach_, norm(points[c] - h.center_));
    h.refresh_inradius();

    // Each pending point is filed under the facet its ray from the interior
    // point exits through. Growing the hull only re-files the points of
    // destroyed facets, and only among the new cone facets.
    h.owner_.assign(n, kNone);
    h.conflicts_.assign(h.facets_.size(), {});
    for (std::uint32_t c : chosen) h.owner_[c] = kUsed;
    for (std::uint32_t i = 0; i < n; ++i)
        if (h.owner_[i] == kNone) h.file_point(i, ids);

    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t f = h.owner_[i];
        if (f == kNone || f == kUsed) continue;
        h.owner_[i] = kUsed;
        const std::int64_t start = h.locate_from(points[i], f);
        if (start >= 0) h.insert_index(i, static_cast<std::uint32_t>(start), false);
    }
    h.owner_.clear();
    h.owner_.shrink_to_fit();
    h.conflicts_.clear();
    h.conflicts_.shrink_to_fit();
    h.recenter();
    h.volume_ = h.compute_volume();
    return h;
}

Hull Hull::from_facets(std::span<const Point> points, const std::vector<std::vector<std::uint32_t>>& facet_list) {
    Hull h;
    check_points(points, h.dim_);
    h.init_points(points);
    const int d = h.dim_;
    h.center_ = Point(d);
    for (const Point& p : points) h.center_ = h.center_ + p;
    h.center_ = (1.0 / static_cast<double>(points.size())) * h.center_;
    std::vector<std::uint32_t> ids;
    for (const auto& fs : facet_list) {
        if (static_cast<int>(fs.size()) != d) throw InvalidInput("facet must have exactly d vertices");
        std::array<std::uint32_t, kMaxDim> verts{};
        for (int i = 0; i < d; ++i) {
            if (fs[static_cast<std::size_t>(i)] >= points.size()) throw InvalidInput("facet vertex index out of range");
            verts[static_cast<std::size_t>(i)] = fs[static_cast<std::size_t>(i)];
        }
        ids.push_back(h.new_facet(verts));
    }
    h.link_new_facets(ids);
    h.volume_ = h.compute_volume();
    h.refresh_inradius();
    return h;
}

InsertionDelta Hull::insert(const Point& x, bool with_faces) {
    if (x.dim() != dim_) throw InvalidInput("insert: dimension mismatch");
    if (!x.finite()) throw InvalidInput("insert: non-finite coordinate");
    const std::int64_t start = find_visible(x);
    if (start < 0) return {};
    points_.push_back(x);
    incidence_.push_back(0);
    return insert_index(static_cast<std::uint32_t>(points_.size() - 1), static_cast<std::uint32_t>(start), with_faces);
}

InsertionDelta Hull::insert_index(std::uint32_t p, std::uint32_t start, bool with_faces) {
    InsertionDelta delta;
    const Point x = points_[p];
    Visibility vis;
    collect_visible(x, start, vis);

    double gain = 0.0;
    for (std::uint32_t f : vis.visible) gain += std::max(0.0, side_det(facets_[f], x));
    delta.volume_gain = gain / factorial(dim_);
    delta.inserted = true;

    if (!with_faces) {
        std::vector<std::uint32_t> verts;
        verts.reserve(vis.visible.size() * static_cast<std::size_t>(dim_));
        for (std::uint32_t f : vis.visible) verts.insert(verts.end(), facets_[f].v.begin(), facets_[f].v.begin() + dim_);
        std::sort(verts.begin(), verts.end());
        delta.visible_vertex_count = std::unique(verts.begin(), verts.end()) - verts.begin();
    } else {
        std::vector<Key> vsets;
        vsets.reserve(vis.visible.size());
        for (std::uint32_t f : vis.visible) vsets.push_back(make_key(facets_[f].v.data(), dim_));
        const auto a = count_subsets(vsets, dim_);
        delta.visible_vertex_count = a[1];
        std::vector<Key> rsets;
        rsets.reserve(vis.horizon.size());
        for (const auto& [f, j] : vis.horizon) {
            std::array<std::uint32_t, kMaxDim> ridge{};
            int pos = 0;
            for (int i = 0; i < dim_; ++i)
                if (i != j) ridge[static_cast<std::size_t>(pos++)] = facets_[f].v[static_cast<std::size_t>(i)];
            rsets.push_back(make_key(ridge.data(), dim_ - 1));
        }
        const auto b = count_subsets(rsets, dim_ - 1);
        for (int i = 0; i < dim_; ++i) {
            const auto I = static_cast<std::size_t>(i);
            delta.destroyed[I] = a[I + 1] - (i < dim_ - 1 ? b[I + 1] : 0);
            delta.created[I] = i == 0 ? 1 : b[I];
        }
    }

    struct Cone {
        std::array<std::uint32_t, kMaxDim> verts;
        std::uint32_t outside;
        int outside_slot;
    };
    std::vector<Cone> cones;
    cones.reserve(vis.horizon.size());
    for (const auto& [f, j] : vis.horizon) {
        const std::uint32_t g = facets_[f].nbr[static_cast<std::size_t>(j)];
        int k = 0;
        while (facets_[g].nbr[static_cast<std::size_t>(k)] != f) ++k;
        Cone c{facets_[f].v, g, k};
        c.verts[static_cast<std::size_t>(j)] = p;
        cones.push_back(c);
    }
    std::vector<std::uint32_t> orphans;
    if (!conflicts_.empty()) {
        for (std::uint32_t f : vis.visible) {
            for (std::uint32_t q : conflicts_[f])
                if (owner_[q] == f) orphans.push_back(q);
            conflicts_[f].clear();
        }
    }
    for (std::uint32_t f : vis.visible) kill_facet(f);

    std::vector<std::uint32_t> ids;
    ids.reserve(cones.size());
    for (const Cone& c : cones) {
        const std::uint32_t id = new_facet(c.verts);
        Facet& nf = facets_[id];
        for (int i = 0; i < dim_; ++i)
            if (nf.v[static_cast<std::size_t>(i)] == p) nf.nbr[static_cast<std::size_t>(i)] = c.outside;
        // Slot ids of killed facets are recycled, so g's slot was located up front.
        facets_[c.outside].nbr[static_cast<std::size_t>(c.outside_slot)] = id;
        ids.push_back(id);
    }
    link_new_facets(ids);
    volume_ += delta.volume_gain;
    if (!conflicts_.empty()) {
        if (conflicts_.size() < facets_.size()) conflicts_.resize(facets_.size());
        for (std::uint32_t q : orphans) file_point(q, ids);
    }
    reach_ = std::max(reach_, norm(x - center_));
    // The inradius only grows with the hull, so the old value stays a valid
    // lower bound; recompute it once enough insertions have accumulated.
    if (++stale_ * 8 > facet_count()) refresh_inradius();
    else update_filter();
    return delta;
}

void Hull::file_point(std::uint32_t q, std::span<const std::uint32_t> candidates) {
    const Point& x = points_[q];
    double best = -std::numeric_limits<double>::infinity();
    std::uint32_t arg = candidates[0];
    for (std::uint32_t f : candidates) {
        const double v = side_det(facets_[f], x) * facets_[f].inv_depth;
        if (v > best) {
            best = v;
            arg = f;
        }
    }
    if (best <= -kInteriorMargin && side(facets_[arg], x) < 0) {
        owner_[q] = kUsed;
        return;
    }
    owner_[q] = arg;
    conflicts_[arg].push_back(q);
}

std::int64_t Hull::locate_from(const Point& x, std::uint32_t f) const {
    if (side(facets_[f], x) > 0) return f;
    for (int j = 0; j < dim_; ++j) {
        const std::uint32_t g = facets_[f].nbr[static_cast<std::size_t>(j)];
        if (side(facets_[g], x) > 0) return g;
    }
    // Beneath its exit facet by a clear margin: interior. Otherwise the
    // filing may have been decided by rounding, so search everything.
    if (side_det(facets_[f], x) * facets_[f].inv_depth <= -kInteriorMargin) return -1;
    return find_visible(x);
}

std::vector<std::uint32_t> Hull::vertices() const {
    std::vector<std::uint32_t> out;
    out.reserve(vertex_count_);
    for (std::uint32_t i = 0; i < incidence_.size(); ++i)
        if (incidence_[i] > 0) out.push_back(i);
    return out;
}

std::vector<std::uint32_t> Hull::facet_ids() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t id = 0; id < facets_.size(); ++id)
        if (facets_[id].alive) out.push_back(id);
    return out;
}

Hull::FacetInfo Hull::facet(std::uint32_t id) const {
    if (id >= facets_.size() || !facets_[id].alive) throw InvalidInput("no such facet");
    const Facet& f = facets_[id];
    FacetInfo info;
    info.vertices = f.v;
    info.neighbors = f.nbr;
    info.unit_normal = Point(dim_);
    double n2 = 0.0;
    for (int c = 0; c < dim_; ++c) n2 += f.normal[static_cast<std::size_t>(c)] * f.normal[static_cast<std::size_t>(c)];
    const double inv = 1.0 / std::sqrt(n2);
    for (int c = 0; c < dim_; ++c) info.unit_normal[c] = f.normal[static_cast<std::size_t>(c)] * inv;
    info.offset = dot(info.unit_normal, points_[f.v[0]]);
    return info;
}

std::vector<std::vector<std::uint32_t>> Hull::facet_sets() const {
    std::vector<std::vector<std::uint32_t>> out;
    for (const Facet& f : facets_) {
        if (!f.alive) continue;
        std::vector<std::uint32_t> s(f.v.begin(), f.v.begin() + dim_);
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

double Hull::compute_volume() const {
    double total = 0.0;
    for (const Facet& f : facets_)
        if (f.alive) total += std::fabs(side_det(f, center_));
    return total / factorial(dim_);
}

std::int64_t Hull::face_count(int i) const {
    if (i < 0 || i >= dim_) throw InvalidInput("face dimension out of range");
    if (i == 0) return static_cast<std::int64_t>(vertex_count_);
    const auto facets = static_cast<std::int64_t>(facet_count());
    if (i == dim_ - 1) return facets;
    if (i == dim_ - 2) return facets * dim_ / 2;
    std::vector<Key> sets;
    for (const Facet& f : facets_)
        if (f.alive) sets.push_back(make_key(f.v.data(), dim_));
    return count_subsets(sets, dim_, i + 1)[static_cast<std::size_t>(i + 1)];
}

std::vector<std::int64_t> Hull::f_vector() const {
    std::vector<std::int64_t> f;
    for (int i = 0; i < dim_; ++i) f.push_back(face_count(i));
    return f;
}

std::vector<std::uint32_t> Hull::visible_facets(const Point& x) const {
    if (x.dim() != dim_) throw InvalidInput("visible_facets: dimension mismatch");
    const std::int64_t start = find_visible(x);
    if (start < 0) return {};
    Visibility vis;
    collect_visible(x, static_cast<std::uint32_t>(start), vis);
    std::sort(vis.visible.begin(), vis.visible.end());
    return vis.visible;
}

std::int64_t Hull::visible_vertex_count(const Point& x) const {
    if (x.dim() != dim_) throw InvalidInput("visible_vertex_count: dimension mismatch");
    const std::int64_t start = find_visible(x);
    if (start < 0) return 0;
    Visibility vis;
    collect_visible(x, static_cast<std::uint32_t>(start), vis);
    std::vector<std::uint32_t> verts;
    for (std::uint32_t f : vis.visible)
        for (int i = 0; i < dim_; ++i) verts.push_back(facets_[f].v[static_cast<std::size_t>(i)]);
    std::sort(verts.begin(), verts.end());
    return std::unique(verts.begin(), verts.end()) - verts.begin();
}

bool Hull::contains(const Point& x) const {
    if (x.dim() != dim_) throw InvalidInput("contains: dimension mismatch");
    return find_visible(x) < 0;
}

bool Hull::valid() const {
    for (std::uint32_t id = 0; id < facets_.size(); ++id) {
        const Facet& f = facets_[id];
        if (!f.alive) continue;
        for (int j = 0; j < dim_; ++j) {
            const std::uint32_t g = f.nbr[static_cast<std::size_t>(j)];
            if (g >= facets_.size() || !facets_[g].alive) return false;
            int back = 0;
            for (int k = 0; k < dim_; ++k)
                if (facets_[g].nbr[static_cast<std::size_t>(k)] == id) ++back;
            if (back != 1) return false;
            // The shared ridge must be f's vertex set minus vertex j.
            for (int i = 0; i < dim_; ++i) {
                if (i == j) continue;
                const std::uint32_t v = f.v[static_cast<std::size_t>(i)];
                if (std::find(facets_[g].v.begin(), facets_[g].v.begin() + dim_, v) == facets_[g].v.begin() + dim_)
                    return false;
            }
        }
        for (std::uint32_t v = 0; v < incidence_.size(); ++v) {
            if (incidence_[v] == 0 || std::find(f.v.begin(), f.v.begin() + dim_, v) != f.v.begin() + dim_) continue;
            if (side(f, points_[v]) > 0) return false;
        }
    }
    return true;
}

Hull brute_force_hull(std::span<const Point> points) {
    if (points.size() > 50) throw InvalidInput("brute_force_hull refuses more than 50 points");
    int d = 0;
    check_points(points, d);
    const auto n = static_cast<std::uint32_t>(points.size());
    std::vector<std::vector<std::uint32_t>> facets;
    std::vector<std::uint32_t> comb(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) comb[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
    std::array<const Point*, kMaxDim> pts{};
    for (;;) {
        for (int i = 0; i < d; ++i) pts[static_cast<std::size_t>(i)] = &points[comb[static_cast<std::size_t>(i)]];
        bool pos = false, neg = false;
        for (std::uint32_t q = 0; q < n && !(pos && neg); ++q) {
            if (std::find(comb.begin(), comb.end(), q) != comb.end()) continue;
            const int s = orientation(std::span<const Point* const>(pts.data(), static_cast<std::size_t>(d)), points[q]);
            pos |= s > 0;
            neg |= s < 0;
        }
        if (pos != neg) facets.push_back(comb);
        int k = d - 1;
        while (k >= 0 && comb[static_cast<std::size_t>(k)] == n - static_cast<std::uint32_t>(d - k)) --k;
        if (k < 0) break;
        ++comb[static_cast<std::size_t>(k)];
        for (int i = k + 1; i < d; ++i) comb[static_cast<std::size_t>(i)] = comb[static_cast<std::size_t>(i - 1)] + 1;
    }
    if (facets.empty()) throw DegenerateInput("points do not span R^d");
    return Hull::from_facets(points, facets);
}

}  // namespace rpoly
