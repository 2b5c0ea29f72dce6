#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rpoly/point.hpp"

namespace rpoly {

using FaceCounts = std::array<std::int64_t, kMaxDim>;

// Face-lattice change caused by adding one point to a hull. Entry i of the
// count arrays refers to i-dimensional faces, 0 <= i < d.
struct InsertionDelta {
    FaceCounts destroyed{};
    FaceCounts created{};
    std::int64_t visible_vertex_count = 0;
    double volume_gain = 0.0;
    bool inserted = false;
};

// Simplicial convex hull in R^d (2 <= d <= 6), built and grown by the
// beneath-beyond method. Visibility decisions go through the filtered exact
// orientation predicate; a point on a facet's hyperplane does not see it.
//
// Point indices are stable: build() keeps the input order, insert() appends
// the point only when it lands outside the current hull.
// Facet ids are storage slots and are recycled after deletions.
class Hull {
public:
    struct FacetInfo {
        std::array<std::uint32_t, kMaxDim> vertices{};
        std::array<std::uint32_t, kMaxDim> neighbors{};  // neighbors[j] is across the ridge opposite vertices[j]
        Point unit_normal;                               // outward
        double offset = 0.0;                             // unit_normal . y <= offset on the hull
    };

    static Hull build(std::span<const Point> points);
    // Hull from a known facet list (vertex index sets), e.g. from the brute-force oracle.
    static Hull from_facets(std::span<const Point> points, const std::vector<std::vector<std::uint32_t>>& facets);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t point_count() const noexcept { return points_.size(); }
    [[nodiscard]] const Point& point(std::uint32_t i) const { return points_.at(i); }
    [[nodiscard]] const Point& interior_point() const noexcept { return center_; }

    // Sorted indices of the hull's vertices (extreme points).
    [[nodiscard]] std::vector<std::uint32_t> vertices() const;
    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] std::size_t facet_count() const noexcept { return facets_.size() - free_.size(); }
    [[nodiscard]] std::vector<std::uint32_t> facet_ids() const;
    [[nodiscard]] FacetInfo facet(std::uint32_t id) const;
    // Facets as sorted vertex-index sets, the list itself sorted.
    [[nodiscard]] std::vector<std::vector<std::uint32_t>> facet_sets() const;

    // Cached volume, maintained under insertion.
    [[nodiscard]] double volume() const noexcept { return volume_; }
    // Sum over facets of |det(facet, interior point)| / d!.
    [[nodiscard]] double compute_volume() const;

    // Number of i-faces, 0 <= i < d (distinct (i+1)-subsets of facet vertex sets).
    [[nodiscard]] std::int64_t face_count(int i) const;
    [[nodiscard]] std::vector<std::int64_t> f_vector() const;

    [[nodiscard]] std::vector<std::uint32_t> visible_facets(const Point& x) const;
    [[nodiscard]] std::int64_t visible_vertex_count(const Point& x) const;
    [[nodiscard]] bool contains(const Point& x) const;

    // Adds x. Interior points leave the hull untouched and give an all-zero
    // delta. Face counts are only filled in when with_faces is true.
    InsertionDelta insert(const Point& x, bool with_faces = true);

    // Structural self-check: adjacency is an involution and every vertex lies
    // weakly beneath every facet (exact predicate). For tests; O(F * V).
    [[nodiscard]] bool valid() const;

private:
    struct Facet {
        std::array<std::uint32_t, kMaxDim> v{};
        std::array<std::uint32_t, kMaxDim> nbr{};
        std::array<double, kMaxDim> normal{};  // cofactor vector: normal . (y - v0) = det
        double scale = 0.0;                    // Hadamard bound on |normal|
        double center_dist = 0.0;              // distance from the interior point to the hyperplane
        double inv_depth = 0.0;                // 1 / |det(facet, interior point)|
        bool alive = false;
    };

    struct Visibility {
        std::vector<std::uint32_t> visible;
        std::vector<std::pair<std::uint32_t, int>> horizon;  // (visible facet, slot opposite the ridge)
    };

    Hull() = default;
    void init_points(std::span<const Point> points);
    std::uint32_t new_facet(const std::array<std::uint32_t, kMaxDim>& verts);
    void compute_normal(Facet& f) const;
    int side(const Facet& f, const Point& x) const;
    double side_det(const Facet& f, const Point& x) const;
    bool quick_inside(const Point& x) const;
    std::int64_t find_visible(const Point& x) const;
    void collect_visible(const Point& x, std::uint32_t start, Visibility& vis) const;
    void link_new_facets(std::span<const std::uint32_t> ids);
    void set_depth(Facet& f) const;
    void refresh_inradius();
    void update_filter();
    void recenter();
    void file_point(std::uint32_t q, std::span<const std::uint32_t> candidates);
    std::int64_t locate_from(const Point& x, std::uint32_t f) const;
    void kill_facet(std::uint32_t id);
    InsertionDelta insert_index(std::uint32_t p, std::uint32_t start, bool with_faces);

    int dim_ = 0;
    std::vector<Point> points_;
    std::vector<Facet> facets_;
    std::vector<std::uint32_t> free_;
    std::vector<std::uint32_t> incidence_;
    std::size_t vertex_count_ = 0;
    Point center_;
    double inradius2_ = 0.0;  // squared radius of a ball around center_ certainly inside
    double rin_ = 0.0;        // lower bound on the inradius about center_
    double reach_ = 0.0;      // upper bound on |vertex - center_|
    std::size_t stale_ = 0;   // insertions since rin_ was recomputed
    // Build-time conflict filing: owner_[q] is the facet pending point q is filed under.
    std::vector<std::uint32_t> owner_;
    std::vector<std::vector<std::uint32_t>> conflicts_;
    double volume_ = 0.0;
};

// O(n^(d+1)) oracle: a d-subset is a facet iff every other point lies weakly on
// one side of its hyperplane and at least one lies strictly. Refuses n > 50.
Hull brute_force_hull(std::span<const Point> points);

}  // namespace rpoly
