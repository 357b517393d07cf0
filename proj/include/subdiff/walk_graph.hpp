#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace subdiff {

/// Desk-scale graphs carrying the walks: integer lattices Z^n (implicit,
/// unbounded) and level-L Sierpinski gasket graphs (explicit, embedded with
/// unit edge length; side 2^L). Deterministic construction and vertex order.
class WalkGraph {
public:
    enum class Kind { Lattice, Gasket };

    static WalkGraph lattice(int dim);   // dim in 1..3
    static WalkGraph gasket(int level);  // level in 0..9

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    int level() const { return level_; }

    /// 3 (3^L + 1) / 2 for the gasket; lattices are unbounded.
    std::size_t vertex_count() const;
    int degree(std::size_t v) const;

    // Gasket accessors. Vertex ids follow lexicographic (a, b) order of the
    // integer lattice coordinates; embedding (x, y) = (a + b/2, b sqrt(3)/2).
    const std::vector<std::array<std::int32_t, 2>>& lattice_coords() const;
    const std::vector<std::vector<std::int32_t>>& adjacency() const;
    /// Squared Euclidean distance between gasket vertices (exact integer).
    std::int64_t dist2(std::size_t u, std::size_t v) const;
    /// Bottom-edge midpoint vertex (levels >= 1); corner for level 0.
    std::size_t default_center() const;
    /// Euclidean distance from v to the nearest of the three extreme corners.
    double corner_distance(std::size_t v) const;
    /// Side length 2^L of the embedding.
    double side() const;

private:
    WalkGraph() = default;
    Kind kind_ = Kind::Lattice;
    int dim_ = 0;
    int level_ = 0;
    std::vector<std::array<std::int32_t, 2>> coords_;
    std::vector<std::vector<std::int32_t>> adj_;
    std::array<std::size_t, 3> corners_{};
};

}  // namespace subdiff
