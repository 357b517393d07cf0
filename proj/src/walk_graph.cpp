#include "subdiff/walk_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace subdiff {

namespace {

using Coord = std::array<std::int32_t, 2>;

void subdivide(const Coord& c1, const Coord& c2, const Coord& c3, int depth,
               std::set<std::pair<Coord, Coord>>& edges) {
    if (depth == 0) {
        auto add = [&edges](Coord u, Coord v) {
            if (v < u) std::swap(u, v);
            edges.insert({u, v});
        };
        add(c1, c2);
        add(c2, c3);
        add(c3, c1);
        return;
    }
    const Coord m12{(c1[0] + c2[0]) / 2, (c1[1] + c2[1]) / 2};
    const Coord m23{(c2[0] + c3[0]) / 2, (c2[1] + c3[1]) / 2};
    const Coord m31{(c3[0] + c1[0]) / 2, (c3[1] + c1[1]) / 2};
    subdivide(c1, m12, m31, depth - 1, edges);
    subdivide(m12, c2, m23, depth - 1, edges);
    subdivide(m31, m23, c3, depth - 1, edges);
}

}  // namespace

WalkGraph WalkGraph::lattice(int dim) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("WalkGraph::lattice: dimension must be 1..3");
    WalkGraph g;
    g.kind_ = Kind::Lattice;
    g.dim_ = dim;
    return g;
}

WalkGraph WalkGraph::gasket(int level) {
    if (level < 0 || level > 9)
        throw std::invalid_argument("WalkGraph::gasket: level must be 0..9");
    WalkGraph g;
    g.kind_ = Kind::Gasket;
    g.level_ = level;

    const std::int32_t side = 1 << level;
    std::set<std::pair<Coord, Coord>> edges;
    subdivide(Coord{0, 0}, Coord{side, 0}, Coord{0, side}, level, edges);

    std::map<Coord, std::int32_t> index;
    for (const auto& e : edges) {
        index.emplace(e.first, 0);
        index.emplace(e.second, 0);
    }
    std::int32_t next = 0;
    for (auto& kv : index) kv.second = next++;

    g.coords_.resize(index.size());
    g.adj_.resize(index.size());
    for (const auto& kv : index) g.coords_[kv.second] = kv.first;
    for (const auto& e : edges) {
        const std::int32_t u = index[e.first], v = index[e.second];
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());

    g.corners_ = {(std::size_t)index[Coord{0, 0}], (std::size_t)index[Coord{side, 0}],
                  (std::size_t)index[Coord{0, side}]};
    return g;
}

std::size_t WalkGraph::vertex_count() const {
    if (kind_ == Kind::Lattice)
        throw std::logic_error("WalkGraph: lattice is unbounded");
    return coords_.size();
}

int WalkGraph::degree(std::size_t v) const {
    if (kind_ == Kind::Lattice) return 2 * dim_;
    return (int)adj_.at(v).size();
}

const std::vector<std::array<std::int32_t, 2>>& WalkGraph::lattice_coords() const {
    if (kind_ != Kind::Gasket) throw std::logic_error("WalkGraph: not a gasket");
    return coords_;
}

const std::vector<std::vector<std::int32_t>>& WalkGraph::adjacency() const {
    if (kind_ != Kind::Gasket) throw std::logic_error("WalkGraph: not a gasket");
    return adj_;
}

std::int64_t WalkGraph::dist2(std::size_t u, std::size_t v) const {
    // |(da + db/2, db sqrt3/2)|^2 = da^2 + da db + db^2, exact in integers.
    const std::int64_t da = coords_.at(u)[0] - coords_.at(v)[0];
    const std::int64_t db = coords_.at(u)[1] - coords_.at(v)[1];
    return da * da + da * db + db * db;
}

std::size_t WalkGraph::default_center() const {
    if (kind_ != Kind::Gasket) throw std::logic_error("WalkGraph: not a gasket");
    if (level_ == 0) return corners_[0];
    const Coord mid{(std::int32_t)(1 << (level_ - 1)), 0};
    const auto it = std::lower_bound(coords_.begin(), coords_.end(), mid);
    return (std::size_t)(it - coords_.begin());
}

double WalkGraph::corner_distance(std::size_t v) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : corners_)
        best = std::min(best, std::sqrt((double)dist2(v, c)));
    return best;
}

double WalkGraph::side() const { return (double)(1 << level_); }

}  // namespace subdiff
