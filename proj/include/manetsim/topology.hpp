#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "manetsim/random.hpp"

namespace manet {

using NodeId = std::uint32_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

double euclidean(Point a, Point b) noexcept;

/// Fixed node placement for one session.
///
/// Node 0 is the source, node M+1 the destination, and nodes 1..M are the
/// other mobiles. All nodes lie in the disk of radius `r_net` around the
/// origin; every pair other than (source, destination) is at least `r_ex`
/// apart. Construction validates these invariants.
class Topology {
public:
    Topology(std::vector<Point> positions, double r_net, double r_ex);

    std::size_t mobile_count() const noexcept { return positions_.size() - 2; }
    std::size_t node_count() const noexcept { return positions_.size(); }
    NodeId source() const noexcept { return 0; }
    NodeId destination() const noexcept { return static_cast<NodeId>(positions_.size() - 1); }

    double r_net() const noexcept { return r_net_; }
    double r_ex() const noexcept { return r_ex_; }

    const Point& position(NodeId i) const;
    const std::vector<Point>& positions() const noexcept { return positions_; }

    double distance(NodeId i, NodeId j) const;
    /// Remaining distance from node i to the destination.
    double to_destination(NodeId i) const { return distance(i, destination()); }

    bool operator==(const Topology&) const = default;

private:
    std::vector<Point> positions_;
    double r_net_;
    double r_ex_;
};

struct PlacementParams {
    std::size_t mobiles = 200;
    double r_net = 1.0;
    double r_ex = 0.05;
    double dest_distance = 0.5;
    std::size_t retry_budget = 1'000'000;
};

/// Uniform clustering: source at the origin, destination at (dest_distance, 0),
/// then each remaining mobile redrawn uniformly over the disk until it clears
/// every exclusion zone placed so far.
Topology generate_topology(const PlacementParams& params, RandomStream& rng);

double distance(const Topology& topology, NodeId i, NodeId j);

/// Plain-text table, one node per line: `index x y`. Lines starting with `#`
/// carry `r_net` and `r_ex`.
void write_topology(std::ostream& out, const Topology& topology);
Topology read_topology(std::istream& in);

} // namespace manet
