#include "manetsim/topology.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

// Boundary tolerance for positions read back from text.
constexpr double kSlack = 1e-12;

void validate_placement(const std::vector<Point>& positions, double r_net, double r_ex)
{
    if (positions.size() < 2) {
        throw ArgumentError("topology needs at least a source and a destination");
    }
    if (!(r_net > 0.0) || !(r_ex >= 0.0) || !std::isfinite(r_ex)) {
        throw ArgumentError("topology requires r_net > 0 and a finite r_ex >= 0");
    }
    const auto n = positions.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = std::hypot(positions[i].x, positions[i].y);
        if (radius > r_net * (1.0 + kSlack)) {
            throw ArgumentError("node " + std::to_string(i) + " lies outside the network disk");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (i == 0 && j == n - 1) {
                continue;
            }
            if (euclidean(positions[i], positions[j]) < r_ex * (1.0 - kSlack)) {
                throw ArgumentError("nodes " + std::to_string(i) + " and " + std::to_string(j)
                                    + " violate the exclusion zone");
            }
        }
    }
}

} // namespace

double euclidean(Point a, Point b) noexcept
{
    return std::hypot(b.x - a.x, b.y - a.y);
}

Topology::Topology(std::vector<Point> positions, double r_net, double r_ex)
    : positions_(std::move(positions)), r_net_(r_net), r_ex_(r_ex)
{
    validate_placement(positions_, r_net_, r_ex_);
}

const Point& Topology::position(NodeId i) const
{
    if (i >= positions_.size()) {
        throw ArgumentError("node index " + std::to_string(i) + " out of range");
    }
    return positions_[i];
}

double Topology::distance(NodeId i, NodeId j) const
{
    return euclidean(position(i), position(j));
}

double distance(const Topology& topology, NodeId i, NodeId j)
{
    return topology.distance(i, j);
}

Topology generate_topology(const PlacementParams& params, RandomStream& rng)
{
    // A large r_ex is not rejected up front: placement then runs out of
    // retries and reports the infeasible density.
    if (!(params.r_net > 0.0) || !(params.r_ex >= 0.0) || !std::isfinite(params.r_ex)) {
        throw ArgumentError("generate_topology requires r_net > 0 and a finite r_ex >= 0");
    }
    if (!(params.dest_distance > 0.0) || params.dest_distance > params.r_net) {
        throw ArgumentError("generate_topology requires 0 < dest_distance <= r_net");
    }
    if (params.retry_budget == 0) {
        throw ArgumentError("retry budget must be positive");
    }

    std::vector<Point> placed;
    placed.reserve(params.mobiles + 2);
    placed.push_back({0.0, 0.0});
    placed.push_back({params.dest_distance, 0.0});

    const double r_ex2 = params.r_ex * params.r_ex;
    for (std::size_t m = 0; m < params.mobiles; ++m) {
        bool done = false;
        for (std::size_t attempt = 0; attempt < params.retry_budget && !done; ++attempt) {
            const double radius = params.r_net * std::sqrt(rng.uniform());
            const double angle = 2.0 * std::numbers::pi * rng.uniform();
            const Point candidate{radius * std::cos(angle), radius * std::sin(angle)};
            done = true;
            for (const auto& q : placed) {
                const double dx = candidate.x - q.x;
                const double dy = candidate.y - q.y;
                if (dx * dx + dy * dy < r_ex2) {
                    done = false;
                    break;
                }
            }
            if (done) {
                placed.push_back(candidate);
            }
        }
        if (!done) {
            throw InfeasibleDensityError("could not place mobile " + std::to_string(m + 1) + " of "
                                         + std::to_string(params.mobiles) + " outside the exclusion zones after "
                                         + std::to_string(params.retry_budget) + " draws");
        }
    }

    // Destination goes last so that it carries index M+1.
    std::vector<Point> positions;
    positions.reserve(placed.size());
    positions.push_back(placed[0]);
    positions.insert(positions.end(), placed.begin() + 2, placed.end());
    positions.push_back(placed[1]);
    return Topology(std::move(positions), params.r_net, params.r_ex);
}

void write_topology(std::ostream& out, const Topology& topology)
{
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    out << "# r_net " << topology.r_net() << '\n';
    out << "# r_ex " << topology.r_ex() << '\n';
    for (NodeId i = 0; i < topology.node_count(); ++i) {
        const auto& p = topology.position(i);
        out << i << ' ' << p.x << ' ' << p.y << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

Topology read_topology(std::istream& in)
{
    double r_net = 1.0;
    double r_ex = 0.0;
    std::vector<Point> positions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        if (line.front() == '#') {
            std::string hash, key;
            double value = 0.0;
            fields >> hash >> key >> value;
            if (key == "r_net") {
                r_net = value;
            } else if (key == "r_ex") {
                r_ex = value;
            }
            continue;
        }
        std::size_t index = 0;
        Point p;
        if (!(fields >> index >> p.x >> p.y)) {
            throw ArgumentError("malformed topology line " + std::to_string(line_no));
        }
        if (index != positions.size()) {
            throw ArgumentError("topology indices must be consecutive from 0 (line " + std::to_string(line_no) + ")");
        }
        positions.push_back(p);
    }
    return Topology(std::move(positions), r_net, r_ex);
}

} // namespace manet
