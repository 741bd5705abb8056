#include <doctest.h>

#include <cmath>
#include <sstream>

#include "manetsim/errors.hpp"
#include "manetsim/topology.hpp"
#include "support.hpp"

using namespace manet;

namespace {

PlacementParams params(std::size_t mobiles, double r_ex, double dest = 0.5)
{
    PlacementParams p;
    p.mobiles = mobiles;
    p.r_ex = r_ex;
    p.dest_distance = dest;
    return p;
}

void check_invariants(const Topology& t, const PlacementParams& p)
{
    REQUIRE(t.node_count() == p.mobiles + 2);
    CHECK(t.position(t.source()).x == 0.0);
    CHECK(t.position(t.source()).y == 0.0);
    CHECK(t.to_destination(t.source()) == doctest::Approx(p.dest_distance).epsilon(1e-15));
    for (NodeId i = 0; i < t.node_count(); ++i) {
        CHECK(std::hypot(t.position(i).x, t.position(i).y) <= p.r_net);
        for (NodeId j = i + 1; j < t.node_count(); ++j) {
            if (i == t.source() && j == t.destination()) {
                continue;
            }
            CHECK(t.distance(i, j) >= p.r_ex);
        }
    }
}

} // namespace

TEST_SUITE("topology") {

TEST_CASE("no mobiles leaves only the two endpoints")
{
    RandomStream rng(7);
    const auto t = generate_topology(params(0, 0.05), rng);
    REQUIRE(t.node_count() == 2);
    CHECK(t.position(0).x == 0.0);
    CHECK(t.position(1).x == 0.5);
    CHECK(t.position(1).y == 0.0);
    CHECK(t.distance(0, 1) == 0.5);
    CHECK(t.distance(1, 1) == 0.0);
}

TEST_CASE("default density satisfies every invariant")
{
    RandomStream rng(42);
    const auto p = params(200, 0.05);
    const auto t = generate_topology(p, rng);
    check_invariants(t, p);
}

TEST_CASE("exclusion zones hold for many seeds and densities")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomStream rng(seed);
        const auto p = params(50 + 10 * seed, 0.02 + 0.002 * seed, 0.1 + 0.04 * seed);
        check_invariants(generate_topology(p, rng), p);
    }
}

TEST_CASE("overfull region reports infeasible density")
{
    RandomStream rng(3);
    auto p = params(1, 1.9, 1.0);
    p.retry_budget = 10000;
    CHECK_THROWS_AS(generate_topology(p, rng), InfeasibleDensityError);
}

TEST_CASE("bad arguments are rejected")
{
    RandomStream rng(3);
    CHECK_THROWS_AS(generate_topology(params(5, -0.1), rng), ArgumentError);
    CHECK_THROWS_AS(generate_topology(params(5, 0.05, 0.0), rng), ArgumentError);
    CHECK_THROWS_AS(generate_topology(params(5, 0.05, 1.5), rng), ArgumentError);
    CHECK_THROWS_AS(Topology({{0, 0}, {2, 0}}, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(Topology({{0, 0}, {0.5, 0}, {0.51, 0}}, 1.0, 0.05), ArgumentError);
    CHECK_THROWS_AS(Topology({{0, 0}}, 1.0, 0.05), ArgumentError);
    const Topology ok({{0, 0}, {0.5, 0}}, 1.0, 0.05);
    CHECK_THROWS_AS(ok.distance(0, 2), ArgumentError);
}

TEST_CASE("source and destination may sit inside each other's exclusion zone")
{
    const Topology t({{0, 0}, {0.01, 0}}, 1.0, 0.05);
    CHECK(t.distance(0, 1) == doctest::Approx(0.01));
}

TEST_CASE("a single mobile is uniform over the disk")
{
    constexpr std::size_t n = 20000;
    std::size_t inside = 0;
    const RandomStream root(11);
    for (std::size_t k = 0; k < n; ++k) {
        auto rng = root.child(k);
        const auto t = generate_topology(params(1, 0.0), rng);
        const auto& x = t.position(1);
        if (std::hypot(x.x, x.y) < 0.5) {
            ++inside;
        }
    }
    CHECK(test::within_binomial(static_cast<double>(inside) / n, 0.25, n));
}

TEST_CASE("same seed gives the same topology")
{
    RandomStream a(99);
    RandomStream b(99);
    RandomStream c(100);
    const auto p = params(200, 0.05);
    const auto ta = generate_topology(p, a);
    CHECK(ta == generate_topology(p, b));
    CHECK_FALSE(ta == generate_topology(p, c));
}

TEST_CASE("text round trip is exact")
{
    RandomStream rng(5);
    const auto t = generate_topology(params(30, 0.05), rng);
    std::stringstream buffer;
    write_topology(buffer, t);
    CHECK(read_topology(buffer) == t);

    std::istringstream bad("# r_net 1\n# r_ex 0.05\n0 0 0\n2 0.5 0\n");
    CHECK_THROWS_AS(read_topology(bad), ArgumentError);
}

} // TEST_SUITE
