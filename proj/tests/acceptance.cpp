// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is non-zero when a criterion fails unexpectedly. Criteria listed
// in kKnownFailures still print FAIL; they only stop the run under --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manetsim/experiment.hpp"
#include "manetsim/outage.hpp"
#include "metrics_reference.hpp"
#include "oracles.hpp"

using namespace manet;

namespace {

// Greedy forwarding in this model shows no reliability jump just beyond r_t;
// see README ("Known deviations").
const std::set<std::string> kKnownFailures{"3a"};

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    std::function<Verdict()> run;
};

std::string fmt(double v, int precision = 4)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, v);
    return buffer;
}

// ---------------------------------------------------------------- 1 and 2

LinkOutageInput random_input(std::mt19937_64& gen)
{
    std::uniform_int_distribution<int> m(1, 3);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> log_omega(-2.0, 1.0);
    const double z_values[] = {0.0, 0.1, 1.0};
    const double beta_values[] = {0.5, 1.0, 2.0};
    LinkOutageInput in;
    in.m_k = m(gen);
    in.omega_k = std::pow(10.0, log_omega(gen) + 1.0);
    for (int i = 0, n = count(gen); i < n; ++i) {
        in.interferers.push_back({std::pow(10.0, log_omega(gen)), m(gen)});
    }
    in.z = z_values[gen() % 3];
    in.beta = beta_values[gen() % 3];
    return in;
}

Verdict outage_vs_simulation()
{
    std::mt19937_64 gen(2024);
    constexpr std::size_t draws = 1'000'000;
    int agree = 0;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto in = random_input(gen);
        const double exact = outage_probability(in);
        const auto sim = test::simulated_outage(in, draws, 1000 + k);
        // A zero-event estimate has zero sample error; floor it at one draw.
        const double se = std::max(sim.se, 1.0 / draws);
        const double z = std::abs(exact - sim.p) / se;
        worst = std::max(worst, z);
        agree += z <= 4.0 ? 1 : 0;
    }
    return {agree >= 97, std::to_string(agree) + "/100 within 4 SE (largest deviation " + fmt(worst, 3) + " SE)"};
}

Verdict spot_values()
{
    const double a = outage_probability({1.0, 1, {}, 1.0, 1.0});
    const double b = outage_probability({1.0, 1, {{0.5, 1}}, 1.0, 0.0});
    const double ea = std::abs(a - (1.0 - std::exp(-1.0)));
    const double eb = std::abs(b - 1.0 / 3.0);
    return {ea <= 1e-12 && eb <= 1e-12, "errors " + fmt(ea, 2) + " and " + fmt(eb, 2)};
}

// ---------------------------------------------------------------- 3

struct Row {
    double x;
    AveragedMetrics m;
};

/// rows[protocol label] in sweep order.
std::map<std::string, std::vector<Row>> sweep(ExperimentConfig config, const std::string& variable,
                                              std::vector<double> values)
{
    config.sweeps = {{variable, std::move(values)}};
    const auto tables = run_experiment(config);
    std::map<std::string, std::vector<Row>> out;
    for (const auto& row : tables.at(0).rows) {
        out[row.protocol].push_back({row.sweep_value, row.metrics});
    }
    return out;
}

ExperimentConfig desk_scale()
{
    ExperimentConfig c; // defaults: 200 topologies, 10 x 10 x 10 trials
    c.seed = 1;
    return c;
}

Verdict greedy_jump()
{
    auto c = desk_scale();
    c.protocols = {{Protocol::greedy, 0.3}};
    const auto rows = sweep(c, "dest_distance", {0.3, 0.35}).begin()->second;
    const double before = rows[0].m.delivery.value_or(0.0);
    const double after = rows[1].m.delivery.value_or(0.0);
    return {after - before >= 0.05, "delivery reliability " + fmt(before) + " at 0.3 -> " + fmt(after)
                                        + " at 0.35 (change " + fmt(after - before, 3) + ", need >= 0.05)"};
}

std::map<std::string, std::vector<Row>>& distance_sweep()
{
    static std::map<std::string, std::vector<Row>> rows = [] {
        auto c = desk_scale();
        c.protocols = {{Protocol::aodv, {}}, {Protocol::greedy, 0.4}, {Protocol::max_progress, {}}};
        return sweep(c, "dest_distance", {0.4, 0.5, 0.75, 1.0});
    }();
    return rows;
}

Verdict aodv_least_reliable()
{
    auto& rows = distance_sweep();
    const auto& aodv = rows.at("AODV");
    const auto& gf = rows.at("GF(r_t=0.4)");
    const auto& mp = rows.at("MP");
    bool ok = true;
    std::string detail;
    for (std::size_t i = 1; i < aodv.size(); ++i) {
        ok = ok && mp[i].m.R > aodv[i].m.R && gf[i].m.R > aodv[i].m.R;
        detail += "d=" + fmt(aodv[i].x) + ": AODV " + fmt(aodv[i].m.R, 3) + " GF " + fmt(gf[i].m.R, 3) + " MP "
                  + fmt(mp[i].m.R, 3) + "; ";
    }
    return {ok, detail};
}

Verdict aodv_acknowledgement()
{
    auto& rows = distance_sweep();
    const auto& aodv = rows.at("AODV");
    const auto& mp = rows.at("MP");
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < aodv.size(); ++i) {
        const double a = aodv[i].m.acknowledgement.value_or(0.0);
        const double b = mp[i].m.acknowledgement.value_or(0.0);
        ok = ok && a < b;
        detail += "d=" + fmt(aodv[i].x) + ": " + fmt(a, 3) + " < " + fmt(b, 3) + "; ";
    }
    return {ok, detail};
}

Verdict spreading_monotone()
{
    const auto rows = sweep(desk_scale(), "G_over_h", {1, 8, 32, 96});
    bool ok = true;
    std::string detail;
    for (const auto& [label, r] : rows) {
        detail += label + ":";
        for (std::size_t i = 0; i < r.size(); ++i) {
            detail += " " + fmt(r[i].m.A, 4);
            if (i > 0) {
                const double se = std::max(r[i].m.A_se, r[i - 1].m.A_se);
                ok = ok && r[i].m.A >= r[i - 1].m.A - se;
            }
        }
        detail += "; ";
    }
    return {ok, detail};
}

Verdict retransmission_saturation()
{
    const auto rows = sweep(desk_scale(), "B", {1, 2, 4});
    bool ok = true;
    std::string detail;
    for (const auto& [label, r] : rows) {
        const double gain = r[1].m.A - r[0].m.A;
        const double more = std::abs(r[2].m.A - r[1].m.A);
        ok = ok && gain > 0 && more < gain;
        detail += label + ": " + fmt(r[0].m.A) + " / " + fmt(r[1].m.A) + " / " + fmt(r[2].m.A) + "; ";
    }
    return {ok, detail};
}

Verdict contention_direction()
{
    auto c = desk_scale();
    c.relay_density = 80 / std::numbers::pi;
    const auto rows = sweep(c, "contention_density", {5 / std::numbers::pi, 10 / std::numbers::pi,
                                                      20 / std::numbers::pi});
    bool ok = true;
    std::string detail;
    for (const auto& [label, r] : rows) {
        ok = ok && r[0].m.R > r[1].m.R && r[1].m.R > r[2].m.R;
        detail += label + ": " + fmt(r[0].m.R, 3) + " > " + fmt(r[1].m.R, 3) + " > " + fmt(r[2].m.R, 3) + "; ";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------- 4

bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-12;
}

bool close(const std::optional<double>& a, const std::optional<double>& b)
{
    return a.has_value() == b.has_value() && (!a || close(*a, *b));
}

Verdict metrics_identities()
{
    std::mt19937_64 gen(77);
    const Protocol protocols[] = {Protocol::aodv, Protocol::greedy, Protocol::max_progress};
    int mismatches = 0;
    for (int set = 0; set < 1000; ++set) {
        ProtocolConfig c;
        c.protocol = protocols[set % 3];
        const double lambda = transmitter_density(200, 1.0);
        const auto trials = test::synthetic_outcomes(gen, c, 1 + gen() % 500, (gen() % 101) / 100.0);
        const auto m = topology_metrics(trials, c, lambda);
        const auto ref = test::reference_metrics(trials, c, lambda);
        const bool ok = close(m.R, ref.R) && close(m.H, ref.H) && close(m.D, ref.D) && close(m.A, ref.A)
                        && close(m.request, ref.request) && close(m.acknowledgement, ref.ack)
                        && close(m.delivery, ref.delivery);
        mismatches += ok ? 0 : 1;
    }
    return {mismatches == 0, std::to_string(1000 - mismatches) + "/1000 outcome sets match to 1e-12"};
}

// ---------------------------------------------------------------- 5

struct InvariantTally {
    std::mutex mutex;
    std::map<std::string, std::size_t> checked;
    std::map<std::string, std::size_t> violated;
    std::set<std::size_t> topologies_seen;

    void note(const std::string& name, bool ok)
    {
        ++checked[name];
        if (!ok) {
            ++violated[name];
        }
    }
};

/// Fewest hops from the source over links not in outage in slot 0.
int bfs_hops(const TrialContext& ctx)
{
    const auto& t = ctx.topology;
    const auto n = static_cast<NodeId>(t.node_count());
    std::vector<int> hops(n, -1);
    std::deque<NodeId> queue{t.source()};
    hops[t.source()] = 0;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        if (u == t.destination()) {
            break;
        }
        for (NodeId v = 1; v < n; ++v) {
            if (hops[v] < 0 && ctx.roles.route_eligible(v) && !ctx.links.in_outage(0, u, v, {})) {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return hops[t.destination()];
}

void check_trial(InvariantTally& tally, const TrialContext& ctx, const TrialOutcome& out)
{
    std::lock_guard lock(tally.mutex);
    const auto& t = ctx.topology;
    if (tally.topologies_seen.insert(ctx.topology_index).second) {
        bool ok = true;
        for (NodeId i = 0; i < t.node_count(); ++i) {
            for (NodeId j = i + 1; j < t.node_count(); ++j) {
                if (!(i == t.source() && j == t.destination())) {
                    ok = ok && t.distance(i, j) >= t.r_ex();
                }
            }
        }
        tally.note("exclusion zones", ok);
    }

    const auto& path = out.path;
    std::set<NodeId> distinct(path.begin(), path.end());
    tally.note("no repeated node", distinct.size() == path.size());

    const Protocol p = ctx.protocol.protocol;
    if (p != Protocol::aodv) {
        bool monotone = true;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            monotone = monotone && t.to_destination(path[i + 1]) < t.to_destination(path[i]);
            if (p == Protocol::greedy) {
                monotone = monotone && t.distance(path[i], path[i + 1]) <= ctx.protocol.r_t;
            }
        }
        tally.note("loop freedom", monotone);
    } else {
        const int expected = bfs_hops(ctx);
        if (out.failure_stage == FailureStage::no_path) {
            tally.note("fewest hops", expected < 0);
        } else {
            tally.note("fewest hops", expected >= 0 && static_cast<int>(path.size()) - 1 == expected);
        }
    }

    if (p == Protocol::max_progress) {
        auto& cache = ctx.links.cache();
        for (std::size_t l = 0; l < out.silenced.size(); ++l) {
            const auto& silenced = out.silenced[l];
            if (l >= out.delivery_slots.size()) {
                continue;
            }
            bool ok = std::is_sorted(silenced.begin(), silenced.end());
            for (NodeId s : silenced) {
                ok = ok && ctx.roles.potential_interferer(s);
            }
            // A failed hop leaves no receiver on the path; only completed hops are compared.
            if (l + 1 < path.size()) {
                const NodeId from = path[l];
                const NodeId to = path[l + 1];
                for (NodeId s : silenced) {
                    ok = ok && std::min(t.distance(from, s), t.distance(to, s)) <= ctx.protocol.r_g;
                }
                for (int a = 0; a < ctx.protocol.B; ++a) {
                    const std::size_t slot = out.delivery_slots[l] + a;
                    if (slot >= cache.num_slots()) {
                        break;
                    }
                    ok = ok && cache.outage(slot, from, to, silenced) <= cache.outage(slot, from, to, {});
                }
            }
            tally.note("silencing monotonicity", ok);
        }
    }
}

Verdict structural_invariants()
{
    auto c = desk_scale();
    c.topologies = 25;
    c.dest_distance = 0.75;
    c.protocols = {{Protocol::aodv, {}}, {Protocol::greedy, {}}, {Protocol::greedy, 0.4}, {Protocol::max_progress, {}}};
    InvariantTally tally;
    RunOptions options;
    options.observer = [&](const TrialContext& ctx, const TrialOutcome& out) { check_trial(tally, ctx, out); };
    run_experiment(c, options);

    bool ok = true;
    std::string detail;
    for (const auto& [name, count] : tally.checked) {
        const std::size_t bad = tally.violated[name];
        ok = ok && bad == 0 && count > 0;
        detail += name + " " + std::to_string(count - bad) + "/" + std::to_string(count) + "; ";
    }
    ok = ok && tally.checked.size() == 5;
    return {ok, detail};
}

// ---------------------------------------------------------------- 6

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism()
{
    ExperimentConfig c;
    c.topologies = 12;
    c.K_t1 = c.K_t2 = c.K_t3 = 4;
    c.seed = 99;
    c.sweeps = {{"dest_distance", {0.4, 0.8}}, {"mu", {0.2, 0.6}}};
    const auto root = std::filesystem::temp_directory_path() / "manetsim_acceptance";
    std::filesystem::remove_all(root);

    std::vector<std::string> outputs;
    for (std::size_t workers : {1, 4, 1, 4}) {
        c.workers = workers;
        const auto dir = root / std::to_string(outputs.size());
        emit_results(run_experiment(c), c, dir);
        outputs.push_back(read_file(dir / "sweep_dest_distance.csv") + read_file(dir / "sweep_mu.csv"));
    }
    std::filesystem::remove_all(root);
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs[0]; });
    return {same && outputs[0].size() > 100,
            same ? "4 runs (workers 1, 4, 1, 4) produced identical tables" : "tables differ between runs"};
}

} // namespace

int main(int argc, char** argv)
{
    bool strict = false;
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--strict") == 0) {
            strict = true;
        } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--strict] [--only <id>]\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {"1", "closed-form outage agrees with simulation", outage_vs_simulation},
        {"2", "analytic spot values", spot_values},
        {"3a", "greedy forwarding reliability jumps past r_t", greedy_jump},
        {"3b", "AODV is the least reliable protocol", aodv_least_reliable},
        {"3c", "AODV acknowledgement is weaker than MP", aodv_acknowledgement},
        {"3d", "spectral efficiency non-decreasing in G/h", spreading_monotone},
        {"3e", "retransmission gains saturate", retransmission_saturation},
        {"3f", "reliability falls with contention density", contention_direction},
        {"4", "metrics match an independent recomputation", metrics_identities},
        {"5", "structural invariants hold on every trial", structural_invariants},
        {"6", "results independent of run and worker count", determinism},
    };

    int unexpected = 0;
    int known = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && c.id != only) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool expected_failure = !v.pass && kKnownFailures.count(c.id) > 0;
        std::printf("%s %-3s %s: %s [%.1f s]%s\n", v.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                    v.detail.c_str(), seconds, expected_failure ? " (known failure)" : "");
        std::fflush(stdout);
        if (!v.pass) {
            (expected_failure ? known : unexpected) += 1;
        }
    }
    std::printf("%d unexpected failure(s), %d known failure(s)\n", unexpected, known);
    return unexpected > 0 || (strict && known > 0) ? 1 : 0;
}
