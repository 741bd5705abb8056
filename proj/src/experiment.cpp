#include "manetsim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "manetsim/errors.hpp"

namespace manet {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char delimiter)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(delimiter, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why)
{
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": "
                      + std::string(why));
}

double parse_number(std::string_view key, std::string_view text)
{
    text = trim(text);
    double scale = 1.0;
    const std::string_view pi_suffix = "/pi";
    if (text.size() > pi_suffix.size() && lower(text.substr(text.size() - pi_suffix.size())) == pi_suffix) {
        scale = 1.0 / std::numbers::pi;
        text = trim(text.substr(0, text.size() - pi_suffix.size()));
    }
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        bad_value(key, text, "expected a number");
    }
    return value * scale;
}

std::size_t as_count(std::string_view key, double value)
{
    if (!(value >= 0.0) || value != std::floor(value) || value > 1e15) {
        bad_value(key, format_number(value), "expected a non-negative integer");
    }
    return static_cast<std::size_t>(value);
}

struct NumericField {
    std::string_view name;
    void (*set)(ExperimentConfig&, double);
    std::optional<double> (*get)(const ExperimentConfig&);
};

#define MANET_DOUBLE_FIELD(field)                                                                                  \
    NumericField                                                                                                   \
    {                                                                                                              \
        #field, [](ExperimentConfig& c, double v) { c.field = v; },                                                \
            [](const ExperimentConfig& c) -> std::optional<double> { return c.field; }                            \
    }
#define MANET_COUNT_FIELD(field)                                                                                   \
    NumericField                                                                                                   \
    {                                                                                                              \
        #field, [](ExperimentConfig& c, double v) { c.field = as_count(#field, v); },                              \
            [](const ExperimentConfig& c) -> std::optional<double> { return static_cast<double>(c.field); }        \
    }
#define MANET_OPTIONAL_FIELD(field)                                                                                \
    NumericField                                                                                                   \
    {                                                                                                              \
        #field, [](ExperimentConfig& c, double v) { c.field = v; },                                                \
            [](const ExperimentConfig& c) { return c.field; }                                                      \
    }

const std::vector<NumericField>& numeric_fields()
{
    static const std::vector<NumericField> fields{
        MANET_DOUBLE_FIELD(alpha),
        MANET_DOUBLE_FIELD(sigma_s_db),
        MANET_DOUBLE_FIELD(r_f),
        MANET_DOUBLE_FIELD(G_over_h),
        MANET_DOUBLE_FIELD(gamma_db),
        MANET_DOUBLE_FIELD(beta_db),
        MANET_COUNT_FIELD(M),
        MANET_DOUBLE_FIELD(r_net),
        MANET_DOUBLE_FIELD(r_ex),
        MANET_DOUBLE_FIELD(dest_distance),
        MANET_DOUBLE_FIELD(mu),
        MANET_DOUBLE_FIELD(p),
        MANET_OPTIONAL_FIELD(relay_density),
        MANET_OPTIONAL_FIELD(contention_density),
        NumericField{"B",
                     [](ExperimentConfig& c, double v) {
                         const auto n = as_count("B", v);
                         if (n > 1000000) {
                             bad_value("B", format_number(v), "too large");
                         }
                         c.B = static_cast<int>(n);
                     },
                     [](const ExperimentConfig& c) -> std::optional<double> { return c.B; }},
        MANET_DOUBLE_FIELD(r_t),
        MANET_DOUBLE_FIELD(r_g),
        MANET_DOUBLE_FIELD(T),
        MANET_DOUBLE_FIELD(T_e),
        MANET_DOUBLE_FIELD(T_d),
        MANET_COUNT_FIELD(max_hops),
        MANET_COUNT_FIELD(topologies),
        MANET_COUNT_FIELD(K_t1),
        MANET_COUNT_FIELD(K_t2),
        MANET_COUNT_FIELD(K_t3),
        MANET_COUNT_FIELD(workers),
    };
    return fields;
}

#undef MANET_DOUBLE_FIELD
#undef MANET_COUNT_FIELD
#undef MANET_OPTIONAL_FIELD

const NumericField* find_field(std::string_view key)
{
    for (const auto& f : numeric_fields()) {
        if (f.name == key) {
            return &f;
        }
    }
    return nullptr;
}

void require(bool ok, std::string_view key, double value, std::string_view rule)
{
    if (!ok) {
        bad_value(key, format_number(value), rule);
    }
}

void check_fields(const ExperimentConfig& c)
{
    require(c.alpha >= 2.0, "alpha", c.alpha, "must be >= 2");
    require(c.sigma_s_db >= 0.0, "sigma_s_db", c.sigma_s_db, "must be >= 0");
    require(c.r_f >= 0.0, "r_f", c.r_f, "must be >= 0");
    require(c.G_over_h >= 1.0, "G_over_h", c.G_over_h, "must be >= 1");
    require(std::isfinite(c.gamma_db), "gamma_db", c.gamma_db, "must be finite");
    require(std::isfinite(c.beta_db), "beta_db", c.beta_db, "must be finite");
    require(c.r_net > 0.0, "r_net", c.r_net, "must be positive");
    require(c.r_ex >= 0.0 && std::isfinite(c.r_ex), "r_ex", c.r_ex, "must be finite and >= 0");
    require(c.dest_distance > 0.0 && c.dest_distance <= c.r_net, "dest_distance", c.dest_distance,
            "must satisfy 0 < dest_distance <= r_net");
    require(c.mu >= 0.0 && c.mu <= 1.0, "mu", c.mu, "must lie in [0, 1]");
    require(c.p >= 0.0 && c.p <= 1.0, "p", c.p, "must lie in [0, 1]");
    require(c.B >= 1, "B", c.B, "must be >= 1");
    require(c.r_t > 0.0, "r_t", c.r_t, "must be positive");
    require(c.r_g >= 0.0, "r_g", c.r_g, "must be >= 0");
    require(c.T > 0.0, "T", c.T, "must be positive");
    require(c.T_e >= 0.0, "T_e", c.T_e, "must be >= 0");
    require(c.T_d >= 0.0, "T_d", c.T_d, "must be >= 0");
    require(c.max_hops >= 1, "max_hops", static_cast<double>(c.max_hops), "must be >= 1");
    require(c.topologies >= 1, "topologies", static_cast<double>(c.topologies), "must be >= 1");
    require(c.K_t1 >= 1, "K_t1", static_cast<double>(c.K_t1), "must be >= 1");
    require(c.K_t2 >= 1, "K_t2", static_cast<double>(c.K_t2), "must be >= 1");
    require(c.K_t3 >= 1, "K_t3", static_cast<double>(c.K_t3), "must be >= 1");
    if (c.protocols.empty()) {
        throw ConfigError("protocols: at least one protocol is required");
    }
    for (const auto& choice : c.protocols) {
        if (choice.r_t && !(*choice.r_t > 0.0)) {
            bad_value("protocols", format_protocol(choice), "transmission range must be positive");
        }
    }
}

} // namespace

std::string format_number(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

ProtocolChoice parse_protocol(std::string_view text)
{
    const auto parts = split(text, ':');
    const auto name = lower(parts[0]);
    ProtocolChoice choice;
    if (name == "aodv") {
        choice.protocol = Protocol::aodv;
    } else if (name == "gf" || name == "greedy") {
        choice.protocol = Protocol::greedy;
    } else if (name == "mp" || name == "max_progress") {
        choice.protocol = Protocol::max_progress;
    } else {
        bad_value("protocols", text, "expected AODV, GF, GF:<r_t> or MP");
    }
    if (parts.size() > 2 || (parts.size() == 2 && choice.protocol != Protocol::greedy)) {
        bad_value("protocols", text, "only GF takes a transmission range");
    }
    if (parts.size() == 2) {
        choice.r_t = parse_number("protocols", parts[1]);
    }
    return choice;
}

std::string format_protocol(const ProtocolChoice& choice)
{
    auto name = to_string(choice.protocol);
    if (choice.r_t) {
        name += ":" + format_number(*choice.r_t);
    }
    return name;
}

std::vector<std::string> sweep_variables()
{
    std::vector<std::string> names;
    for (const auto& f : numeric_fields()) {
        if (f.name != "workers") {
            names.emplace_back(f.name);
        }
    }
    return names;
}

void set_numeric(ExperimentConfig& config, std::string_view key, double value)
{
    const auto* field = find_field(key);
    if (field == nullptr) {
        throw ConfigError("unknown numeric parameter '" + std::string(key) + "'");
    }
    field->set(config, value);
}

Sweep parse_sweep(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        bad_value("sweep", text, "expected var=v1,v2,...");
    }
    Sweep sweep;
    sweep.variable = std::string(trim(text.substr(0, eq)));
    const auto names = sweep_variables();
    if (std::find(names.begin(), names.end(), sweep.variable) == names.end()) {
        bad_value("sweep", text, "unknown sweep variable '" + sweep.variable + "'");
    }
    for (auto item : split(text.substr(eq + 1), ',')) {
        if (!item.empty()) {
            sweep.values.push_back(parse_number("sweep", item));
        }
    }
    if (sweep.values.empty()) {
        bad_value("sweep", text, "sweep list is empty");
    }
    return sweep;
}

void set_value(ExperimentConfig& config, std::string_view key, std::string_view value)
{
    key = trim(key);
    value = trim(value);
    if (key == "protocols" || key == "protocol") {
        config.protocols.clear();
        for (auto item : split(value, ',')) {
            if (!item.empty()) {
                config.protocols.push_back(parse_protocol(item));
            }
        }
        if (config.protocols.empty()) {
            bad_value(key, value, "at least one protocol is required");
        }
    } else if (key == "seed") {
        std::uint64_t seed = 0;
        const auto* end = value.data() + value.size();
        const auto [ptr, ec] = std::from_chars(value.data(), end, seed);
        if (ec != std::errc() || ptr != end || value.empty()) {
            bad_value(key, value, "expected an unsigned 64-bit integer");
        }
        config.seed = seed;
    } else if (key == "out") {
        config.out = std::string(value);
    } else if (key == "topology_file") {
        config.topology_file = std::string(value);
    } else if (key == "sweep") {
        config.sweeps.push_back(parse_sweep(value));
    } else if (key == "trials_per_layer") {
        const auto n = as_count(key, parse_number(key, value));
        config.K_t1 = config.K_t2 = config.K_t3 = n;
    } else if (const auto* field = find_field(key)) {
        field->set(config, parse_number(key, value));
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig config;
    bool sweeps_reset = false;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        const auto hash = raw.find('#');
        const auto line = trim(raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (key == "sweep" && !sweeps_reset) {
            config.sweeps.clear();
            sweeps_reset = true;
        }
        try {
            set_value(config, key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string format_config(const ExperimentConfig& config)
{
    std::ostringstream out;
    for (const auto& f : numeric_fields()) {
        if (const auto v = f.get(config)) {
            out << f.name << " = " << format_number(*v) << '\n';
        }
    }
    out << "protocols = ";
    for (std::size_t i = 0; i < config.protocols.size(); ++i) {
        out << (i ? "," : "") << format_protocol(config.protocols[i]);
    }
    out << '\n';
    out << "seed = " << config.seed << '\n';
    out << "out = " << config.out << '\n';
    if (!config.topology_file.empty()) {
        out << "topology_file = " << config.topology_file << '\n';
    }
    for (const auto& sweep : config.sweeps) {
        out << "sweep = " << sweep.variable << '=';
        for (std::size_t i = 0; i < sweep.values.size(); ++i) {
            out << (i ? "," : "") << format_number(sweep.values[i]);
        }
        out << '\n';
    }
    return out.str();
}

ExperimentConfig resolve(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    const double lambda = transmitter_density(c.M, c.r_net);
    if (c.relay_density) {
        require(*c.relay_density >= 0.0, "relay_density", *c.relay_density, "must be >= 0");
        c.mu = *c.relay_density / lambda;
        require(c.mu <= 1.0, "relay_density", *c.relay_density, "exceeds the transmitter density");
    }
    if (c.contention_density) {
        require(*c.contention_density >= 0.0, "contention_density", *c.contention_density, "must be >= 0");
        require(c.mu < 1.0, "contention_density", *c.contention_density, "needs mu < 1");
        c.p = *c.contention_density / (lambda * (1.0 - c.mu));
        require(c.p <= 1.0, "contention_density", *c.contention_density, "requires p > 1");
    }
    check_fields(c);
    for (const auto& sweep : c.sweeps) {
        if (!c.topology_file.empty() && (sweep.variable == "dest_distance" || sweep.variable == "M"
                                         || sweep.variable == "r_net" || sweep.variable == "r_ex")) {
            throw ConfigError("sweep: " + sweep.variable + " cannot vary with a fixed topology_file");
        }
    }
    return c;
}

Scenario make_scenario(const ExperimentConfig& config)
{
    const auto c = resolve(config);
    Scenario s;
    s.placement.mobiles = c.M;
    s.placement.r_net = c.r_net;
    s.placement.r_ex = c.r_ex;
    s.placement.dest_distance = c.dest_distance;
    s.channel.alpha = c.alpha;
    s.channel.sigma_s_db = c.sigma_s_db;
    s.channel.r_f = c.r_f;
    s.channel.G_over_h = c.G_over_h;
    s.channel.gamma = db_to_linear(c.gamma_db);
    s.channel.beta = db_to_linear(c.beta_db);
    s.mu = c.mu;
    s.p = c.p;
    s.max_hops = c.max_hops;
    s.layers = {c.topologies, c.K_t1, c.K_t2, c.K_t3};
    s.seed = c.seed;
    if (!c.topology_file.empty()) {
        std::ifstream in(c.topology_file);
        if (!in) {
            throw ConfigError("topology_file: cannot read " + c.topology_file);
        }
        try {
            s.fixed_topology = read_topology(in);
        } catch (const ArgumentError& e) {
            throw ConfigError("topology_file: " + std::string(e.what()));
        }
        s.placement.mobiles = s.fixed_topology->mobile_count();
        s.placement.r_net = s.fixed_topology->r_net();
        s.placement.r_ex = s.fixed_topology->r_ex();
        s.placement.dest_distance = s.fixed_topology->to_destination(0);
    }
    return s;
}

std::vector<ProtocolConfig> make_protocols(const ExperimentConfig& config)
{
    std::vector<ProtocolConfig> out;
    for (const auto& choice : config.protocols) {
        ProtocolConfig p;
        p.protocol = choice.protocol;
        p.B = config.B;
        p.r_t = choice.r_t.value_or(config.r_t);
        p.r_g = config.r_g;
        p.T = config.T;
        p.T_e = config.T_e;
        p.T_d = config.T_d;
        out.push_back(p);
    }
    return out;
}

std::vector<ResultTable> run_experiment(const ExperimentConfig& config, const RunOptions& options)
{
    std::vector<Sweep> sweeps = config.sweeps;
    if (sweeps.empty()) {
        sweeps.push_back({"dest_distance", {config.dest_distance}});
    }
    // Validate the whole grid before spending time on any point.
    for (const auto& sweep : sweeps) {
        for (double v : sweep.values) {
            ExperimentConfig point = config;
            set_numeric(point, sweep.variable, v);
            resolve(point);
        }
    }

    std::vector<ResultTable> tables;
    bool stopped = false;
    for (const auto& sweep : sweeps) {
        ResultTable table;
        table.variable = sweep.variable;
        for (double v : sweep.values) {
            if (stopped) {
                table.interrupted = true;
                break;
            }
            ExperimentConfig point = config;
            set_numeric(point, sweep.variable, v);
            const auto resolved = resolve(point);
            const auto scenario = make_scenario(point);
            const auto protocols = make_protocols(resolved);
            if (options.log) {
                options.log("sweep " + sweep.variable + " = " + format_number(v));
            }
            SimulationOptions sim;
            sim.workers = resolved.workers;
            sim.stop = options.stop;
            sim.observer = options.observer;
            sim.progress = options.progress;
            const auto result = simulate(scenario, protocols, sim);
            if (result.completed_topologies == 0) {
                table.interrupted = true;
                stopped = true;
                break;
            }
            const auto dens = densities(scenario.lambda(), resolved.mu, resolved.p);
            for (std::size_t k = 0; k < protocols.size(); ++k) {
                ResultRow row;
                row.sweep_value = v;
                row.protocol = protocols[k].label();
                row.relay_density = dens.relay;
                row.contention_density = dens.contention;
                row.metrics = topological_averages(result.per_protocol[k]);
                table.rows.push_back(std::move(row));
            }
            if (result.interrupted) {
                table.interrupted = true;
                stopped = true;
            }
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

std::string format_table(const ResultTable& table)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("nan"); };
    std::ostringstream out;
    out << table.variable
        << ",protocol,topologies,reliability,reliability_se,delay,delay_se,hops,hops_se,ase,ase_se,"
           "request_reliability,ack_reliability,delivery_reliability,conditional_topologies,relay_density,"
           "contention_density\n";
    for (const auto& row : table.rows) {
        const auto& m = row.metrics;
        out << format_number(row.sweep_value) << ',' << row.protocol << ',' << m.topologies << ','
            << format_number(m.R) << ',' << format_number(m.R_se) << ',' << opt(m.D) << ',' << opt(m.D_se) << ','
            << opt(m.H) << ',' << opt(m.H_se) << ',' << format_number(m.A) << ',' << format_number(m.A_se) << ','
            << opt(m.request) << ',' << opt(m.acknowledgement) << ',' << opt(m.delivery) << ','
            << m.conditional_topologies << ',' << format_number(row.relay_density) << ','
            << format_number(row.contention_density) << '\n';
    }
    return out.str();
}

void emit_results(const std::vector<ResultTable>& tables, const ExperimentConfig& config,
                  const std::filesystem::path& directory)
{
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + directory.string() + ": " + ec.message());
    }
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        file << text;
        file.close();
        if (!file) {
            throw std::runtime_error("cannot write " + path.string());
        }
    };

    std::vector<std::string> used;
    bool interrupted = false;
    for (const auto& table : tables) {
        std::string name = "sweep_" + table.variable;
        std::string candidate = name;
        for (int suffix = 2; std::find(used.begin(), used.end(), candidate) != used.end(); ++suffix) {
            candidate = name + "_" + std::to_string(suffix);
        }
        used.push_back(candidate);
        write(directory / (candidate + ".csv"), format_table(table));
        interrupted = interrupted || table.interrupted;
    }

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream manifest;
    manifest << "# manetsim run manifest\n";
    manifest << "# generated " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    if (interrupted) {
        manifest << "# interrupted: tables hold the completed prefix of topologies only\n";
    }
    manifest << format_config(config);
    write(directory / "manifest.txt", manifest.str());
}

} // namespace manet
