#include "run_config.hpp"

#include <toml.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace cli {

struct Config::Impl {
    toml::table table;
};

namespace {

std::string range_text(double lo, double hi) {
    std::ostringstream os;
    os << "[" << lo << ", " << hi << "]";
    return os.str();
}

[[noreturn]] void missing(std::string_view key, std::string_view expected) {
    throw ConfigError("missing required key '" + std::string(key) + "' (" + std::string(expected) + ")");
}

[[noreturn]] void bad_type(std::string_view key, std::string_view expected) {
    throw ConfigError("key '" + std::string(key) + "' must be " + std::string(expected));
}

std::optional<double> as_real(const toml::node& n) {
    if (auto v = n.value_exact<double>()) return *v;
    if (auto v = n.value_exact<int64_t>()) return static_cast<double>(*v);
    return std::nullopt;
}

double check_real(std::string_view key, double x, double lo, double hi) {
    if (!std::isfinite(x) || x < lo || x > hi)
        throw ConfigError("key '" + std::string(key) + "' = " + std::to_string(x) + " is outside the accepted range " +
                          range_text(lo, hi));
    return x;
}

long long check_int(std::string_view key, long long x, long long lo, long long hi) {
    if (x < lo || x > hi)
        throw ConfigError("key '" + std::string(key) + "' = " + std::to_string(x) + " is outside the accepted range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

}  // namespace

Config::Config(std::unique_ptr<Impl> impl, std::string source) : impl_(std::move(impl)), source_(std::move(source)) {}
Config::Config(Config&&) noexcept = default;
Config& Config::operator=(Config&&) noexcept = default;
Config::~Config() = default;

Config Config::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    try {
        return Config(std::make_unique<Impl>(Impl{toml::parse_file(path.string())}), path.string());
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << path.string() << ":" << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
}

Config Config::parse(std::string_view text, std::string source) {
    try {
        return Config(std::make_unique<Impl>(Impl{toml::parse(text)}), std::move(source));
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }
}

bool Config::has(std::string_view key) const { return static_cast<bool>(impl_->table.at_path(key)); }

long long Config::integer(std::string_view key, long long lo, long long hi) const {
    const auto node = impl_->table.at_path(key);
    if (!node) missing(key, "integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const auto v = node.value_exact<int64_t>();
    if (!v) bad_type(key, "an integer");
    return check_int(key, *v, lo, hi);
}

long long Config::integer(std::string_view key, long long lo, long long hi, long long fallback) const {
    return has(key) ? integer(key, lo, hi) : fallback;
}

double Config::real(std::string_view key, double lo, double hi) const {
    const auto node = impl_->table.at_path(key);
    if (!node) missing(key, "number in " + range_text(lo, hi));
    const auto v = as_real(*node.node());
    if (!v) bad_type(key, "a number");
    return check_real(key, *v, lo, hi);
}

double Config::real(std::string_view key, double lo, double hi, double fallback) const {
    return has(key) ? real(key, lo, hi) : fallback;
}

bool Config::boolean(std::string_view key, bool fallback) const {
    const auto node = impl_->table.at_path(key);
    if (!node) return fallback;
    const auto v = node.value_exact<bool>();
    if (!v) bad_type(key, "true or false");
    return *v;
}

std::string Config::choice(std::string_view key, const std::vector<std::string>& allowed, std::string fallback) const {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    const auto node = impl_->table.at_path(key);
    if (!node) return fallback;
    const auto v = node.value_exact<std::string>();
    if (!v) bad_type(key, "one of {" + list + "}");
    for (const auto& a : allowed)
        if (*v == a) return a;
    throw ConfigError("key '" + std::string(key) + "' = \"" + *v + "\" is not one of {" + list + "}");
}

std::vector<double> Config::reals(std::string_view key, double lo, double hi, std::size_t min_size,
                                  std::size_t max_size) const {
    const auto node = impl_->table.at_path(key);
    const std::string expected = "array of numbers in " + range_text(lo, hi);
    if (!node) missing(key, expected);
    const auto* arr = node.as_array();
    if (!arr) bad_type(key, "an " + expected);
    if (arr->size() < min_size || arr->size() > max_size)
        throw ConfigError("key '" + std::string(key) + "' has " + std::to_string(arr->size()) +
                          " entries, expected " + std::to_string(min_size) +
                          (min_size == max_size ? "" : " or more"));
    std::vector<double> out;
    for (const auto& el : *arr) {
        const auto v = as_real(el);
        if (!v) bad_type(key, "an " + expected);
        out.push_back(check_real(key, *v, lo, hi));
    }
    return out;
}

std::vector<long long> Config::integers(std::string_view key, long long lo, long long hi, std::size_t min_size,
                                        std::size_t max_size) const {
    const auto node = impl_->table.at_path(key);
    const std::string expected = "array of integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    if (!node) missing(key, expected);
    const auto* arr = node.as_array();
    if (!arr) bad_type(key, "an " + expected);
    if (arr->size() < min_size || arr->size() > max_size)
        throw ConfigError("key '" + std::string(key) + "' has " + std::to_string(arr->size()) +
                          " entries, expected " + std::to_string(min_size) +
                          (min_size == max_size ? "" : " or more"));
    std::vector<long long> out;
    for (const auto& el : *arr) {
        const auto v = el.value_exact<int64_t>();
        if (!v) bad_type(key, "an " + expected);
        out.push_back(check_int(key, *v, lo, hi));
    }
    return out;
}

std::string Config::to_json() const {
    std::ostringstream os;
    os << toml::json_formatter{impl_->table};
    return os.str();
}

std::size_t RunSettings::dense_budget() const {
    const double bytes = static_cast<double>(budget_mb) * 1024.0 * 1024.0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(bytes / 16.0)));
}

std::size_t RunSettings::sparse_budget() const {
    return std::max<std::size_t>(1, budget_mb * 1024 * 1024 / 800);
}

RunSettings resolve_settings(const Config& config, const Overrides& overrides) {
    RunSettings s;
    s.budget_mb = overrides.budget_mb;
    if (s.budget_mb == 0) throw ConfigError("--budget-mb must be positive");
    s.seed = overrides.seed ? *overrides.seed
                            : static_cast<std::uint64_t>(config.integer("run.seed", 0, std::numeric_limits<int64_t>::max(), 0));
    if (overrides.threads) {
        s.threads = *overrides.threads;
    } else if (const char* env = std::getenv("BURGERS_CHAOS_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 1024)
            throw ConfigError("BURGERS_CHAOS_THREADS = \"" + std::string(env) + "\" is not an integer in [1, 1024]");
        s.threads = static_cast<unsigned>(v);
    } else {
        s.threads = static_cast<unsigned>(config.integer("run.threads", 1, 1024, 1));
    }
    if (s.threads == 0) throw ConfigError("--threads must be at least 1");
    return s;
}

burgers::LatticePtr read_lattice(const Config& config, std::optional<double> cutoff) {
    const int d = static_cast<int>(config.integer("lattice.d", 2, 4));
    const double M = cutoff ? *cutoff : config.real("lattice.M", 1.0, 1e6);
    const std::string norm =
        config.choice("lattice.norm", {"euclidean", "sup"}, burgers::to_string(burgers::default_norm(d)));
    return burgers::make_lattice(d, M, burgers::parse_norm_kind(norm));
}

std::vector<double> read_w(const Config& config, int dim) {
    const auto d = static_cast<std::size_t>(dim);
    return config.reals("nonlinearity.w", -1e6, 1e6, d, d);
}

burgers::NonlinearitySpec read_spec(const Config& config, const burgers::ModeLattice& lattice) {
    auto spec = burgers::weak_coupling(lattice, read_w(config, lattice.dim()));
    spec.coupling = config.real("nonlinearity.coupling", 0.0, 1e6, spec.coupling);
    return spec;
}

burgers::SimConfig read_sim(const Config& config, const RunSettings& settings) {
    auto lat = read_lattice(config);
    const auto spec = read_spec(config, *lat);
    burgers::SimConfig sim{lat, spec};
    sim.dt = config.real("run.dt", 1e-9, 1.0, burgers::SimConfig::default_dt(lat->cutoff()));
    sim.horizon = config.real("run.horizon", 0.0, 1e9);
    sim.replicas = static_cast<std::size_t>(config.integer("run.replicas", 1, 100'000'000, 1));
    sim.seed = settings.seed;
    sim.threads = settings.threads;
    sim.scheme = burgers::parse_scheme(
        config.choice("run.scheme", {"exponential_heun", "exponential_euler"}, "exponential_heun"));
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[run]: ") + e.what());
    }
    return sim;
}

burgers::Mode read_mode(const Config& config, std::string_view key, int dim) {
    const auto v = config.integers(key, -1'000'000, 1'000'000, static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
    std::vector<int> c(v.begin(), v.end());
    return burgers::Mode(std::span<const int>(c));
}

}  // namespace cli
