#pragma once

#include "burgers/field.hpp"
#include "burgers/lattice.hpp"
#include "burgers/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cli {

// Malformed or out-of-range configuration; exits with status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Typed, range-checked access to a TOML document by dotted key.
class Config {
public:
    static Config load(const std::filesystem::path& path);
    static Config parse(std::string_view text, std::string source = "<string>");

    Config(Config&&) noexcept;
    Config& operator=(Config&&) noexcept;
    ~Config();

    bool has(std::string_view key) const;

    long long integer(std::string_view key, long long lo, long long hi) const;
    long long integer(std::string_view key, long long lo, long long hi, long long fallback) const;
    double real(std::string_view key, double lo, double hi) const;
    double real(std::string_view key, double lo, double hi, double fallback) const;
    bool boolean(std::string_view key, bool fallback) const;
    std::string choice(std::string_view key, const std::vector<std::string>& allowed, std::string fallback) const;
    std::vector<double> reals(std::string_view key, double lo, double hi, std::size_t min_size = 1,
                              std::size_t max_size = std::numeric_limits<std::size_t>::max()) const;
    std::vector<long long> integers(std::string_view key, long long lo, long long hi, std::size_t min_size = 1,
                                    std::size_t max_size = std::numeric_limits<std::size_t>::max()) const;

    std::string to_json() const;
    const std::string& source() const { return source_; }

private:
    struct Impl;
    explicit Config(std::unique_ptr<Impl> impl, std::string source);

    std::unique_ptr<Impl> impl_;
    std::string source_;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::size_t budget_mb = 4096;
};

// Resolved process-wide settings: flags win over the environment, which wins
// over the config file.
struct RunSettings {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t budget_mb = 4096;

    // Largest basis dimension whose dense complex square fits the memory budget.
    std::size_t dense_budget() const;
    // Sparse kernel entries that fit the memory budget.
    std::size_t sparse_budget() const;
};

RunSettings resolve_settings(const Config& config, const Overrides& overrides);

// [lattice] d, M, norm
burgers::LatticePtr read_lattice(const Config& config, std::optional<double> cutoff = std::nullopt);
// [nonlinearity] w, coupling (defaults to the weak-coupling value)
burgers::NonlinearitySpec read_spec(const Config& config, const burgers::ModeLattice& lattice);
std::vector<double> read_w(const Config& config, int dim);
// [run] dt, horizon, replicas, scheme
burgers::SimConfig read_sim(const Config& config, const RunSettings& settings);
burgers::Mode read_mode(const Config& config, std::string_view key, int dim);

}  // namespace cli
