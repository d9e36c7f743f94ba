#pragma once

// Configuration and command implementations behind the qbm executable.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbm/outer.hpp"

namespace qbm::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Column-ordered CSV table. Cells are either numbers, text or NaN with a
/// reason code stored in the row's `reason` column.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string csv() const;
};

std::string num(double x);
std::string flag(bool b);

/// Strictly increasing grid: either an explicit array or
/// {"start", "stop", "n", "scale": "linear" | "log"}.
std::vector<double> parse_grid(const nlohmann::json& j, const char* what);

struct Config {
    nlohmann::json raw;
    PhysParams params;
    std::uint64_t seed = 1;
    std::string propagator;  ///< empty: the command default
    bool inner_lambda = false;
    double tol_phys = 1e-10;
    int fock_dim = 40;
    int jobs = 1;
    std::string out = "qbm-out";

    LambdaSource lambda_source() const {
        return inner_lambda ? LambdaSource::Inner : LambdaSource::Full;
    }
    double dt() const;
    GaussianState state() const;
    std::vector<double> time_grid(const char* section, double default_stop, int default_n) const;
    nlohmann::json section(const char* name) const;
};

/// Defaults merged with the document; unknown keys anywhere are errors.
nlohmann::json default_config();
Config load_config(const nlohmann::json& doc);

/// `path=value` with a dotted path; the value is parsed as JSON when possible.
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct Output {
    std::map<std::string, std::string> files;  ///< name -> content
    std::string summary;
    int exit_code = 0;
};

Output cmd_evolve(const Config& cfg);
Output cmd_region_map(const Config& cfg);
Output cmd_verify(const Config& cfg);
Output cmd_entropy_curve(const Config& cfg);
Output cmd_violation_demo(const Config& cfg);
Output cmd_sweep(const Config& cfg);

/// Runs `n` indexed jobs on `jobs` threads; results keep index order.
std::vector<std::vector<std::string>> run_pool(int n, int jobs,
                                               const std::function<std::vector<std::string>(int)>& f);

}  // namespace qbm::cli
