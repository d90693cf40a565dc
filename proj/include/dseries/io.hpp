#pragma once

#include "dseries/counting.hpp"
#include "dseries/oracle.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace dseries {

// A function assembled from a JSON config. `series` is set when the top level
// is an exponential sum (directly or via a catalog entry carrying one).
struct FunctionSpec {
    MeromorphicOracle oracle;
    std::optional<ExponentialSum> series;
    std::string name;
    nlohmann::json echo;
};

Complex parse_complex(const nlohmann::json& j);
Target parse_target(const std::string& text); // "inf" selects poles
std::vector<double> parse_grid(const std::string& text); // "a:b:n", "a:b:nlog", "x,y,z", "x"

FunctionSpec parse_function_json(const nlohmann::json& j);
FunctionSpec parse_function_file(const std::string& path);
std::vector<Complex> parse_points_file(const std::string& path);

nlohmann::json complex_json(Complex z);
nlohmann::json records_json(const LocateResult& loc);
nlohmann::json tolerances_json(); // every numeric tolerance that shapes results

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

nlohmann::json make_manifest(const std::string& subcommand, const nlohmann::json& config,
                             unsigned long long seed, int threads);
// stamps wall time and the output list, then writes the manifest to `path`
void write_manifest(nlohmann::json manifest, double wall_ms,
                    const std::vector<std::string>& outputs, const std::string& path);

} // namespace dseries
