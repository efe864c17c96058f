#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isingevo/ising.hpp"

namespace isingevo {

inline constexpr int kGenomeSchemaVersion = 1;
inline constexpr const char* kGenomeSchema = "isingevo.genome";
inline constexpr const char* kPopulationSchema = "isingevo.population";

/// {schema, version, N, classes, mask, A, J, beta}; matrices are flat
/// row-major arrays. Doubles are written with round-trip precision.
nlohmann::json genome_to_json(const IsingGenome& genome);
/// Rejects unknown schema/version and validates the decoded genome.
IsingGenome genome_from_json(const nlohmann::json& j);

std::string dump_genome(const IsingGenome& genome);
IsingGenome parse_genome(const std::string& text);

/// Thrown for unreadable or schema-incompatible files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes atomically (temp file + rename).
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace isingevo
