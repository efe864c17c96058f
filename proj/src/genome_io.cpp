#include "isingevo/genome_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace isingevo {

using nlohmann::json;

json genome_to_json(const IsingGenome& genome) {
  std::string classes;
  for (auto c : genome.topology.classes()) classes.push_back(to_char(c));
  const auto mask = genome.topology.mask();
  json j;
  j["schema"] = kGenomeSchema;
  j["version"] = kGenomeSchemaVersion;
  j["N"] = genome.size();
  j["classes"] = classes;
  j["mask"] = std::vector<int>(mask.begin(), mask.end());
  j["A"] = std::vector<int>(genome.adjacency.begin(), genome.adjacency.end());
  j["J"] = genome.weights;
  j["beta"] = genome.beta;
  return j;
}

namespace {

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(fmt::format("genome record lacks field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("genome field '{}': {}", key, e.what()));
  }
}

std::vector<std::uint8_t> to_bits(const std::vector<int>& v, const char* what) {
  std::vector<std::uint8_t> out;
  out.reserve(v.size());
  for (int x : v) {
    if (x != 0 && x != 1) throw FormatError(fmt::format("'{}' entries must be 0 or 1", what));
    out.push_back(static_cast<std::uint8_t>(x));
  }
  return out;
}

}  // namespace

IsingGenome genome_from_json(const json& j) {
  if (require<std::string>(j, "schema") != kGenomeSchema) {
    throw FormatError("not a genome record");
  }
  if (const int v = require<int>(j, "version"); v != kGenomeSchemaVersion) {
    throw FormatError(fmt::format("unsupported genome schema version {}", v));
  }
  const auto n = require<std::size_t>(j, "N");
  const auto classes_text = require<std::string>(j, "classes");
  if (classes_text.size() != n) throw FormatError("'classes' length does not match N");
  std::vector<NeuronClass> classes;
  for (char c : classes_text) {
    try {
      classes.push_back(neuron_class_from_char(c));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  auto mask = to_bits(require<std::vector<int>>(j, "mask"), "mask");
  auto adjacency = to_bits(require<std::vector<int>>(j, "A"), "A");
  auto weights = require<std::vector<double>>(j, "J");
  if (mask.size() != n * n || adjacency.size() != n * n || weights.size() != n * n) {
    throw FormatError("matrix fields must have N*N entries");
  }
  try {
    IsingGenome g{Topology(std::move(classes), std::move(mask)), std::move(adjacency),
                  std::move(weights), require<double>(j, "beta")};
    g.validate();
    return g;
  } catch (const std::invalid_argument& e) {
    throw FormatError(fmt::format("invalid genome: {}", e.what()));
  }
}

std::string dump_genome(const IsingGenome& genome) { return genome_to_json(genome).dump(); }

IsingGenome parse_genome(const std::string& text) {
  try {
    return genome_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw FormatError(e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace isingevo
