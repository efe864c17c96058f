#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "isingevo/csv.hpp"
#include "isingevo/genome_io.hpp"
#include "isingevo/stats.hpp"

using namespace isingevo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("isingevo_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("genome JSON round trip is exact") {
  Rng rng(1);
  const auto g = random_genome(Topology::layered(4, 20, 4), 0.123456789, 0.5, 2.0, rng);
  const auto text = dump_genome(g);
  CHECK(parse_genome(text) == g);
  const auto j = genome_to_json(g);
  CHECK(j["schema"] == "isingevo.genome");
  CHECK(j["N"] == 28);
  CHECK(j["classes"].get<std::string>().substr(0, 5) == "SSSSH");
}

TEST_CASE("genome JSON rejects bad input") {
  Rng rng(2);
  const auto g = random_genome(Topology::layered(4, 4, 4), 1.0, 0.5, 1.0, rng);
  auto j = genome_to_json(g);
  j["version"] = 99;
  CHECK_THROWS_AS(genome_from_json(j), FormatError);
  j = genome_to_json(g);
  j["J"][1] = 3.0;
  CHECK_THROWS(genome_from_json(j));
  j = genome_to_json(g);
  j["A"] = nlohmann::json::array();
  CHECK_THROWS(genome_from_json(j));
  CHECK_THROWS(parse_genome("not json"));
}

TEST_CASE("json files are written atomically and read back") {
  const auto dir = scratch_dir("json");
  const nlohmann::json j{{"a", 1.5}, {"b", {1, 2, 3}}};
  write_json_file(dir / "sub" / "x.json", j);
  CHECK(read_json_file(dir / "sub" / "x.json") == j);
  CHECK_FALSE(fs::exists(dir / "sub" / "x.json.tmp"));
  CHECK_THROWS(read_json_file(dir / "missing.json"));
}

TEST_CASE("csv writer and reader") {
  const auto dir = scratch_dir("csv");
  {
    CsvWriter w(dir / "t.csv", {"generation", "name", "value"});
    w.row(0, "copy", 0.1);
    w.row(1, std::string("mate"), 1.0 / 3.0);
    CHECK_THROWS(w.row(1, 2));
    CHECK_THROWS(w.row(1, "a,b", 2.0));
  }
  std::ifstream in(dir / "t.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first == "#schema=v1");
  const auto t = read_csv(dir / "t.csv");
  CHECK(t.schema_version == 1);
  CHECK(t.columns == std::vector<std::string>{"generation", "name", "value"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][2] == "0.1");
  CHECK(std::stod(t.rows[1][2]) == 1.0 / 3.0);
  CHECK(t.column("value") == 2);
  CHECK_THROWS(t.column("nope"));
  CHECK_THROWS(read_csv(dir / "t.csv", 2));

  std::ofstream bad(dir / "bad.csv");
  bad << "a,b\n1,2\n";
  bad.close();
  CHECK_THROWS(read_csv(dir / "bad.csv"));
}

TEST_CASE("statistics helpers") {
  const std::vector<double> x{4.0, 1.0, 3.0, 2.0};
  CHECK(mean(x) == 2.5);
  CHECK(variance(x) == 1.25);
  CHECK(median(x) == 2.5);
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 4.0);
  CHECK(quantile(x, 0.25) == doctest::Approx(1.75));
  const auto s = summarize(x);
  CHECK(s.best == 4.0);
  CHECK(s.median == 2.5);
  CHECK(descending_order(std::vector<double>{1, 3, 3, 2}) == std::vector<std::size_t>{1, 2, 3, 0});
  CHECK_THROWS(mean(std::vector<double>{}));
  CHECK_THROWS(summarize(std::vector<double>{}));
}

TEST_CASE("seed tree") {
  const SeedTree root(5);
  CHECK(root.child(1).value() == SeedTree(5).child(1).value());
  CHECK(root.child(1).value() != root.child(2).value());
  CHECK(root.path(1, 2).value() == root.child(1).child(2).value());
  CHECK(root.path(1, 2).value() != root.path(2, 1).value());
  Rng a = root.child(3).rng();
  Rng b = root.child(3).rng();
  CHECK(a.uniform() == b.uniform());
}
