#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "shrinkreg/errors.hpp"
#include "shrinkreg/panel.hpp"

using namespace shrinkreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("shrinkreg_panel_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& body) const {
    std::ofstream(path / name) << body;
    return path / name;
  }
};

Unit unit(std::string id, std::vector<double> xs, double y = 0.0) {
  Unit u;
  u.id = std::move(id);
  u.measurements = std::move(xs);
  u.outcome = y;
  return u;
}

}  // namespace

TEST_CASE("load_panel: two units, means by hand") {
  TempDir dir;
  auto m = dir.write("m.csv", "unit_id,x\na,0\na,2\nb,2\nb,4\n");
  auto o = dir.write("o.csv", "unit_id,y\na,1\nb,2\n");
  const PanelData p = load_panel(m, o);
  REQUIRE(p.size() == 2);
  CHECK(p[0].count() == 2);
  CHECK(p[1].count() == 2);
  const auto means = unit_means(p);
  CHECK(means[0] == 1.0);
  CHECK(means[1] == 3.0);
  CHECK(p.outcomes() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("load_panel: single unit is rejected") {
  TempDir dir;
  auto m = dir.write("m.csv", "unit_id,x\nu1,1\nu1,2\nu1,3\n");
  auto o = dir.write("o.csv", "unit_id,y\nu1,5.0\n");
  CHECK_THROWS_AS(load_panel(m, o), DataError);
}

TEST_CASE("load_panel: referential integrity") {
  TempDir dir;
  auto m = dir.write("m.csv", "unit_id,x\na,1\na,2\nb,2\n");
  SUBCASE("outcome without measurements") {
    auto o = dir.write("o.csv", "unit_id,y\na,1\nb,2\nc,3\n");
    CHECK_THROWS_WITH_AS(load_panel(m, o), doctest::Contains("unit without measurements"), DataError);
  }
  SUBCASE("measurements without outcome") {
    auto o = dir.write("o.csv", "unit_id,y\na,1\n");
    CHECK_THROWS_WITH_AS(load_panel(m, o), doctest::Contains("unit without outcome"), DataError);
  }
  SUBCASE("duplicate outcome row") {
    auto o = dir.write("o.csv", "unit_id,y\na,1\nb,2\na,3\n");
    CHECK_THROWS_WITH_AS(load_panel(m, o), doctest::Contains("duplicate unit_id"), DataError);
  }
  SUBCASE("missing unit id") {
    auto o = dir.write("o.csv", "unit_id,y\na,1\n,2\n");
    CHECK_THROWS_AS(load_panel(m, o), DataError);
  }
}

TEST_CASE("load_panel: malformed input") {
  TempDir dir;
  auto o = dir.write("o.csv", "unit_id,y\na,1\nb,2\n");
  CHECK_THROWS_WITH_AS(load_panel(dir.write("m.csv", "unit_id,x\na,1\nb,abc\n"), o),
                       doctest::Contains("non-numeric"), DataError);
  CHECK_THROWS_WITH_AS(load_panel(dir.write("m.csv", ""), o), doctest::Contains("empty file"), DataError);
  CHECK_THROWS_WITH_AS(load_panel(dir.write("m.csv", "unit_id,x\n"), o), doctest::Contains("empty file"),
                       DataError);
  CHECK_THROWS_AS(load_panel(dir.write("m.csv", "id,value\na,1\n"), o), DataError);
  CHECK_THROWS_AS(load_panel(dir.write("m.csv", "unit_id,x\na,1,2\n"), o), DataError);
  CHECK_THROWS_AS(load_panel(dir.write("m.csv", "unit_id,x\na,nan\nb,1\n"), o), DataError);
  CHECK_THROWS_AS(load_panel(dir.path / "missing.csv", o), DataError);
}

TEST_CASE("load_panel: cluster and controls columns") {
  TempDir dir;
  auto m = dir.write("m.csv", "unit_id,x\ns1,1\ns2,2\ns1,3\ns3,5\n");
  auto o = dir.write("o.csv", "unit_id,y,cluster,c1,c2\ns2,1.5,v1,0.1,1\ns1,2.5,v1,0.2,0\ns3,-1,v2,0.3,1\n");
  const PanelData p = load_panel(m, o);
  REQUIRE(p.size() == 3);
  // ordered by first appearance in the outcomes file
  CHECK(p[0].id == "s2");
  CHECK(p[1].id == "s1");
  CHECK(p[1].measurements == std::vector<double>{1.0, 3.0});
  CHECK(p.has_clusters());
  CHECK(p.cluster_labels() == std::vector<std::string>{"v1", "v1", "v2"});
  CHECK(p.num_controls() == 2);
  CHECK(p[2].controls == std::vector<double>{0.3, 1.0});

  auto bad = dir.write("o2.csv", "unit_id,y,x1\ns1,1,2\ns2,1,2\ns3,1,1\n");
  CHECK_THROWS_AS(load_panel(m, bad), DataError);
}

TEST_CASE("PanelData invariants") {
  CHECK_THROWS_AS(PanelData({unit("a", {1.0})}), DataError);
  CHECK_THROWS_AS(PanelData({unit("a", {1.0}), unit("a", {2.0})}), DataError);
  CHECK_THROWS_AS(PanelData({unit("a", {1.0}), unit("b", {})}), DataError);
  CHECK_THROWS_AS(PanelData({unit("a", {1.0}), unit("b", {INFINITY})}), DataError);
  CHECK_THROWS_AS(PanelData({unit("a", {1.0}), unit("b", {1.0}, NAN)}), DataError);
  Unit c = unit("c", {1.0});
  c.controls = {1.0};
  CHECK_THROWS_AS(PanelData({unit("a", {1.0}), c}), DataError);
  CHECK_NOTHROW(PanelData({unit("a", {5.0}), unit("b", {7.0})}));
}

TEST_CASE("unit_means and grand_mean") {
  const PanelData p({unit("a", {1, 2, 3}), unit("b", {0, 2}), unit("c", {4, 4, 4, 4})});
  CHECK(unit_means(p) == std::vector<double>{2.0, 1.0, 4.0});
  CHECK(grand_mean(PanelData({unit("a", {0, 2}), unit("b", {2, 4})})) == 2.0);
  CHECK(grand_mean(PanelData({unit("a", {2}), unit("b", {2}), unit("c", {2})})) == 2.0);
  CHECK(grand_mean(PanelData({unit("a", {1}), unit("b", {2}), unit("c", {6})})) == 3.0);
}

TEST_CASE("property: order invariance of unit means, grand mean identity, CSV round trip") {
  std::mt19937_64 gen(11);
  TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = oracle::random_panel(gen, 8, 6, 1);
    std::vector<Unit> units;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      Unit u = unit("id" + std::to_string(i), raw[i], 0.25 * static_cast<double>(i) - 1.0);
      if (trial % 2) {
        u.cluster = (i % 2) ? "g,1" : "g\"2";
        u.controls = {static_cast<double>(i), 1.0 / 3.0};
      }
      units.push_back(std::move(u));
    }
    const PanelData p(units);

    const auto means = unit_means(p);
    CHECK(grand_mean(p) == mean(means));

    std::vector<Unit> shuffled = units;
    for (auto& u : shuffled) std::reverse(u.measurements.begin(), u.measurements.end());
    const auto rmeans = unit_means(PanelData(shuffled));
    for (std::size_t i = 0; i < means.size(); ++i) CHECK(rmeans[i] == doctest::Approx(means[i]).epsilon(1e-14));

    save_panel(p, dir.path / "m.csv", dir.path / "o.csv");
    CHECK(load_panel(dir.path / "m.csv", dir.path / "o.csv") == p);
  }
}
