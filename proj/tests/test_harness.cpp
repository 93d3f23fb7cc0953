#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "common.hpp"
#include "theta10/harness.hpp"

using namespace theta10;
namespace ts = testing_support;

namespace {

RunConfig config(int q, std::vector<std::string> suites) {
  RunConfig c;
  c.q = q;
  c.suites = std::move(suites);
  return c;
}

bool provenance_ok(const std::string& p) {
  return p == "identity" || p.rfind("closed-form: ", 0) == 0 || p.rfind("oracle: ", 0) == 0;
}

}  // namespace

TEST(Config, SupportedQ) {
  for (int q : {3, 5, 7, 9, 11, 13}) EXPECT_TRUE(supported_q(q)) << q;
  for (int q : {1, 2, 4, 8, 15, 17, 21, 25}) EXPECT_FALSE(supported_q(q)) << q;
}

TEST(Config, Normalize) {
  EXPECT_THROW(normalize(config(4, {"dims"})), std::invalid_argument);
  EXPECT_THROW(normalize(config(15, {"dims"})), std::invalid_argument);
  EXPECT_THROW(normalize(config(3, {})), std::invalid_argument);
  EXPECT_THROW(normalize(config(3, {"bogus"})), std::invalid_argument);
  auto bad_jobs = config(3, {"dims"});
  bad_jobs.jobs = 0;
  EXPECT_THROW(normalize(bad_jobs), std::invalid_argument);
  EXPECT_EQ(normalize(config(3, {"all"})).suites, suite_names());
  EXPECT_EQ(normalize(config(3, {"torus", "fields", "torus"})).suites, (std::vector<std::string>{"fields", "torus"}));
  EXPECT_EQ(suite_names().size(), 11u);
}

TEST(Run, RejectsEvenQ) { EXPECT_THROW(run(config(4, {"all"})), std::invalid_argument); }

TEST(Run, SubgroupLocalSuitesAtFive) {
  const auto r = run(config(5, {"dims", "cuspidal", "torus"}));
  ASSERT_EQ(r.suites.size(), 3u);
  for (const auto& s : r.suites) {
    EXPECT_FALSE(s.skipped) << s.name;
    EXPECT_TRUE(s.pass()) << s.name;
  }
  EXPECT_TRUE(r.pass());
}

TEST(Run, BudgetGateProducesSkipRecord) {
  const auto r = run(config(5, {"irreducible"}));
  ASSERT_EQ(r.suites.size(), 1u);
  EXPECT_TRUE(r.suites[0].skipped);
  EXPECT_NE(r.suites[0].skip_reason.find("--allow-big"), std::string::npos);
  const auto j = r.to_json(config(5, {"irreducible"}));
  EXPECT_EQ(j["suites"][0]["status"], "skipped");
}

TEST(Run, ReportSchemaAndProvenance) {
  const auto cfg = config(3, {"fields", "dims", "unipotent"});
  const auto r = run(cfg);
  const auto j = r.to_json(cfg);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["q"], 3);
  EXPECT_FALSE(j["convention_header"].get<std::string>().empty());
  EXPECT_TRUE(j["pass"].get<bool>());
  for (const auto& s : j["suites"]) {
    EXPECT_FALSE(s.contains("wall_seconds"));
    for (const auto& c : s["checks"]) {
      EXPECT_TRUE(provenance_ok(c["provenance"])) << c.dump();
      EXPECT_EQ(c["pass"].get<bool>(), c["computed"] == c["expected"]);
    }
  }
  EXPECT_TRUE(j["suites"][2]["data"]["transcript"].is_array());
}

TEST(Run, TimingIsOptIn) {
  auto cfg = config(3, {"fields"});
  cfg.timing = true;
  EXPECT_TRUE(run(cfg).to_json(cfg)["suites"][0].contains("wall_seconds"));
}

TEST(Run, DeterministicAcrossJobs) {
  auto a = config(3, {"weil-core", "irreducible", "cuspidal"});
  a.seed = 7;
  auto b = a;
  b.jobs = 3;
  EXPECT_EQ(run(a).to_json(a).dump(), run(b).to_json(b).dump());
}

TEST(Run, FailingCheckFailsSuite) {
  SuiteReport s;
  s.checks.push_back({"x", 1, 2, "identity", false});
  EXPECT_FALSE(s.pass());
  s.skipped = true;
  EXPECT_TRUE(s.pass());
}

TEST(Csv, CharacterTable) {
  const auto& g = ts::engine(3)->group();
  const auto& cl = ts::sp43_classes();
  const auto row = ts::analysis(3).theta10_character(ts::sp43_reps());
  std::ostringstream os;
  emit_character_table(os, g, cl, row);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("g00,g01,", 0), 0u);
  EXPECT_NE(line.find("class_size,word_length,value_exact,value_decimal"), std::string::npos);
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, cl.classes.size());
  EXPECT_EQ(rows, 34u);
  const std::string id_fields = matrix_csv_fields(g, g.identity());
  EXPECT_EQ(id_fields, "1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1");
  for (std::size_t i = 0; i < cl.classes.size(); ++i)
    if (cl.classes[i].representative == g.identity()) EXPECT_EQ(row.values[i], CycNum(3, 6L));
  // Torus classes: the class of every regular torus element has value 1.
  const auto t = anisotropic_torus(g);
  const auto& table = ts::sp43();
  for (const auto& s : t.elements) {
    if (s == g.identity() || s == g.minus_identity()) continue;
    const auto idx = table.find(g, s);
    ASSERT_TRUE(idx.has_value());
    EXPECT_TRUE(row.values[cl.class_of[*idx]].is_one());
  }
  EXPECT_THROW(emit_character_table(os, g, cl, CharRow{}), StructuralError);
}

TEST(Csv, PrimePowerEntriesUseColons) {
  SpGroup g(FieldTower::create(9));
  const auto fields = matrix_csv_fields(g, g.identity());
  EXPECT_EQ(fields.rfind("1:0,0:0,", 0), 0u);
}

TEST(Csv, ClassAndSubgroupExports) {
  const auto& g = ts::engine(3)->group();
  std::ostringstream a, b;
  export_class_csv(a, g, ts::sp43_classes());
  const auto u0 = generate_group(g, subgroup_elements(g, SubgroupLabel::U0).elements);
  export_subgroup_csv(b, g, u0);
  auto lines = [](const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); };
  EXPECT_EQ(lines(a.str()), 35u);
  EXPECT_EQ(lines(b.str()), 82u);
}
