// Command-line front end: runs verification suites and writes the JSON report.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "theta10/harness.hpp"

namespace {

int export_tables(const theta10::RunConfig& cfg, const std::string& classes_csv, const std::string& subgroup,
                  const std::string& subgroup_csv) {
  using namespace theta10;
  SpGroup g(FieldTower::create(cfg.q));
  if (!subgroup_csv.empty()) {
    const auto label = label_from_name(subgroup);
    if (!label) throw std::invalid_argument("unknown subgroup '" + subgroup + "'");
    const auto spec = subgroup_elements(g, *label);
    std::ofstream os(subgroup_csv);
    export_subgroup_csv(os, g, generate_group(g, spec.elements));
  }
  if (!classes_csv.empty()) {
    if (cfg.q != 3 && !cfg.allow_big) throw std::invalid_argument("class enumeration at q >= 5 needs --allow-big");
    const auto table = generate_group(g, standard_generators(g));
    std::ofstream os(classes_csv);
    export_class_csv(os, g, conjugacy_classes(g, table));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for the theta10 representation of Sp(4, F_q)"};
  theta10::RunConfig cfg;
  cfg.suites.clear();
  std::string classes_csv, subgroup = "U0", subgroup_csv;
  bool list = false;

  app.add_option("--q", cfg.q, "Odd prime power q <= 13")->capture_default_str();
  app.add_option("--suite", cfg.suites, "Suite to run (repeatable; 'all' runs every suite)")->delimiter(',');
  app.add_option("--out", cfg.out, "Write the JSON report here instead of stdout");
  app.add_option("--csv", cfg.csv, "Write the theta10 character table (irreducible suite)");
  app.add_option("--seed", cfg.seed, "Seed for sampled checks")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--allow-big", cfg.allow_big, "Lift the enumeration budget (classes at q >= 5, P1 loops at q >= 7)");
  app.add_flag("--timing", cfg.timing, "Include wall times in the report (breaks byte-identical output)");
  app.add_option("--classes-csv", classes_csv, "Export conjugacy-class representatives and sizes");
  app.add_option("--subgroup", subgroup, "Subgroup label for --subgroup-csv")->capture_default_str();
  app.add_option("--subgroup-csv", subgroup_csv, "Export the elements of --subgroup");
  app.add_flag("--list-suites", list, "Print suite names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& s : theta10::suite_names()) std::cout << s << '\n';
    return 0;
  }
  const bool exporting = !classes_csv.empty() || !subgroup_csv.empty();
  if (cfg.suites.empty() && !exporting) cfg.suites = {"all"};

  try {
    if (exporting) {
      if (!theta10::supported_q(cfg.q)) throw std::invalid_argument("q must be an odd prime power <= 13");
      export_tables(cfg, classes_csv, subgroup, subgroup_csv);
      if (cfg.suites.empty()) return 0;
    }
    const auto report = theta10::run(cfg);
    const std::string text = report.to_json(cfg).dump(2) + "\n";
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!(os << text)) throw std::runtime_error("cannot write " + cfg.out);
    }
    std::ostream& log = cfg.out.empty() ? std::cerr : std::cout;
    for (const auto& s : report.suites) {
      std::size_t passed = 0;
      for (const auto& c : s.checks) passed += c.pass ? 1 : 0;
      log << (s.skipped ? "SKIP " : (s.pass() ? "PASS " : "FAIL ")) << s.name;
      if (s.skipped) log << " (" << s.skip_reason << ")";
      else log << " " << passed << "/" << s.checks.size();
      log << '\n';
    }
    return report.pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
