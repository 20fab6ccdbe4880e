#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fomip/cli.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using fomip::cli::run;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  fs::path dir = fs::temp_directory_path() / "fomip_cli_tests";
  fs::create_directories(dir);
  fs::path p = dir / name;
  std::ofstream f(p, std::ios::binary);
  f << text;
  return p;
}

// Minimal LP-format reader for the export cross-check: counts columns
// and rows and recovers the objective vector by name.
struct LpSummary {
  std::map<std::string, double> objective;
  std::set<std::string> columns;
  int rows = 0;
  std::set<std::string> generals;
};

LpSummary read_lp(const std::string& text) {
  LpSummary s;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '\\') continue;
    std::string trimmed = line;
    while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(trimmed.begin());
    if (trimmed == "Minimize" || trimmed == "Subject To" || trimmed == "Bounds" ||
        trimmed == "General" || trimmed == "End") {
      section = trimmed;
      continue;
    }
    if (section == "Minimize") {
      std::istringstream ls(trimmed);
      std::string tok;
      ls >> tok;  // obj:
      double sign = 1.0;
      double coef = 0.0;
      bool have_coef = false;
      while (ls >> tok) {
        if (tok == "+") {
          sign = 1.0;
        } else if (tok == "-") {
          sign = -1.0;
        } else if (!tok.empty() && (std::isdigit(tok[0]) || tok[0] == '.')) {
          coef = std::stod(tok);
          have_coef = true;
        } else {
          s.objective[tok] += sign * (have_coef ? coef : 1.0);
          sign = 1.0;
          have_coef = false;
        }
      }
    } else if (section == "Subject To") {
      if (trimmed.find(':') != std::string::npos) ++s.rows;
    } else if (section == "Bounds") {
      // lb <= name <= ub
      std::istringstream ls(trimmed);
      std::string lb, le1, name;
      ls >> lb >> le1 >> name;
      s.columns.insert(name);
    } else if (section == "General") {
      std::istringstream ls(trimmed);
      std::string name;
      while (ls >> name) s.generals.insert(name);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("check: valid model exits 0, empty model exits 0") {
  auto good = write_temp("good.fomip", fomip::test::protein_text());
  CHECK(invoke({"check", good.string()}).code == 0);

  auto empty = write_temp("empty.fomip", "");
  auto res = invoke({"check", empty.string()});
  CHECK(res.code == 0);
  CHECK(res.out.empty());
}

TEST_CASE("check: unsafe rule exits 2 with a spanned diagnostic") {
  auto bad = write_temp("bad.fomip", R"(domain d = {a};
var x(d);
constraint 1 <= 1*x(P1) <= inf :- not P1 = P2;
)");
  auto res = invoke({"check", bad.string()});
  CHECK(res.code == 2);
  CHECK(res.err.find("bad.fomip:3:") != std::string::npos);
  CHECK(res.err.find("error") != std::string::npos);
}

TEST_CASE("solve: missing file exits 2") {
  CHECK(invoke({"solve", "/nonexistent/nowhere.fomip"}).code == 2);
}

TEST_CASE("solve: protein model reports optimal -4 and exits 0") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto res = invoke({"solve", path.string(), "--mode=bpc", "--separator=guided"});
  REQUIRE(res.code == 0);
  json rep = json::parse(res.out);
  CHECK(rep.at("schema") == 1);
  CHECK(rep.at("status") == "optimal");
  CHECK(rep.at("objective").get<double>() == doctest::Approx(-4.0));
  CHECK(rep.at("gap").get<double>() == doctest::Approx(0.0));
  CHECK(res.err.find("status: optimal") != std::string::npos);
}

TEST_CASE("solve: infeasible model exits 1") {
  auto path = write_temp("infeasible.fomip", R"(domain u = {o};
var x(u);
constraint 1 <= 1*x(I) <= inf :- u(I);
constraint -inf <= 1*x(I) <= 0 :- u(I);
default { objective = 0.0; lb = 0.0; ub = 1.0; vartype = int; }
)");
  auto res = invoke({"solve", path.string()});
  CHECK(res.code == 1);
  json rep = json::parse(res.out);
  CHECK(rep.at("status") == "infeasible");
  CHECK(rep.at("objective").is_null());
}

TEST_CASE("solve: pricer/separator flags require bpc mode") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto res = invoke({"solve", path.string(), "--mode=ground", "--pricer=naive"});
  CHECK(res.code == 2);
  CHECK(res.err.find("--mode=bpc") != std::string::npos);
}

TEST_CASE("solve: node limit exits 3 and reports the bound") {
  auto path = write_temp("cycle.fomip", fomip::test::odd_cycle_text());
  auto res = invoke({"solve", path.string(), "--max-nodes=1"});
  CHECK(res.code == 3);
  CHECK(res.err.find("best bound") != std::string::npos);
}

TEST_CASE("identical invocations produce byte-identical reports") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto a = invoke({"solve", path.string(), "-vv"});
  auto b = invoke({"solve", path.string(), "-vv"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  auto g1 = invoke({"ground", path.string()});
  auto g2 = invoke({"ground", path.string()});
  CHECK(g1.out == g2.out);
}

TEST_CASE("enum subcommand runs the oracle") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto res = invoke({"enum", path.string()});
  REQUIRE(res.code == 0);
  json rep = json::parse(res.out);
  CHECK(rep.at("objective").get<double>() == doctest::Approx(-4.0));
}

TEST_CASE("ground JSON lists every atom with its info") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto res = invoke({"ground", path.string()});
  REQUIRE(res.code == 0);
  json gp = json::parse(res.out);
  CHECK(gp.at("schema") == 1);
  CHECK(gp.at("atoms").size() == 8);
  CHECK(gp.at("constraints").size() == 4);
  bool found = false;
  for (const auto& a : gp.at("atoms"))
    if (a.at("atom") == "interaction(p1,p2)") {
      found = true;
      CHECK(a.at("objective").get<double>() == doctest::Approx(-1.0));
      CHECK(a.at("vartype") == "int");
    }
  CHECK(found);
}

TEST_CASE("export writes LP format an external reader can reconcile") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  auto res = invoke({"export", path.string()});
  REQUIRE(res.code == 0);

  LpSummary lp = read_lp(res.out);
  CHECK(lp.columns.size() == 8);
  CHECK(lp.rows == 4);
  CHECK(lp.generals.size() == 8);
  CHECK(lp.objective.size() == 4);
  CHECK(lp.objective.at("interaction_p1_p2") == doctest::Approx(-1.0));
  CHECK(lp.objective.at("interaction_p2_p1") == doctest::Approx(-1.0));
  CHECK(lp.columns.count("location_p1_l1") == 1);
}

TEST_CASE("export rejects colliding mangled names") {
  auto path = write_temp("collide.fomip", R"(domain d = {b, c};
var a_b(d);
var a(d, d);
default { objective = 0.0; lb = 0.0; ub = 1.0; vartype = int; }
)");
  // a_b(c) and a(b,c) both mangle to a_b_c
  auto res = invoke({"export", path.string()});
  CHECK(res.code == 2);
  CHECK(res.err.find("mangle") != std::string::npos);
}

TEST_CASE("outputs can be routed to files") {
  auto path = write_temp("protein.fomip", fomip::test::protein_text());
  fs::path out = fs::temp_directory_path() / "fomip_cli_tests" / "report.json";
  std::error_code ec;
  fs::remove(out, ec);
  auto res = invoke({"solve", path.string(), "--out", out.string()});
  CHECK(res.code == 0);
  REQUIRE(fs::exists(out));
  std::ifstream f(out);
  json rep = json::parse(f);
  CHECK(rep.at("status") == "optimal");
}

TEST_CASE("node trace appears in the report at -vv") {
  auto path = write_temp("cycle.fomip", fomip::test::odd_cycle_text());
  auto res = invoke({"solve", path.string(), "-vv"});
  REQUIRE(res.code == 0);
  json rep = json::parse(res.out);
  REQUIRE(rep.contains("nodes"));
  CHECK(rep.at("nodes").size() >= 3);
}
