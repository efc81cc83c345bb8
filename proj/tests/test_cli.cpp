#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "catch_amalgamated.hpp"
#include "cli.hpp"

using namespace exode;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "exode");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  return json::parse(run(std::move(args)).out);
}

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(run({"check", "--a2", "3*eps", "--a1", "y", "--param", "eps=1"}).code == 0);
  Run no = run({"check", "--a2", "1", "--a0", "x*y"});
  CHECK(no.code == 1);
  CHECK(no.out.find("no integrating factor of the covered forms") != std::string::npos);
  CHECK(run({"check", "--a2", "1", "--a1", "x*(sin(y)^2 + cos(y)^2)", "--a0", "y"}).code == 2);
  Run maybe = run({"check", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2"});
  CHECK(maybe.code == 1);
  CHECK(maybe.out.find("may exist") != std::string::npos);
}

TEST_CASE("options may precede the command") {
  CHECK(run({"--param", "eps=2", "--param", "k=1", "check", "--a2", "3*eps*k", "--a1", "y"}).code == 0);
}

TEST_CASE("errors exit with code 3") {
  Run bad = run({"check", "--a2", "x +* y"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("parse error") != std::string::npos);
  CHECK(run({"check", "--a1", "y"}).code == 3);
  CHECK(run({"check", "--a2", "0"}).code == 3);
  CHECK(run({"frobnicate", "--a2", "1"}).code == 3);
  CHECK(run({"check", "--a2", "1", "--tol", "-1"}).code == 3);
  CHECK(run({"verify-mu", "--a2", "1", "--mu", "0"}).code == 3);
  CHECK(run({"simulate", "--a2", "1"}).code == 3);
}

TEST_CASE("reduce reports closed form, level and explicit form") {
  json r = run_json({"reduce", "--a2", "1", "--a1", "12*x*y^3", "--a0", "3*y^4-1", "--ivp", "0,2,0", "--x-end", "0.5"});
  CHECK(r["exit_code"] == 0);
  CHECK(r["first_integral"]["closed_form"] == "3*x*y^4 - x + p");
  CHECK(r["level"]["value"] == 0.0);
  CHECK(r["explicit"] == "p = -(3*x*y^4) + x");
  CHECK(r["trajectory"]["reduction_discrepancy"].get<double>() <= 1e-5);
  CHECK(r["trajectory"]["constancy"]["pass"] == true);

  json j = run_json({"reduce", "--a2", "3*eps", "--a1", "y", "--param", "eps=1", "--base", "0,0,0"});
  CHECK(j["reduced"] == "y^2/2 + 3*p*eps = c");
  CHECK(j["level"]["symbol"] == "c");

  CHECK(run({"reduce", "--a2", "1", "--a0", "x*y"}).code == 1);
}

TEST_CASE("mu command") {
  json hit = run_json({"mu", "--a2", "(1+y^2)*y", "--a1", "y", "--a0", "(1+y^2)*y"});
  CHECK(hit["exit_code"] == 0);
  CHECK(hit["integrating_factor"]["form"] == "OfY");
  CHECK(hit["attempts"].size() == 2);
  CHECK(hit["attempts"][0]["failed_hypothesis"].get<std::string>().find("side condition") == 0);

  json all = run_json({"mu", "--a2", "(1+y^2)*y", "--a1", "y", "--a0", "(1+y^2)*y", "--all"});
  CHECK(all["attempts"].size() == 4);

  json miss = run_json({"mu", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2"});
  CHECK(miss["exit_code"] == 1);
  CHECK(miss["message"].get<std::string>().find("verify-mu") != std::string::npos);

  json spec = run_json({"mu", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2", "--alpha", "x",
                        "--beta", "y"});
  CHECK(spec["attempts"].back()["strategy"] == "pairwise product");
  CHECK(spec["attempts"].back()["failed_hypothesis"] == "ratio mismatch");

  CHECK(run({"mu", "--a2", "1", "--a0", "x*y"}).code == 1);
  CHECK(run_json({"mu", "--a2", "1", "--a1", "y"})["integrating_factor"]["mu"] == "1");
}

TEST_CASE("verify-mu") {
  json r = run_json({"verify-mu", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2", "--mu",
                     "1/(x*y*(2*x+y))", "--ivp", "1,1,0", "--x-end", "2"});
  CHECK(r["exit_code"] == 0);
  CHECK(r["trajectory"]["constancy"]["max_drift"].get<double>() <= 1e-6);
  CHECK(run({"verify-mu", "--a2", "1", "--a1", "y", "--mu", "1"}).code == 0);
  CHECK(run({"verify-mu", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2", "--mu", "1"}).code == 1);
}

TEST_CASE("simulate emits CSV") {
  Run r = run({"simulate", "--a2", "3*eps", "--a1", "y", "--param", "eps=1", "--ivp", "0,1,0", "--steps", "16"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,p,psi");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 17);

  Run plain = run({"simulate", "--a2", "1", "--a0", "x*y", "--ivp", "0,1,0", "--steps", "16"});
  CHECK(plain.out.rfind("x,y,p\n", 0) == 0);
}

TEST_CASE("problem files, with flags taking precedence") {
  auto path = std::filesystem::temp_directory_path() / "exode_cli_problem.json";
  {
    std::ofstream f(path);
    f << R"({"a2": "1", "a1": "12*x*y^3", "a0": "3*y^4 - 1", "ivp": {"x0": 0, "y0": 2, "p0": 0},
             "x_end": 0.5, "seed": 5, "tol": 1e-10, "box": [[-1, 1], [-1, 1], [-1, 1]]})";
  }
  json r = run_json({"reduce", "--problem", path.string()});
  CHECK(r["exit_code"] == 0);
  CHECK(r["level"]["value"] == 0.0);
  json o = run_json({"check", "--problem", path.string(), "--a0", "x*y"});
  CHECK(o["exit_code"] == 1);
  CHECK(o["exactness"]["residuals"][2]["seed"] == 5);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(cli::problem_from_json(json::parse(R"({"a2": "1", "tol": 0})")), std::invalid_argument);
  CHECK_THROWS_AS(cli::problem_from_json(json::parse("[1, 2]")), std::invalid_argument);
}

TEST_CASE("machine and human output agree and are deterministic") {
  std::vector<std::string> args{"check", "--a2", "x*y*(2*x+y)", "--a1", "x^2+x*y", "--a0", "3*x*y+y^2"};
  std::string first = run({args.begin(), args.end()}).out;
  CHECK(run({args.begin(), args.end()}).out == first);
  auto with_json = args;
  with_json.push_back("--json");
  std::string j1 = run(with_json).out;
  CHECK(run(with_json).out == j1);
  json report = json::parse(j1);
  CHECK(cli::render_text(report) == first);
  for (const auto& res : report["exactness"]["residuals"]) {
    CHECK(first.find("verdict: " + res["verdict"].get<std::string>()) != std::string::npos);
  }
}
