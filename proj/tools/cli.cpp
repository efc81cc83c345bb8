#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "exode/intfactor.hpp"
#include "exode/simplify.hpp"
#include "exode/verify.hpp"

namespace exode::cli {

using json = nlohmann::json;

namespace {

constexpr const char* kObstructionMessage =
    "no integrating factor of the covered forms mu(x,y,p), mu(x,y), mu(x,p), mu(y,p) exists";

json point_json(const Point3& p) { return {{"x", p.x}, {"y", p.y}, {"p", p.p}}; }

Point3 point_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 3) throw std::invalid_argument("a point needs three coordinates");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  }
  if (j.contains("x0")) return {j.at("x0").get<double>(), j.at("y0").get<double>(), j.at("p0").get<double>()};
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("p").get<double>()};
}

Point3 point_from_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double d = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("malformed number '" + item + "'");
    v.push_back(d);
  }
  if (v.size() != 3) throw std::invalid_argument("expected three comma-separated values, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

json verdict_json(const ZeroVerdict& v) {
  json j{{"verdict", to_string(v.kind)}, {"samples", v.samples}, {"tol", v.tol}, {"seed", v.seed}};
  if (v.kind != ZeroVerdict::Kind::ProvenZero) j["max_abs"] = v.max_abs;
  if (v.witness) {
    json w = point_json(v.witness->at);
    if (!v.witness->params.empty()) w["params"] = v.witness->params;
    j["witness"] = w;
    j["witness_value"] = v.witness_value;
  }
  return j;
}

json exactness_json(const ExactnessReport& r) {
  static const std::array<const char*, 3> names{"d(a2)/dy - d(a1)/dp", "d(a2)/dx - d(a0)/dp",
                                                "d(a1)/dx - d(a0)/dy"};
  json res = json::array();
  for (std::size_t i = 0; i < 3; ++i) {
    json item{{"name", "r" + std::to_string(i + 1)}, {"condition", names[i]}, {"residual", print(r.residuals[i])}};
    item.update(verdict_json(r.verdicts[i]));
    res.push_back(item);
  }
  return {{"verdict", to_string(r.overall)}, {"residuals", res}};
}

json ode_json(const SecondOrderOde& ode) {
  json j{{"a2", print(ode.a2)}, {"a1", print(ode.a1)}, {"a0", print(ode.a0)}};
  if (!ode.params.empty()) j["params"] = ode.params;
  return j;
}

SecondOrderOde make_ode(const Problem& pb) {
  if (pb.a2.empty()) throw std::invalid_argument("a2 is required");
  return SecondOrderOde(parse(pb.a2), parse(pb.a1), parse(pb.a0), pb.params);
}

SamplerConfig make_config(const Problem& pb) {
  if (!(pb.tol > 0)) throw std::invalid_argument("tol must be positive");
  SamplerConfig c;
  c.tol = pb.tol;
  c.seed = pb.seed;
  c.samples = pb.samples;
  c.box = pb.box;
  c.params = pb.params;
  return c;
}

json base_report(const std::string& command, const SecondOrderOde& ode) {
  return {{"command", command}, {"ode", ode_json(ode)}};
}

json first_integral_json(const FirstIntegral& fi) {
  json legs = json::array();
  for (const auto& leg : fi.legs()) {
    json l{{"variable", to_string(leg.var)}, {"integrand", print(leg.integrand)}};
    l["method"] = leg.antiderivative ? "symbolic" : "quadrature";
    if (leg.antiderivative) l["integral"] = print(*leg.antiderivative);
    legs.push_back(l);
  }
  json j{{"base", point_json(fi.base())}, {"legs", legs}};
  j["closed_form"] = fi.closed_form() ? json(print(*fi.closed_form())) : json(nullptr);
  return j;
}

double x_end_for(const Problem& pb, const Point3& origin) { return pb.x_end ? *pb.x_end : origin.x + 1.0; }

json constancy_json(const ConstancyReport& c, double tol) {
  return {{"psi0", c.psi0}, {"max_drift", c.max_drift}, {"tolerance", tol}, {"pass", c.max_drift <= tol}};
}

std::optional<ProductFactorSpec> spec_from(const Problem& pb) {
  if (!pb.alpha && !pb.beta && !pb.gamma) return std::nullopt;
  ProductFactorSpec s;
  if (pb.alpha) s.alpha = parse(*pb.alpha);
  if (pb.beta) s.beta = parse(*pb.beta);
  if (pb.gamma) s.gamma = parse(*pb.gamma);
  return s;
}

json mu_json(const MuResult& r) {
  json j{{"form", to_string(r.form)}, {"source", r.source}};
  j["mu"] = r.mu ? json(print(*r.mu)) : json(nullptr);
  if (r.spec) {
    j["alpha"] = print(r.spec->alpha);
    j["beta"] = print(r.spec->beta);
    j["gamma"] = print(r.spec->gamma);
  }
  if (r.scaled) j["scaled"] = ode_json(*r.scaled);
  j["scaled_exactness"] = exactness_json(r.scaled_report);
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

void render(const json& j, const std::string& indent, std::ostringstream& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (v.is_object()) {
      out << indent << it.key() << ":\n";
      render(v, indent + "  ", out);
    } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
      out << indent << it.key() << ":\n";
      for (const auto& item : v) {
        if (item.is_object()) {
          std::ostringstream sub;
          render(item, indent + "    ", sub);
          std::string s = sub.str();
          out << indent << "  - " << s.substr(indent.size() + 4);
        } else {
          out << indent << "  - " << item.dump() << "\n";
        }
      }
    } else if (v.is_string()) {
      out << indent << it.key() << ": " << v.get<std::string>() << "\n";
    } else {
      out << indent << it.key() << ": " << v.dump() << "\n";
    }
  }
}

}  // namespace

Problem problem_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("problem file must hold a JSON object");
  Problem pb;
  auto expr_field = [&](const char* key, std::string& dst) {
    if (!doc.contains(key)) return;
    const json& v = doc.at(key);
    dst = v.is_string() ? v.get<std::string>() : v.dump();
  };
  expr_field("a2", pb.a2);
  expr_field("a1", pb.a1);
  expr_field("a0", pb.a0);
  if (doc.contains("params")) pb.params = doc.at("params").get<Bindings>();
  if (doc.contains("ivp")) pb.ivp = point_from_json(doc.at("ivp"));
  if (doc.contains("base")) pb.base = point_from_json(doc.at("base"));
  if (doc.contains("box")) {
    const json& b = doc.at("box");
    Box box;
    for (std::size_t i = 0; i < 3; ++i) box.ranges[i] = {b.at(i).at(0).get<double>(), b.at(i).at(1).get<double>()};
    if (!box.is_valid()) throw std::invalid_argument("box bounds must satisfy lo < hi");
    pb.box = box;
  }
  if (doc.contains("tol")) pb.tol = doc.at("tol").get<double>();
  if (doc.contains("drift_tol")) pb.drift_tol = doc.at("drift_tol").get<double>();
  if (doc.contains("seed")) pb.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("samples")) pb.samples = doc.at("samples").get<int>();
  if (doc.contains("steps")) pb.steps = doc.at("steps").get<int>();
  if (doc.contains("x_end")) pb.x_end = doc.at("x_end").get<double>();
  if (doc.contains("mu")) pb.mu = doc.at("mu").get<std::string>();
  if (doc.contains("alpha")) pb.alpha = doc.at("alpha").get<std::string>();
  if (doc.contains("beta")) pb.beta = doc.at("beta").get<std::string>();
  if (doc.contains("gamma")) pb.gamma = doc.at("gamma").get<std::string>();
  if (doc.contains("range")) pb.range = doc.at("range").get<int>();
  if (!(pb.tol > 0)) throw std::invalid_argument("tol must be positive");
  return pb;
}

CommandResult cmd_check(const Problem& pb) {
  SecondOrderOde ode = make_ode(pb);
  SamplerConfig cfg = make_config(pb);
  ExactnessReport r = check_exact(ode, cfg);
  Obstruction ob = obstruction(ode, cfg);
  CommandResult out;
  out.report = base_report("check", ode);
  out.report["exactness"] = exactness_json(r);
  json obj{{"E", print(ob.combination)}};
  obj.update(verdict_json(ob.verdict));
  out.report["obstruction"] = obj;
  switch (r.overall) {
    case Exactness::Exact:
      out.exit_code = kSuccess;
      out.report["message"] = "the equation is exact";
      break;
    case Exactness::UndeterminedSampled:
      out.exit_code = kUndetermined;
      out.report["message"] = "all residuals vanish at sampled points but not symbolically (numerically exact)";
      break;
    case Exactness::NotExact:
      out.exit_code = kNegative;
      out.report["message"] = ob.rules_out_factor()
                                  ? std::string("the equation is not exact; ") + kObstructionMessage
                                  : std::string("the equation is not exact; the obstruction vanishes, so an "
                                                "integrating factor may exist (try the mu command)");
      break;
  }
  return out;
}

CommandResult cmd_reduce(const Problem& pb) {
  SecondOrderOde ode = make_ode(pb);
  SamplerConfig cfg = make_config(pb);
  CommandResult out;
  out.report = base_report("reduce", ode);
  ExactnessReport r = check_exact(ode, cfg);
  out.report["exactness"] = exactness_json(r);
  if (!r.is_exact()) {
    out.exit_code = kNegative;
    out.report["message"] = "the equation is not exact; no first integral is built (try the mu command)";
    return out;
  }
  ReducedOde red = reduce(ode, pb.ivp, pb.base, cfg);
  out.report["first_integral"] = first_integral_json(red.psi);
  json lvl;
  if (red.level) {
    lvl = {{"value", *red.level}, {"from", "initial data"}};
  } else {
    lvl = {{"symbol", red.level_symbol}};
  }
  out.report["level"] = lvl;
  std::string c = red.level ? print(constant(to_rational(*red.level))) : red.level_symbol;
  if (red.psi.closed_form()) {
    out.report["reduced"] = print(*red.psi.closed_form()) + " = " + c;
  }
  out.report["explicit"] = red.explicit_p ? json("p = " + print(*red.explicit_p)) : json(nullptr);
  if (pb.ivp) {
    double x_end = x_end_for(pb, *pb.ivp);
    Trajectory tr = integrate_ode(ode, *pb.ivp, x_end, pb.steps);
    json traj{{"origin", point_json(*pb.ivp)}, {"x_end", x_end}, {"steps", pb.steps}};
    traj["constancy"] = constancy_json(check_constancy(red.psi, tr), pb.drift_tol);
    if (red.explicit_p) traj["reduction_discrepancy"] = cross_check_reduction(ode, red, *pb.ivp, x_end, pb.steps);
    out.report["trajectory"] = traj;
  }
  out.exit_code = r.overall == Exactness::Exact ? kSuccess : kUndetermined;
  out.report["message"] = r.overall == Exactness::Exact ? "reduced to first order"
                                                         : "reduced to first order (numerically exact equation)";
  return out;
}

CommandResult cmd_mu(const Problem& pb) {
  SecondOrderOde ode = make_ode(pb);
  SamplerConfig cfg = make_config(pb);
  CommandResult out;
  out.report = base_report("mu", ode);
  Obstruction ob = obstruction(ode, cfg);
  json obj{{"E", print(ob.combination)}};
  obj.update(verdict_json(ob.verdict));
  out.report["obstruction"] = obj;
  if (ob.rules_out_factor()) {
    out.exit_code = kNegative;
    out.report["message"] = kObstructionMessage;
    return out;
  }

  json attempts = json::array();
  std::optional<json> found;
  auto attempt = [&](const std::string& name, const std::function<FinderOutcome()>& finder) {
    if (found && !pb.all) return;
    json a{{"strategy", name}};
    try {
      FinderOutcome o = finder();
      a["found"] = static_cast<bool>(o);
      if (o) {
        a["result"] = mu_json(*o.result);
        if (!found) found = a["result"];
      } else {
        a["failed_hypothesis"] = o.failed_hypothesis;
      }
    } catch (const std::exception& e) {
      a["found"] = false;
      a["error"] = e.what();
    }
    attempts.push_back(a);
  };
  attempt("mu(x)", [&] { return find_mu_x(ode, cfg); });
  attempt("mu(y)", [&] { return find_mu_y(ode, cfg); });
  attempt("mu(p)", [&] { return find_mu_p(ode, cfg); });
  attempt("monomial search", [&] { return search_mu_monomial(ode, pb.range, cfg); });
  if (auto spec = spec_from(pb)) {
    bool pairwise = simplify(spec->alpha).is_one() || simplify(spec->beta).is_one() ||
                    simplify(spec->gamma).is_one();
    attempt(pairwise ? "pairwise product" : "product",
            [&, s = *spec] { return pairwise ? find_mu_pairwise(ode, s, cfg) : find_mu_product(ode, s, cfg); });
  }
  out.report["attempts"] = attempts;
  if (found) {
    out.report["integrating_factor"] = *found;
    out.report["message"] = "integrating factor found";
    out.exit_code = kSuccess;
  } else {
    out.report["message"] =
        "no automatic strategy found an integrating factor; supply a candidate with verify-mu --mu <expr>";
    out.exit_code = kNegative;
  }
  return out;
}

CommandResult cmd_verify_mu(const Problem& pb) {
  if (!pb.mu) throw std::invalid_argument("verify-mu needs --mu");
  SecondOrderOde ode = make_ode(pb);
  SamplerConfig cfg = make_config(pb);
  CommandResult out;
  out.report = base_report("verify-mu", ode);
  Obstruction ob = obstruction(ode, cfg);
  json obj{{"E", print(ob.combination)}};
  obj.update(verdict_json(ob.verdict));
  out.report["obstruction"] = obj;
  MuResult r = verify_mu(ode, parse(*pb.mu), cfg);
  out.report["integrating_factor"] = mu_json(r);
  if (!r.scaled_report.is_exact()) {
    out.exit_code = kNegative;
    out.report["message"] = "the scaled equation is not exact";
    return out;
  }
  ReducedOde red = reduce(*r.scaled, pb.ivp, pb.base, cfg);
  out.report["first_integral"] = first_integral_json(red.psi);
  if (red.explicit_p) out.report["explicit"] = "p = " + print(*red.explicit_p);
  bool drift_ok = true;
  if (pb.ivp) {
    double x_end = x_end_for(pb, *pb.ivp);
    Trajectory tr = integrate_ode(ode, *pb.ivp, x_end, pb.steps);
    ConstancyReport cr = check_constancy(red.psi, tr);
    drift_ok = cr.max_drift <= pb.drift_tol;
    out.report["trajectory"] = {{"origin", point_json(*pb.ivp)},
                                {"x_end", x_end},
                                {"steps", pb.steps},
                                {"constancy", constancy_json(cr, pb.drift_tol)}};
  }
  if (!drift_ok) {
    out.exit_code = kNegative;
    out.report["message"] = "the scaled equation is exact but the first integral drifts along the trajectory";
  } else if (r.scaled_report.overall == Exactness::Exact) {
    out.exit_code = kSuccess;
    out.report["message"] = "integrating factor verified";
  } else {
    out.exit_code = kUndetermined;
    out.report["message"] = "integrating factor verified numerically only";
  }
  return out;
}

CommandResult cmd_simulate(const Problem& pb) {
  if (!pb.ivp) throw std::invalid_argument("simulate needs --ivp");
  SecondOrderOde ode = make_ode(pb);
  SamplerConfig cfg = make_config(pb);
  double x_end = x_end_for(pb, *pb.ivp);
  Trajectory tr = integrate_ode(ode, *pb.ivp, x_end, pb.steps);
  std::optional<FirstIntegral> psi;
  try {
    psi = pb.base ? build_first_integral(ode, *pb.base, cfg) : build_first_integral(ode, cfg);
  } catch (const std::exception&) {
  }
  CommandResult out;
  out.report = base_report("simulate", ode);
  out.report["origin"] = point_json(*pb.ivp);
  out.report["x_end"] = x_end;
  out.report["steps"] = pb.steps;
  out.report["h"] = tr.h;
  out.report["integrator"] = tr.integrator;
  json columns = {"x", "y", "p"};
  if (psi) columns.push_back("psi");
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << (psi ? "x,y,p,psi\n" : "x,y,p\n");
  for (const auto& s : tr.samples) {
    json row{s.x, s.y, s.p};
    csv << s.x << ',' << s.y << ',' << s.p;
    if (psi) {
      double v = (*psi)(s);
      row.push_back(v);
      csv << ',' << v;
    }
    csv << '\n';
    rows.push_back(row);
  }
  out.report["columns"] = columns;
  out.report["rows"] = rows;
  out.csv = csv.str();
  return out;
}

std::string render_text(const json& report) {
  std::ostringstream out;
  if (report.contains("message")) out << report.at("message").get<std::string>() << "\n";
  json rest = report;
  rest.erase("message");
  render(rest, "", out);
  return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exactness checks, integrating factors and order reduction for a2*y'' + a1*y' + a0 = 0"};
  app.set_version_flag("--version", "exode 1.0.0");
  std::string command;
  std::optional<std::string> a2, a1, a0, problem_file, ivp, base, mu, alpha, beta, gamma;
  std::vector<std::string> params;
  std::optional<double> tol, x_end;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps, range;
  bool all = false;
  bool as_json = false;
  app.add_option("command", command, "check | reduce | mu | verify-mu | simulate")
      ->required()
      ->check(CLI::IsMember({"check", "reduce", "mu", "verify-mu", "simulate"}));
  app.add_option("--a2", a2, "coefficient of y''");
  app.add_option("--a1", a1, "coefficient of y'");
  app.add_option("--a0", a0, "free term");
  app.add_option("--problem", problem_file, "JSON problem file; flags override its values");
  app.add_option("--param", params, "parameter value, name=value (repeatable)")
      ->allow_extra_args(false);
  app.add_option("--ivp", ivp, "initial data x0,y0,p0");
  app.add_option("--base", base, "base point x0,y0,p0 of the first integral");
  app.add_option("--mu", mu, "candidate integrating factor");
  app.add_option("--alpha", alpha, "product-form factor in x");
  app.add_option("--beta", beta, "product-form factor in y");
  app.add_option("--gamma", gamma, "product-form factor in p");
  app.add_option("--range", range, "exponent bound of the monomial search");
  app.add_flag("--all", all, "run every strategy instead of stopping at the first hit");
  app.add_flag("--json", as_json, "machine-readable output");
  app.add_option("--tol", tol, "zero-test tolerance");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--steps", steps, "RK4 steps");
  app.add_option("--x-end", x_end, "end of the integration interval");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kError;
  }

  CommandResult result;
  try {
    Problem pb;
    if (problem_file) {
      std::ifstream in(*problem_file);
      if (!in) throw std::invalid_argument("cannot open problem file " + *problem_file);
      pb = problem_from_json(json::parse(in));
    }
    if (a2) pb.a2 = *a2;
    if (a1) pb.a1 = *a1;
    if (a0) pb.a0 = *a0;
    for (const auto& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects name=value");
      std::size_t used = 0;
      std::string value = kv.substr(eq + 1);
      double d = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("malformed parameter value '" + value + "'");
      pb.params[kv.substr(0, eq)] = d;
    }
    if (ivp) pb.ivp = point_from_list(*ivp);
    if (base) pb.base = point_from_list(*base);
    if (mu) pb.mu = *mu;
    if (alpha) pb.alpha = *alpha;
    if (beta) pb.beta = *beta;
    if (gamma) pb.gamma = *gamma;
    if (range) pb.range = *range;
    if (tol) pb.tol = *tol;
    if (seed) pb.seed = *seed;
    if (steps) pb.steps = *steps;
    if (x_end) pb.x_end = *x_end;
    pb.all = pb.all || all;

    if (command == "check") {
      result = cmd_check(pb);
    } else if (command == "reduce") {
      result = cmd_reduce(pb);
    } else if (command == "mu") {
      result = cmd_mu(pb);
    } else if (command == "verify-mu") {
      result = cmd_verify_mu(pb);
    } else {
      result = cmd_simulate(pb);
    }
  } catch (const ParseError& e) {
    result.exit_code = kError;
    result.report = {{"command", command}, {"error", std::string("parse error: ") + e.what()}, {"offset", e.offset()}};
  } catch (const std::exception& e) {
    result.exit_code = kError;
    result.report = {{"command", command}, {"error", e.what()}};
  }
  result.report["exit_code"] = result.exit_code;

  if (as_json) {
    out << result.report.dump(2) << "\n";
  } else if (result.exit_code == kError) {
    err << "error: " << result.report.at("error").get<std::string>() << "\n";
  } else if (!result.csv.empty()) {
    out << result.csv;
  } else {
    out << render_text(result.report);
  }
  return result.exit_code;
}

}  // namespace exode::cli
