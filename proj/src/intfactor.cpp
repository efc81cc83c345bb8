#include "exode/intfactor.hpp"

#include <array>
#include <cmath>

#include "exode/simplify.hpp"
#include "exode/verify.hpp"

namespace exode {

namespace {

using Kind = ZeroVerdict::Kind;

constexpr int kBisectionSteps = 60;
constexpr int kLevelSetSamples = 24;
constexpr double kFdTol = 1e-6;

// Partial derivatives of the coefficients, indexed [coefficient][variable]
// with coefficient 0 = a0, 1 = a1, 2 = a2.
struct Partials {
  std::array<std::array<Expression, 3>, 3> d;

  explicit Partials(const SecondOrderOde& ode) {
    const std::array<const Expression*, 3> a{&ode.a0, &ode.a1, &ode.a2};
    for (std::size_t i = 0; i < 3; ++i) {
      for (Var v : {Var::X, Var::Y, Var::P}) d[i][static_cast<std::size_t>(v)] = differentiate(*a[i], v);
    }
  }
  const Expression& operator()(int coeff, Var v) const {
    return d[static_cast<std::size_t>(coeff)][static_cast<std::size_t>(v)];
  }
};

SamplerConfig working_config(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  SamplerConfig c = with_params(cfg, ode.params);
  if (!c.box) {
    std::array<Expression, 3> coeffs{ode.a2, ode.a1, ode.a0};
    c.box = default_box(coeffs);
  }
  return c;
}

FinderOutcome fail(std::string why) { return {std::nullopt, std::move(why)}; }

// Report for a factor known only numerically: exactness of the scaled
// coefficients by central differences.
ExactnessReport numeric_scaled_report(const SecondOrderOde& ode, const std::function<double(const Point3&)>& mu,
                                      const SamplerConfig& cfg) {
  ExactnessReport r;
  auto scaled = [&](const Expression& a) {
    return ScalarField([&, a](const Point3& at) { return mu(at) * evaluate(a, at, cfg.params); });
  };
  ScalarField A2 = scaled(ode.a2), A1 = scaled(ode.a1), A0 = scaled(ode.a0);
  std::array<std::function<double(const Point3&)>, 3> res{
      [&](const Point3& at) { return fd_partial(A2, Var::Y, at) - fd_partial(A1, Var::P, at); },
      [&](const Point3& at) { return fd_partial(A2, Var::X, at) - fd_partial(A0, Var::P, at); },
      [&](const Point3& at) { return fd_partial(A1, Var::X, at) - fd_partial(A0, Var::Y, at); },
  };
  Sampler sampler(*cfg.box, cfg.seed, cfg.params, {});
  for (std::size_t i = 0; i < 3; ++i) {
    ZeroVerdict& v = r.verdicts[i];
    v.kind = Kind::SampledZero;
    v.tol = kFdTol;
    v.seed = cfg.seed;
  }
  int seen = 0;
  for (int attempt = 0; attempt < 50 * 20 && seen < 20; ++attempt) {
    Sample s = sampler.draw();
    std::array<double, 3> vals{};
    double scale = 1.0;
    try {
      for (std::size_t i = 0; i < 3; ++i) vals[i] = res[i](s.at);
      scale = std::max({1.0, std::abs(A0(s.at)), std::abs(A1(s.at)), std::abs(A2(s.at))});
    } catch (const std::exception&) {
      continue;
    }
    ++seen;
    for (std::size_t i = 0; i < 3; ++i) {
      ZeroVerdict& v = r.verdicts[i];
      v.samples = seen;
      v.max_abs = std::max(v.max_abs, std::abs(vals[i]));
      if (v.kind != Kind::NonZero && std::abs(vals[i]) > kFdTol * scale) {
        v.kind = Kind::NonZero;
        v.witness = s;
        v.witness_value = vals[i];
      }
    }
  }
  bool any_nonzero = false;
  for (const auto& v : r.verdicts) any_nonzero = any_nonzero || v.kind == Kind::NonZero;
  r.overall = any_nonzero || seen == 0 ? Exactness::NotExact : Exactness::UndeterminedSampled;
  return r;
}

// Sampled nonvanishing check. Returns warnings; throws when mu hits zero.
std::vector<std::string> check_nonvanishing(const std::function<double(const Point3&)>& mu,
                                            const SamplerConfig& cfg) {
  Sampler sampler(*cfg.box, cfg.seed, cfg.params, {});
  int sign = 0;
  std::vector<std::string> warnings;
  int seen = 0;
  for (int attempt = 0; attempt < 50 * cfg.samples && seen < cfg.samples; ++attempt) {
    Sample s = sampler.draw();
    double v;
    try {
      v = mu(s.at);
    } catch (const std::exception&) {
      continue;
    }
    if (!std::isfinite(v)) continue;
    ++seen;
    if (v == 0.0) throw FinderError("integrating factor vanishes at " + to_string(s.at));
    int sg = v > 0 ? 1 : -1;
    if (sign != 0 && sg != sign && warnings.empty()) {
      warnings.push_back("integrating factor changes sign on the sampling box");
    }
    sign = sg;
  }
  return warnings;
}

// mu = exp(potential of the field f), anchored where the potential vanishes.
std::optional<MuResult> mu_from_log_gradient(const SecondOrderOde& ode, const std::array<Expression, 3>& f,
                                             const SamplerConfig& cfg) {
  const std::array<Point3, 4> anchors{{{1, 1, 1}, {0.5, 0.5, 0.5}, {2, 2, 2}, {1.5, 1.5, 1.5}}};
  for (const auto& anchor : anchors) {
    try {
      FirstIntegral lnmu = potential(f[0], f[1], f[2], anchor, cfg.params);
      MuResult r;
      if (lnmu.closed_form()) {
        Expression mu = simplify(exp(*lnmu.closed_form()));
        r.mu = mu;
        Bindings params = cfg.params;
        r.evaluate_mu = [mu, params](const Point3& at) { return evaluate(mu, at, params); };
        r.scaled = ode.scaled(mu);
        r.scaled_report = check_exact(*r.scaled, cfg);
      } else {
        r.evaluate_mu = [lnmu](const Point3& at) { return std::exp(lnmu(at)); };
        r.scaled_report = numeric_scaled_report(ode, r.evaluate_mu, cfg);
        r.warnings.push_back("integrating factor evaluated by quadrature; scaled exactness checked by finite differences");
      }
      return r;
    } catch (const SingularBasePoint&) {
    }
  }
  return std::nullopt;
}

FinderOutcome finish(const SecondOrderOde& ode, const std::array<Expression, 3>& field, MuForm form,
                     std::string source, const SamplerConfig& cfg) {
  auto r = mu_from_log_gradient(ode, field, cfg);
  if (!r) return fail("no regular anchor point for the factor integral");
  if (!r->scaled_report.is_exact()) return fail("scaled equation is not exact");
  auto w = check_nonvanishing(r->evaluate_mu, cfg);
  r->warnings.insert(r->warnings.end(), w.begin(), w.end());
  r->form = form;
  r->source = std::move(source);
  return {std::move(r), {}};
}

struct Ratio {
  Expression num;
  Expression den;
  std::string name;
};

// Shared body of the three single-variable finders.
FinderOutcome single_variable(const SecondOrderOde& ode, const SamplerConfig& cfg, Var v,
                              const Expression& side, const std::string& side_name,
                              const std::array<Ratio, 2>& ratios, MuForm form, const std::string& source) {
  SamplerConfig c = working_config(ode, cfg);
  if (!is_identically_zero(side, c).is_zero()) return fail("side condition " + side_name);

  std::vector<Expression> defined;
  for (const auto& r : ratios) {
    if (is_identically_zero(r.den, c).is_zero()) {
      if (!is_identically_zero(r.num, c).is_zero()) {
        return fail(r.name + " undefined: denominator vanishes identically but numerator does not");
      }
      continue;
    }
    Expression q = simplify(r.num / r.den);
    if (!depends_only_on(q, {v}, c).independent()) {
      return fail(r.name + " depends on more than " + std::string(to_string(v)));
    }
    defined.push_back(q);
  }
  if (defined.size() == 2 && !is_identically_zero(defined[0] - defined[1], c).is_zero()) {
    return fail("ratio mismatch");
  }
  Expression rate = defined.empty() ? constant(0) : defined.front();
  std::array<Expression, 3> field{constant(0), constant(0), constant(0)};
  field[static_cast<std::size_t>(v)] = rate;
  return finish(ode, field, form, source, c);
}

bool is_one_like(const Expression& e) { return simplify(e).is_constant(); }

// Moves (x, y, p) along the level set of xi through `s`, checking that `r`
// keeps its value. Returns the number of successful comparisons, or a
// witness of variation.
struct LevelSetResult {
  int compared = 0;
  bool varies = false;
};

LevelSetResult level_set_check(const Expression& r, const ProductFactorSpec& spec, const SamplerConfig& cfg) {
  const std::array<Expression, 3> factors{spec.alpha, spec.beta, spec.gamma};
  std::vector<Var> active;
  std::vector<Var> inert;
  for (Var v : {Var::X, Var::Y, Var::P}) {
    (is_one_like(factors[static_cast<std::size_t>(v)]) ? inert : active).push_back(v);
  }
  Expression xi = spec.xi();
  Sampler sampler(*cfg.box, cfg.seed + 1, cfg.params, {});
  LevelSetResult out;
  auto xi_at = [&](const Point3& at) { return evaluate(xi, at, cfg.params); };
  auto r_at = [&](const Point3& at) { return evaluate(r, at, cfg.params); };
  for (int attempt = 0; attempt < 20 * kLevelSetSamples && out.compared < kLevelSetSamples; ++attempt) {
    Sample s = sampler.draw();
    Point3 moved = s.at;
    try {
      double xi0 = xi_at(s.at);
      double r0 = r_at(s.at);
      // Move one coordinate; if it carries a nonconstant factor, solve for
      // another active coordinate so that xi is restored.
      std::vector<Var> movable = active;
      movable.insert(movable.end(), inert.begin(), inert.end());
      Var u = movable[static_cast<std::size_t>(attempt) % movable.size()];
      const auto& ru = (*cfg.box)[u];
      moved[u] = sampler.uniform(ru.first, ru.second);
      bool u_active = std::find(active.begin(), active.end(), u) != active.end();
      if (u_active) {
        if (active.size() < 2) continue;
        Var w = active[0] == u ? active[1] : active[0];
        const auto& rw = (*cfg.box)[w];
        Point3 lo = moved;
        Point3 hi = moved;
        lo[w] = rw.first;
        hi[w] = rw.second;
        double flo = xi_at(lo) - xi0;
        double fhi = xi_at(hi) - xi0;
        if (!(flo * fhi < 0)) continue;
        double a = rw.first, b = rw.second;
        for (int it = 0; it < kBisectionSteps; ++it) {
          double m = 0.5 * (a + b);
          Point3 mid = moved;
          mid[w] = m;
          double fm = xi_at(mid) - xi0;
          if ((fm < 0) == (flo < 0)) {
            a = m;
            flo = fm;
          } else {
            b = m;
          }
        }
        moved[w] = 0.5 * (a + b);
      }
      double r1 = r_at(moved);
      if (!std::isfinite(r0) || !std::isfinite(r1)) continue;
      ++out.compared;
      if (std::abs(r1 - r0) > 1e-6 * std::max({1.0, std::abs(r0), std::abs(r1)})) {
        out.varies = true;
        return out;
      }
    } catch (const std::exception&) {
      continue;
    }
  }
  return out;
}

FinderOutcome product_form(const SecondOrderOde& ode, const ProductFactorSpec& spec, const SamplerConfig& cfg,
                           const std::string& source) {
  spec.validate();
  SamplerConfig c = working_config(ode, cfg);
  Partials d(ode);
  const Expression& al = spec.alpha;
  const Expression& be = spec.beta;
  const Expression& ga = spec.gamma;
  Expression dal = differentiate(al, Var::X);
  Expression dbe = differentiate(be, Var::Y);
  Expression dga = differentiate(ga, Var::P);
  const Expression& a2 = ode.a2;
  const Expression& a1 = ode.a1;
  const Expression& a0 = ode.a0;

  // Each ratio equals m'(xi)/m(xi) when mu = m(xi) makes the equation exact.
  const std::array<Ratio, 3> ratios{{
      {d(1, Var::P) - d(2, Var::Y), al * (dbe * ga * a2 - be * dga * a1), "first ratio"},
      {d(0, Var::Y) - d(1, Var::X), ga * (dal * be * a1 - al * dbe * a0), "second ratio"},
      {d(2, Var::X) - d(0, Var::P), be * (al * dga * a0 - dal * ga * a2), "third ratio"},
  }};
  std::vector<Expression> defined;
  for (const auto& r : ratios) {
    if (is_identically_zero(r.den, c).is_zero()) {
      if (!is_identically_zero(r.num, c).is_zero()) {
        return fail(r.name + " undefined: denominator vanishes identically but numerator does not");
      }
      continue;
    }
    defined.push_back(simplify(r.num / r.den));
  }
  for (std::size_t i = 1; i < defined.size(); ++i) {
    if (!is_identically_zero(defined[0] - defined[i], c).is_zero()) return fail("ratio mismatch");
  }
  Expression rate = defined.empty() ? constant(0) : defined.front();
  Expression xi = spec.xi();
  std::array<Expression, 3> grad{differentiate(xi, Var::X), differentiate(xi, Var::Y), differentiate(xi, Var::P)};
  if (!rate.is_zero()) {
    std::array<Expression, 3> gr{differentiate(rate, Var::X), differentiate(rate, Var::Y),
                                 differentiate(rate, Var::P)};
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 2}}) {
      Expression cross = gr[i] * grad[j] - gr[j] * grad[i];
      if (!is_identically_zero(cross, c).is_zero()) return fail("ratio is not a function of xi");
    }
    LevelSetResult ls = level_set_check(rate, spec, c);
    if (ls.varies) return fail("ratio is not a function of xi");
    int active = 0;
    for (const auto* f : {&al, &be, &ga}) active += is_one_like(*f) ? 0 : 1;
    if (active >= 2 && ls.compared == 0) {
      throw FinderError("level-set sampling failed: xi is not invertible on the sampling box");
    }
  }
  std::array<Expression, 3> field{simplify(rate * grad[0]), simplify(rate * grad[1]), simplify(rate * grad[2])};
  auto out = finish(ode, field, MuForm::Product, source, c);
  if (out.result) out.result->spec = spec;
  return out;
}

}  // namespace

Obstruction obstruction(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  Partials d(ode);
  Expression e = simplify((d(0, Var::Y) - d(1, Var::X)) * ode.a2 + (d(2, Var::X) - d(0, Var::P)) * ode.a1 +
                          (d(1, Var::P) - d(2, Var::Y)) * ode.a0);
  return {e, is_identically_zero(e, working_config(ode, cfg))};
}

Expression ProductFactorSpec::xi() const { return simplify(alpha * beta * gamma); }

void ProductFactorSpec::validate() const {
  const std::array<std::pair<const Expression*, Var>, 3> parts{
      {{&alpha, Var::X}, {&beta, Var::Y}, {&gamma, Var::P}}};
  for (const auto& [e, v] : parts) {
    Expression s = simplify(*e);
    for (Var w : {Var::X, Var::Y, Var::P}) {
      if (w != v && contains(s, w)) {
        throw FinderError("factor " + print(*e) + " must depend on " + std::string(to_string(v)) + " only");
      }
    }
    if (contains_parameter(s)) throw FinderError("factor " + print(*e) + " must not contain parameters");
    if (s.is_zero()) throw FinderError("factors must not be zero");
  }
}

std::string_view to_string(MuForm f) {
  switch (f) {
    case MuForm::OfX: return "OfX";
    case MuForm::OfY: return "OfY";
    case MuForm::OfP: return "OfP";
    case MuForm::Product: return "Product";
    case MuForm::UserSupplied: return "UserSupplied";
  }
  return "?";
}

FinderOutcome find_mu_x(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  Partials d(ode);
  return single_variable(ode, cfg, Var::X, d(2, Var::Y) - d(1, Var::P), "d(a2)/dy = d(a1)/dp",
                         {{{d(0, Var::Y) - d(1, Var::X), ode.a1, "ratio (d(a0)/dy - d(a1)/dx)/a1"},
                           {d(0, Var::P) - d(2, Var::X), ode.a2, "ratio (d(a0)/dp - d(a2)/dx)/a2"}}},
                         MuForm::OfX, "single-variable formula mu(x)");
}

FinderOutcome find_mu_y(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  Partials d(ode);
  return single_variable(ode, cfg, Var::Y, d(2, Var::X) - d(0, Var::P), "d(a2)/dx = d(a0)/dp",
                         {{{d(1, Var::P) - d(2, Var::Y), ode.a2, "ratio (d(a1)/dp - d(a2)/dy)/a2"},
                           {d(1, Var::X) - d(0, Var::Y), ode.a0, "ratio (d(a1)/dx - d(a0)/dy)/a0"}}},
                         MuForm::OfY, "single-variable formula mu(y)");
}

FinderOutcome find_mu_p(const SecondOrderOde& ode, const SamplerConfig& cfg) {
  Partials d(ode);
  return single_variable(ode, cfg, Var::P, d(1, Var::X) - d(0, Var::Y), "d(a1)/dx = d(a0)/dy",
                         {{{d(2, Var::Y) - d(1, Var::P), ode.a1, "ratio (d(a2)/dy - d(a1)/dp)/a1"},
                           {d(2, Var::X) - d(0, Var::P), ode.a0, "ratio (d(a2)/dx - d(a0)/dp)/a0"}}},
                         MuForm::OfP, "single-variable formula mu(p)");
}

FinderOutcome find_mu_product(const SecondOrderOde& ode, const ProductFactorSpec& spec, const SamplerConfig& cfg) {
  return product_form(ode, spec, cfg, "product formula mu(alpha*beta*gamma)");
}

FinderOutcome find_mu_pairwise(const SecondOrderOde& ode, const ProductFactorSpec& spec,
                               const SamplerConfig& cfg) {
  bool a1 = is_one_like(spec.alpha) && simplify(spec.alpha).is_one();
  bool b1 = is_one_like(spec.beta) && simplify(spec.beta).is_one();
  bool g1 = is_one_like(spec.gamma) && simplify(spec.gamma).is_one();
  if (!a1 && !b1 && !g1) throw FinderError("pairwise form needs one factor equal to 1");
  std::string source = g1   ? "pairwise formula mu(alpha*beta)"
                       : b1 ? "pairwise formula mu(alpha*gamma)"
                            : "pairwise formula mu(beta*gamma)";
  return product_form(ode, spec, cfg, source);
}

FinderOutcome search_mu_monomial(const SecondOrderOde& ode, int range, const SamplerConfig& cfg) {
  if (range < 0) throw std::invalid_argument("range must be nonnegative");
  SamplerConfig c = working_config(ode, cfg);
  auto make = [](int m, int n, int k) {
    ProductFactorSpec s;
    s.alpha = m == 0 ? constant(1) : pow(x_(), m);
    s.beta = n == 0 ? constant(1) : pow(y_(), n);
    s.gamma = k == 0 ? constant(1) : pow(p_(), k);
    return s;
  };
  auto accept = [&](int m, int n, int k) -> FinderOutcome {
    ProductFactorSpec s = make(m, n, k);
    Expression mu = s.xi();
    SecondOrderOde scaled = ode.scaled(mu);
    MuResult r;
    r.form = MuForm::Product;
    r.spec = s;
    r.mu = mu;
    Bindings params = c.params;
    r.evaluate_mu = [mu, params](const Point3& at) { return evaluate(mu, at, params); };
    r.scaled_report = check_exact(scaled, cfg);
    r.scaled = std::move(scaled);
    r.source = "monomial search (" + std::to_string(m) + ", " + std::to_string(n) + ", " + std::to_string(k) + ")";
    if (!r.scaled_report.is_exact()) return fail("scaled equation is not exact");
    return {std::move(r), {}};
  };

  if (check_exact(ode, cfg).is_exact()) return accept(0, 0, 0);

  // Cheap numeric screen before the symbolic check.
  Sampler sampler(*c.box, c.seed, c.params, free_parameters(std::array<Expression, 3>{ode.a2, ode.a1, ode.a0}, c.params));
  std::vector<Sample> probes;
  for (int i = 0; i < 200 && probes.size() < 4; ++i) {
    Sample s = sampler.draw();
    try {
      evaluate(ode.a2, s.at, s.params);
      evaluate(ode.a1, s.at, s.params);
      evaluate(ode.a0, s.at, s.params);
      if (s.at.x != 0 && s.at.y != 0 && s.at.p != 0) probes.push_back(s);
    } catch (const DomainError&) {
    }
  }
  for (int m = -range; m <= range; ++m) {
    for (int n = -range; n <= range; ++n) {
      for (int k = -range; k <= range; ++k) {
        Expression mu = make(m, n, k).xi();
        std::array<Expression, 3> A{mu * ode.a2, mu * ode.a1, mu * ode.a0};
        std::array<Expression, 3> res{
            differentiate_raw(A[0], Var::Y) - differentiate_raw(A[1], Var::P),
            differentiate_raw(A[0], Var::X) - differentiate_raw(A[2], Var::P),
            differentiate_raw(A[1], Var::X) - differentiate_raw(A[2], Var::Y),
        };
        bool plausible = true;
        for (const auto& s : probes) {
          for (const auto& e : res) {
            try {
              if (std::abs(evaluate(e, s.at, s.params)) > 1e-7 * std::max(1.0, magnitude(e, s.at, s.params))) {
                plausible = false;
              }
            } catch (const DomainError&) {
            }
          }
          if (!plausible) break;
        }
        if (!plausible) continue;
        auto out = accept(m, n, k);
        if (out) return out;
      }
    }
  }
  return fail("no monomial factor with exponents in [-" + std::to_string(range) + ", " + std::to_string(range) + "]");
}

MuResult verify_mu(const SecondOrderOde& ode, const Expression& mu, const SamplerConfig& cfg) {
  Expression m = simplify(mu);
  if (m.is_zero()) throw FinderError("integrating factor is identically zero");
  SamplerConfig c = with_params(cfg, ode.params);
  if (!c.box) {
    std::array<Expression, 4> all{ode.a2, ode.a1, ode.a0, m};
    c.box = default_box(all);
  }
  MuResult r;
  r.form = MuForm::UserSupplied;
  r.mu = m;
  r.source = "user supplied";
  Bindings params = c.params;
  r.evaluate_mu = [m, params](const Point3& at) { return evaluate(m, at, params); };
  r.warnings = check_nonvanishing(r.evaluate_mu, c);
  r.scaled = ode.scaled(m);
  r.scaled_report = check_exact(*r.scaled, c);
  return r;
}

}  // namespace exode
