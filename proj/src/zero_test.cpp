#include "exode/zero_test.hpp"

#include <algorithm>
#include <cmath>

#include "exode/simplify.hpp"

namespace exode {

namespace {

using K = Expression::Kind;

constexpr int kAttemptFactor = 50;

void mark_positive(const Expression& e, std::array<bool, 3>& pos) {
  for (Var v : {Var::X, Var::Y, Var::P}) {
    if (contains(e, v)) pos[static_cast<std::size_t>(v)] = true;
  }
}

void scan(const Expression& e, std::array<bool, 3>& pos) {
  switch (e.kind()) {
    case K::Quotient:
      scan(e.operand(0), pos);
      mark_positive(e.operand(1), pos);
      return;
    case K::Power: {
      const Expression& ex = e.operand(1);
      bool integer = ex.is_constant() && ex.value().get_den() == 1;
      if (!integer || sgn(ex.value()) < 0) mark_positive(e.operand(0), pos);
      scan(e.operand(0), pos);
      scan(ex, pos);
      return;
    }
    case K::Function:
      if (e.function() == Func::Ln || e.function() == Func::Sqrt) {
        mark_positive(e.operand(0), pos);
      }
      scan(e.operand(0), pos);
      return;
    default:
      for (const auto& o : e.operands()) scan(o, pos);
  }
}

}  // namespace

Box Box::cube(double lo, double hi) {
  Box b;
  for (auto& r : b.ranges) r = {lo, hi};
  return b;
}

bool Box::is_valid() const {
  return std::all_of(ranges.begin(), ranges.end(), [](const auto& r) {
    return std::isfinite(r.first) && std::isfinite(r.second) && r.first < r.second;
  });
}

Box default_box(std::span<const Expression> exprs) {
  std::array<bool, 3> pos{false, false, false};
  for (const auto& e : exprs) scan(e, pos);
  Box b;
  for (std::size_t i = 0; i < 3; ++i) {
    if (pos[i]) b.ranges[i] = {0.1, 2.1};
  }
  return b;
}

std::vector<std::string> free_parameters(std::span<const Expression> exprs, const Bindings& bound) {
  std::set<std::string> names;
  for (const auto& e : exprs) {
    for (auto& n : parameters(e)) {
      if (!bound.contains(n)) names.insert(std::move(n));
    }
  }
  return {names.begin(), names.end()};
}

Sampler::Sampler(const Box& box, std::uint64_t seed, Bindings fixed, std::vector<std::string> free_params)
    : box_(box), rng_(seed), fixed_(std::move(fixed)), free_(std::move(free_params)) {
  if (!box_.is_valid()) throw SamplingError("degenerate sampling box");
}

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

Sample Sampler::draw() {
  Sample s;
  s.at.x = uniform(box_.ranges[0].first, box_.ranges[0].second);
  s.at.y = uniform(box_.ranges[1].first, box_.ranges[1].second);
  s.at.p = uniform(box_.ranges[2].first, box_.ranges[2].second);
  s.params = fixed_;
  for (const auto& n : free_) s.params[n] = uniform(0.5, 1.5);
  return s;
}

Sample Sampler::redraw(const Sample& s, const std::set<Var>& which) {
  Sample r = s;
  for (Var v : which) r.at[v] = uniform(box_[v].first, box_[v].second);
  return r;
}

std::string_view to_string(ZeroVerdict::Kind k) {
  switch (k) {
    case ZeroVerdict::Kind::ProvenZero: return "ProvenZero";
    case ZeroVerdict::Kind::SampledZero: return "SampledZero";
    case ZeroVerdict::Kind::NonZero: return "NonZero";
  }
  return "?";
}

double magnitude(const Expression& e, const Point3& at, const Bindings& params) {
  if (!e.is(K::Sum)) return std::abs(evaluate(e, at, params));
  double m = 0.0;
  for (const auto& t : e.operands()) m += std::abs(evaluate(t, at, params));
  return m;
}

ZeroVerdict is_identically_zero(const Expression& e, const SamplerConfig& cfg) {
  ZeroVerdict v;
  v.tol = cfg.tol;
  v.seed = cfg.seed;
  Expression s = simplify(e);
  if (s.is_zero()) return v;
  if (s.is_constant()) {
    v.kind = ZeroVerdict::Kind::NonZero;
    v.witness = Sample{};
    v.witness_value = to_double(s.value());
    return v;
  }
  if (cfg.samples < 1) throw SamplingError("sample count must be positive");
  std::array<Expression, 1> es{e};
  Box box = cfg.box ? *cfg.box : default_box(es);
  Sampler sampler(box, cfg.seed, cfg.params, free_parameters(es, cfg.params));
  int seen = 0;
  int attempts = 0;
  while (seen < cfg.samples && attempts < kAttemptFactor * cfg.samples) {
    ++attempts;
    Sample pt = sampler.draw();
    double val;
    double scale;
    try {
      val = evaluate(e, pt.at, pt.params);
      scale = magnitude(e, pt.at, pt.params);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(val) || !std::isfinite(scale)) continue;
    ++seen;
    v.max_abs = std::max(v.max_abs, std::abs(val));
    if (std::abs(val) > cfg.tol * std::max(1.0, scale)) {
      v.kind = ZeroVerdict::Kind::NonZero;
      v.samples = seen;
      v.witness = pt;
      v.witness_value = val;
      return v;
    }
  }
  if (seen == 0) throw SamplingError("no sample point inside the domain of " + print(e));
  v.kind = ZeroVerdict::Kind::SampledZero;
  v.samples = seen;
  return v;
}

DependenceVerdict depends_only_on(const Expression& e, const std::set<Var>& keep,
                                  const SamplerConfig& cfg) {
  DependenceVerdict d;
  std::set<Var> excluded;
  for (Var v : {Var::X, Var::Y, Var::P}) {
    if (!keep.contains(v)) excluded.insert(v);
  }
  Expression s = simplify(e);
  bool syntactic = std::none_of(excluded.begin(), excluded.end(), [&](Var v) { return contains(s, v); });
  if (syntactic) return d;
  bool proven = std::all_of(excluded.begin(), excluded.end(),
                            [&](Var v) { return differentiate(s, v).is_zero(); });
  if (proven) return d;

  std::array<Expression, 1> es{e};
  Box box = cfg.box ? *cfg.box : default_box(es);
  Sampler sampler(box, cfg.seed, cfg.params, free_parameters(es, cfg.params));
  auto eval = [&](const Sample& pt) { return evaluate(e, pt.at, pt.params); };
  int seen = 0;
  for (int attempt = 0; attempt < kAttemptFactor * cfg.samples && seen < cfg.samples; ++attempt) {
    Sample a = sampler.draw();
    Sample b = sampler.redraw(a, excluded);
    double va;
    double vb;
    try {
      va = eval(a);
      vb = eval(b);
    } catch (const DomainError&) {
      continue;
    }
    if (!std::isfinite(va) || !std::isfinite(vb)) continue;
    ++seen;
    double scale = std::max({1.0, std::abs(va), std::abs(vb)});
    if (std::abs(va - vb) > cfg.tol * scale) {
      d.kind = DependenceVerdict::Kind::Dependent;
      d.samples = seen;
      d.witness = std::make_pair(a, b);
      d.witness_values = {va, vb};
      return d;
    }
  }
  if (seen == 0) throw SamplingError("no sample point inside the domain of " + print(e));
  d.kind = DependenceVerdict::Kind::SampledIndependent;
  d.samples = seen;
  return d;
}

}  // namespace exode
