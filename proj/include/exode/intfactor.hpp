#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exode/exactness.hpp"

namespace exode {

/// E = (d(a0)/dy - d(a1)/dx) a2 + (d(a2)/dx - d(a0)/dp) a1 + (d(a1)/dp - d(a2)/dy) a0.
/// A nonzero E rules out factors of the forms mu(x,y,p), mu(x,y), mu(x,p), mu(y,p).
struct Obstruction {
  Expression combination;
  ZeroVerdict verdict;

  bool rules_out_factor() const { return verdict.kind == ZeroVerdict::Kind::NonZero; }
};

Obstruction obstruction(const SecondOrderOde& ode, const SamplerConfig& cfg = {});

/// mu = m(xi) with xi = alpha(x) * beta(y) * gamma(p).
struct ProductFactorSpec {
  Expression alpha = constant(1);
  Expression beta = constant(1);
  Expression gamma = constant(1);

  Expression xi() const;
  /// Throws FinderError unless each factor depends on its own variable only.
  void validate() const;
};

enum class MuForm { OfX, OfY, OfP, Product, UserSupplied };
std::string_view to_string(MuForm f);

class FinderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MuResult {
  MuForm form = MuForm::UserSupplied;
  std::optional<ProductFactorSpec> spec;
  /// Closed form, when available (up to a positive constant).
  std::optional<Expression> mu;
  /// Always usable; backed by quadrature when `mu` is absent.
  std::function<double(const Point3&)> evaluate_mu;
  std::string source;
  /// Scaled coefficients mu*a2, mu*a1, mu*a0 (closed form only).
  std::optional<SecondOrderOde> scaled;
  ExactnessReport scaled_report;
  std::vector<std::string> warnings;
};

/// A finder either returns a factor or names the first hypothesis that failed.
struct FinderOutcome {
  std::optional<MuResult> result;
  std::string failed_hypothesis;

  explicit operator bool() const { return result.has_value(); }
};

FinderOutcome find_mu_x(const SecondOrderOde& ode, const SamplerConfig& cfg = {});
FinderOutcome find_mu_y(const SecondOrderOde& ode, const SamplerConfig& cfg = {});
FinderOutcome find_mu_p(const SecondOrderOde& ode, const SamplerConfig& cfg = {});
FinderOutcome find_mu_product(const SecondOrderOde& ode, const ProductFactorSpec& spec,
                              const SamplerConfig& cfg = {});
/// Product form with at least one factor equal to 1.
FinderOutcome find_mu_pairwise(const SecondOrderOde& ode, const ProductFactorSpec& spec,
                               const SamplerConfig& cfg = {});
/// First exponent triple (m, n, k) in lexicographic order with |m|,|n|,|k| <= range
/// such that x^m y^n p^k is an integrating factor.
FinderOutcome search_mu_monomial(const SecondOrderOde& ode, int range = 4, const SamplerConfig& cfg = {});

/// Checks a user-supplied factor. Throws FinderError when mu vanishes at a
/// sampled point.
MuResult verify_mu(const SecondOrderOde& ode, const Expression& mu, const SamplerConfig& cfg = {});

}  // namespace exode
