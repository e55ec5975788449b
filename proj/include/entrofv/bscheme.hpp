#pragma once

// B-functions of two-point convection-diffusion fluxes
//
//   F_{K,sigma} = tau a (B(-U d / a) f_K - B(U d / a) f_L)
//
// Admissible B satisfy B(0) = 1, B Lipschitz and B(-x) - B(x) = x.

#include "entrofv/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace entrofv {

enum class BKind
{
  Upwind,
  Centered,
  ScharfetterGummel,
  Custom
};

class BScheme
{
public:
  using Function = std::function<double(double)>;

  static BScheme upwind() { return BScheme(BKind::Upwind, "upwind"); }
  static BScheme centered() { return BScheme(BKind::Centered, "centered"); }
  static BScheme scharfetter_gummel() { return BScheme(BKind::ScharfetterGummel, "sg"); }

  /// User-supplied B. The identities B(0) = 1 and B(-x) - B(x) = x are
  /// sampled on [-50, 50] and a DataError is thrown when they fail. Without
  /// `derivative` a central difference is used.
  static BScheme custom(std::string name, Function b, Function derivative = {})
  {
    BScheme s(BKind::Custom, std::move(name));
    s.b_ = std::move(b);
    s.db_ = std::move(derivative);
    s.check_identities();
    return s;
  }

  /// Parses "upwind", "centered" or "sg" (also "scharfetter-gummel").
  static std::optional<BScheme> from_name(std::string_view name)
  {
    if (name == "upwind") return upwind();
    if (name == "centered") return centered();
    if (name == "sg" || name == "scharfetter-gummel") return scharfetter_gummel();
    return std::nullopt;
  }

  BKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double operator()(double x) const
  {
    switch (kind_) {
      case BKind::Upwind: return 1.0 + std::max(-x, 0.0);
      case BKind::Centered: return 1.0 - 0.5 * x;
      case BKind::ScharfetterGummel: return bernoulli(x);
      case BKind::Custom: return b_(x);
    }
    return 0.0;
  }

  /// B'(x). For upwind the left derivative is returned at the kink x = 0.
  double derivative(double x) const
  {
    switch (kind_) {
      case BKind::Upwind: return x < 0 ? -1.0 : 0.0;
      case BKind::Centered: return -0.5;
      case BKind::ScharfetterGummel: return bernoulli_derivative(x);
      case BKind::Custom:
        if (db_) return db_(x);
        {
          const double h = 1e-6 * std::max(1.0, std::abs(x));
          return (b_(x + h) - b_(x - h)) / (2 * h);
        }
    }
    return 0.0;
  }

  /// x / (e^x - 1) with B(0) = 1.
  static double bernoulli(double x)
  {
    if (std::abs(x) < 1e-5) return 1.0 - x / 2 + x * x / 12;
    return x / std::expm1(x);
  }

  static double bernoulli_derivative(double x)
  {
    if (std::abs(x) < 1e-2) {
      const double x2 = x * x;
      return -0.5 + x / 6 - x * x2 / 180 + x * x2 * x2 / 5040;
    }
    // B'(x) = B(x) (1 - B(-x)) / x, since e^x / (e^x - 1) = B(-x) / x.
    return bernoulli(x) * (1.0 - bernoulli(-x)) / x;
  }

private:
  BScheme(BKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  void check_identities() const
  {
    if (std::abs(b_(0.0) - 1.0) > 1e-12) throw DataError("custom B-function: B(0) != 1");
    for (int i = 0; i <= 1000; ++i) {
      const double x = -50.0 + 0.1 * i;
      const double lhs = b_(-x) - b_(x);
      if (!std::isfinite(lhs) || std::abs(lhs - x) > 1e-12 * std::max(1.0, std::abs(x)))
        throw DataError("custom B-function: B(-x) - B(x) != x at x = " + std::to_string(x));
      if (i > 0 && !(std::abs(b_(x) - b_(x - 0.1)) <= 1e6 * 0.1))
        throw DataError("custom B-function: not Lipschitz near x = " + std::to_string(x));
    }
  }

  BKind kind_;
  std::string name_;
  Function b_;
  Function db_;
};

inline double eval_b(const BScheme& scheme, double x) { return scheme(x); }

}  // namespace entrofv
