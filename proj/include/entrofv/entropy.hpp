#pragma once

// Discrete relative entropies, their dissipations, norms and decay-rate fits.
//
// The functionals are evaluated in terms of relative deviations
// d = f / f_inf - 1 with expm1/log1p, so they stay accurate down to values
// far below machine epsilon relative to the initial entropy.

#include "entrofv/dd_scheme.hpp"
#include "entrofv/fp_scheme.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace entrofv {

/// Convex phi with phi(1) = phi'(1) = 0: Boltzmann x log x - (x - 1) or
/// power (x^p - p x)/(p - 1) + 1 with p in (1, 2].
class PhiFunction
{
public:
  static PhiFunction boltzmann() { return PhiFunction(1.0); }
  static PhiFunction power(double p)
  {
    if (!(p > 1.0 && p <= 2.0)) throw DataError("power entropy needs p in (1, 2]");
    return PhiFunction(p);
  }

  bool is_boltzmann() const { return p_ == 1.0; }
  double p() const { return p_; }

  double operator()(double x) const { return of_deviation(x - 1.0); }

  /// phi(1 + d), accurate for small d.
  double of_deviation(double d) const
  {
    const double x = 1.0 + d;
    if (x < 0) throw DataError("phi evaluated at a negative argument");
    if (is_boltzmann()) {
      if (x == 0.0) return 1.0;
      return x * std::log1p(d) - d;
    }
    if (p_ == 2.0) return d * d;
    if (x == 0.0) return 1.0;
    return (std::expm1(p_ * std::log1p(d)) - p_ * d) / (p_ - 1.0);
  }

  double derivative(double x) const
  {
    if (is_boltzmann()) return std::log(x);
    if (p_ == 2.0) return 2.0 * (x - 1.0);
    return p_ / (p_ - 1.0) * (std::pow(x, p_ - 1.0) - 1.0);
  }

  double second_derivative(double x) const
  {
    if (is_boltzmann()) return 1.0 / x;
    return p_ * std::pow(x, p_ - 2.0);
  }

  /// x phi'(x) - phi(x).
  double conjugate(double x) const { return x * derivative(x) - (*this)(x); }

private:
  explicit PhiFunction(double p) : p_(p) {}
  double p_;
};

/// phi-mean (Phi(s) - Phi(t)) / (phi'(s) - phi'(t)) with Phi = s phi' - phi.
inline double phi_mean(const PhiFunction& phi, double s, double t)
{
  const double den = phi.derivative(s) - phi.derivative(t);
  if (s == t || den == 0.0) return s;
  return (phi.conjugate(s) - phi.conjugate(t)) / den;
}

namespace detail {

inline void require_positive(const Vector& f_inf)
{
  for (Index k = 0; k < f_inf.size(); ++k)
    if (!(f_inf[k] > 0)) throw DataError("reference state must be positive (cell " + std::to_string(k) + ")");
}

}  // namespace detail

/// sum_K m(K) phi(f_K / f_inf_K) f_inf_K.
inline double relative_phi_entropy(const Mesh& mesh, const Vector& f, const Vector& f_inf, const PhiFunction& phi)
{
  detail::require_positive(f_inf);
  double h = 0;
  for (Index k = 0; k < f.size(); ++k)
    h += mesh.cell(k).measure * phi.of_deviation((f[k] - f_inf[k]) / f_inf[k]) * f_inf[k];
  return h;
}

/// sum_sigma tau a (D h)(D phi'(h)) f_B^inf with h = f/f_inf and h = 1 on
/// Dirichlet edges.
inline double phi_dissipation(const Mesh& mesh, const TransportData& data, const BScheme& scheme, const Vector& f,
                              const Vector& f_inf, const PhiFunction& phi)
{
  detail::require_positive(f_inf);
  double d = 0;
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& e = mesh.edge(ei);
    if (e.tag == EdgeTag::Neumann) continue;
    const Index k = e.cells[0];
    const double hk = f[k] / f_inf[k];
    const double hl = e.interior() ? f[e.cells[1]] / f_inf[e.cells[1]] : 1.0;
    if (hk == hl) continue;
    const double weight = edge_steady_weight(mesh, data, scheme, f_inf, ei);
    d += e.transmissibility * data.diffusion[ei] * (hl - hk) * (phi.derivative(hl) - phi.derivative(hk)) * weight;
  }
  return d;
}

/// sum_K m(K) [ (f^(m+1) - g^(m+1))/(m+1) - g^m (f - g) ] for g = f_inf.
inline double entrophy(const Mesh& mesh, const Vector& f, const Vector& f_inf, double m)
{
  double s = 0;
  for (Index k = 0; k < f.size(); ++k) {
    const double g = f_inf[k];
    double v;
    if (g > 0) {
      const double d = (f[k] - g) / g;
      v = std::pow(g, m + 1) * (std::expm1((m + 1) * std::log1p(d)) / (m + 1) - d);
    } else {
      v = std::pow(std::abs(f[k]), m + 1) / (m + 1);
    }
    s += mesh.cell(k).measure * v;
  }
  return s;
}

/// sum_sigma tau (D(f^m - f_inf^m))^2; the difference vanishes on Dirichlet
/// edges since both states share the boundary data.
inline double entrophy_dissipation(const Mesh& mesh, const Vector& f, const Vector& f_inf, double m)
{
  double s = 0;
  for (const Edge& e : mesh.edges()) {
    if (e.tag == EdgeTag::Neumann) continue;
    const Index k = e.cells[0];
    const double wk = std::pow(f[k], m) - std::pow(f_inf[k], m);
    const double wl = e.interior() ? std::pow(f[e.cells[1]], m) - std::pow(f_inf[e.cells[1]], m) : 0.0;
    s += e.transmissibility * (wl - wk) * (wl - wk);
  }
  return s;
}

/// Relative entropy of a drift-diffusion state with respect to `ref`:
/// sum m(K)[H(N) - H(N_ref) - log(N_ref)(N - N_ref) + same for P]
///   + lambda^2/2 sum tau (D(V - V_ref))^2,   H(x) = x log x - x + 1.
/// `v_dirichlet_delta` is V^D - V^D_ref per edge (empty = zero).
inline double dd_entropy(const Mesh& mesh, const DdState& s, const DdState& ref, double lambda,
                         const Vector& v_dirichlet_delta = {})
{
  const auto boltz = PhiFunction::boltzmann();
  const auto part = [&](double u, double r) {
    if (!(u > 0) || !(r > 0)) throw DataError("densities must be positive");
    return r * boltz.of_deviation((u - r) / r);
  };
  double e = 0;
  for (Index k = 0; k < s.n.size(); ++k)
    e += mesh.cell(k).measure * (part(s.n[k], ref.n[k]) + part(s.p[k], ref.p[k]));
  double q = 0;
  for (Index ei = 0; ei < static_cast<Index>(mesh.num_edges()); ++ei) {
    const Edge& ed = mesh.edge(ei);
    if (ed.tag == EdgeTag::Neumann) continue;
    const Index k = ed.cells[0];
    const double wk = s.v[k] - ref.v[k];
    double wl = 0.0;
    if (ed.interior()) wl = s.v[ed.cells[1]] - ref.v[ed.cells[1]];
    else if (v_dirichlet_delta.size() > 0) wl = v_dirichlet_delta[ei];
    q += ed.transmissibility * (wl - wk) * (wl - wk);
  }
  return e + 0.5 * lambda * lambda * q;
}

/// (sum_K m(K) |f_K - g_K|^p)^(1/p).
inline double lp_distance(const Mesh& mesh, const Vector& f, const Vector& g, double p)
{
  if (!(p >= 1)) throw DataError("lp_distance needs p >= 1");
  double s = 0;
  for (Index k = 0; k < f.size(); ++k) s += mesh.cell(k).measure * std::pow(std::abs(f[k] - g[k]), p);
  return std::pow(s, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Traces

/// Time series of diagnostics; column 0 is t, column 1 is dt.
struct EntropyTrace
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit EntropyTrace(std::vector<std::string> names = {}) : columns(std::move(names)) {}

  Index column(const std::string& name) const
  {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<Index>(i);
    throw DataError("trace has no column '" + name + "'");
  }

  std::vector<double> values(const std::string& name) const
  {
    const Index c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  std::vector<double> times() const { return values("t"); }
  std::size_t size() const { return rows.size(); }

  void add(std::vector<double> row)
  {
    if (row.size() != columns.size()) throw Error("trace row has wrong width");
    if (!rows.empty() && !(row[0] > rows.back()[0])) throw Error("trace times must increase");
    rows.push_back(std::move(row));
  }
};

struct RateFit
{
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log residuals
  std::size_t samples = 0;
};

/// Least-squares fit of log(value) = c - rate t over samples with t in [t_a, t_b].
inline RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value, double t_a, double t_b)
{
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_a || t[i] > t_b) continue;
    if (!(value[i] > 0)) throw DataError("non-positive value in the fit window at t = " + std::to_string(t[i]));
    pts.emplace_back(t[i], std::log(value[i]));
  }
  if (pts.size() < 5) throw DataError("fit window holds fewer than 5 samples");
  double mt = 0, my = 0;
  for (const auto& [x, y] : pts) mt += x, my += y;
  mt /= pts.size();
  my /= pts.size();
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) sxx += (x - mt) * (x - mt), sxy += (x - mt) * (y - my);
  RateFit fit;
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.intercept = my - slope * mt;
  double r2 = 0;
  for (const auto& [x, y] : pts) r2 += std::pow(y - (fit.intercept + slope * x), 2);
  fit.residual = std::sqrt(r2 / pts.size());
  fit.samples = pts.size();
  return fit;
}

inline RateFit fit_decay_rate(const EntropyTrace& trace, const std::string& field, double t_a, double t_b)
{
  return fit_decay_rate(trace.times(), trace.values(field), t_a, t_b);
}

/// Lower bound (1/k) log(1 + k xi beta alpha m_inf / (C_P M_inf)) for the FP decay rate.
inline double theoretical_rate_fp(double alpha, double m_inf, double M_inf, double beta, double xi, double c_p,
                                  double k)
{
  return std::log1p(k * xi * beta * alpha * m_inf / (c_p * M_inf)) / k;
}

/// Lower bound (1/k) log(1 + k xi (m_D)^(m-1) / C_P) for the PME entrophy decay rate.
inline double theoretical_rate_pme(double m_d, double m, double xi, double c_p, double k)
{
  return std::log1p(k * xi * std::pow(m_d, m - 1) / c_p) / k;
}

inline constexpr double unit_square_poincare = 1.0 / (std::numbers::pi * std::numbers::pi);

}  // namespace entrofv
