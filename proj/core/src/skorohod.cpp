#include "reflectsde/skorohod.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "reflectsde/csv.hpp"
#include "reflectsde/error.hpp"

namespace reflectsde {

namespace {

void append(std::vector<double>& out, const Vec& v) { out.insert(out.end(), v.data(), v.data() + v.size()); }

void require_window(const PiecewiseLinearPath& path, double s, double t) {
  const double slack = 1e-12 * std::max(1.0, path.horizon());
  if (!(s >= 0.0) || !(s <= t) || !(t <= path.horizon() + slack)) {
    throw Error(Errc::WindowOutOfRange, "window [" + std::to_string(s) + ", " + std::to_string(t) + "]");
  }
}

double variation_at(const SkorohodSolution& sol, double t) { return total_variation(sol.phi, 0.0, t); }

}  // namespace

PiecewiseLinearPath SkorohodSolution::driver() const {
  std::vector<double> values(xi.raw_values().begin(), xi.raw_values().end());
  const auto phi_values = phi.raw_values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= phi_values[i];
  return PiecewiseLinearPath(std::vector<double>(xi.times().begin(), xi.times().end()), std::move(values), xi.dim());
}

SkorohodSolution solve(const DomainSpec& domain, const PiecewiseLinearPath& w, int substeps) {
  if (w.dim() != domain.dim()) throw Error(Errc::DomainMismatch, "driver and domain dimensions differ");
  if (substeps < 1) throw Error(Errc::ConfigError, "substeps must be >= 1");

  Vec xi = w.value(0);
  if (domain.classify(xi) == Membership::Exterior) {
    throw Error(Errc::StartOutsideClosure, "w(0) lies outside the closure of the domain");
  }
  const double reach = domain.r0() / 2.0;
  const int dim = w.dim();
  Vec phi = Vec::Zero(dim);

  const std::size_t knots = (w.size() - 1) * static_cast<std::size_t>(substeps) + 1;
  std::vector<double> times;
  std::vector<double> xi_values;
  std::vector<double> phi_values;
  std::vector<double> variation;
  std::vector<std::uint8_t> contact;
  times.reserve(knots);
  xi_values.reserve(knots * static_cast<std::size_t>(dim));
  phi_values.reserve(knots * static_cast<std::size_t>(dim));
  variation.reserve(knots);
  contact.reserve(knots);

  auto record = [&](double t, double var) {
    times.push_back(t);
    append(xi_values, xi);
    append(phi_values, phi);
    variation.push_back(var);
    contact.push_back(domain.classify(xi) == Membership::Boundary ? 1 : 0);
  };

  double var = 0.0;
  record(0.0, var);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const Vec w0 = w.value(i);
    const Vec w1 = w.value(i + 1);
    const double t0 = w.time(i);
    const double t1 = w.time(i + 1);
    Vec w_prev = w0;
    for (int j = 1; j <= substeps; ++j) {
      const double frac = static_cast<double>(j) / substeps;
      const Vec w_next = (j == substeps) ? w1 : Vec(w0 + frac * (w1 - w0));
      const Vec step = w_next - w_prev;
      if (step.norm() >= reach) {
        throw Error(Errc::ProjectionOutOfReach, "substep displacement exceeds r0 / 2; raise substeps");
      }
      const Vec y = xi + step;
      const Vec correction = domain.projection_correction(y);
      xi = y + correction;
      phi += correction;
      var += correction.norm();
      record(j == substeps ? t1 : t0 + frac * (t1 - t0), var);
      w_prev = w_next;
    }
  }

  SkorohodSolution sol{
      PiecewiseLinearPath(times, std::move(xi_values), dim),
      PiecewiseLinearPath(std::move(times), std::move(phi_values), dim),
      std::move(variation),
      std::move(contact),
      std::make_shared<const DomainSpec>(domain),
  };
  return sol;
}

SkorohodSolution solve_refined(const DomainSpec& domain, const PiecewiseLinearPath& w, int substeps,
                               RefinementBudget budget) {
  SkorohodSolution coarse = solve(domain, w, substeps);
  for (int d = 0; d < budget.max_doublings; ++d) {
    SkorohodSolution fine = solve(domain, w, substeps * 2);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Vec a = coarse.xi.value(i * static_cast<std::size_t>(substeps));
      const Vec b = fine.xi.value(i * static_cast<std::size_t>(substeps) * 2);
      diff = std::max(diff, (a - b).norm());
      scale = std::max(scale, b.norm());
    }
    if (diff <= budget.rel_tolerance * (1.0 + scale)) return fine;
    coarse = std::move(fine);
    substeps *= 2;
  }
  throw Error(Errc::NonConvergent, "xi still moving after " + std::to_string(budget.max_doublings) + " doublings");
}

SkorohodSolution solve_halfline_1d(const PiecewiseLinearPath& w) {
  if (w.dim() != 1) throw Error(Errc::DomainMismatch, "half-line reflection needs a one-dimensional driver");
  if (w.coord(0, 0) < 0.0) throw Error(Errc::StartOutsideClosure, "w(0) < 0");

  const DomainSpec halfline = DomainSpec::half_space(Vec::Ones(1), 0.0);
  std::vector<double> xi(w.size());
  std::vector<double> phi(w.size());
  std::vector<std::uint8_t> contact(w.size());
  double running = 0.0;  // max(0, max_{s <= t} -w(s))
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wi = w.coord(i, 0);
    running = std::max(running, -wi);
    phi[i] = running;
    xi[i] = wi + running;
    contact[i] = halfline.classify(Vec::Constant(1, xi[i])) == Membership::Boundary ? 1 : 0;
  }
  std::vector<double> times(w.times().begin(), w.times().end());
  std::vector<double> variation = phi;  // phi is nondecreasing
  return SkorohodSolution{
      PiecewiseLinearPath(times, std::move(xi), 1),
      PiecewiseLinearPath(std::move(times), std::move(phi), 1),
      std::move(variation),
      std::move(contact),
      std::make_shared<const DomainSpec>(halfline),
  };
}

BoundCheck check_xi_variation_bound(const SkorohodSolution& sol, const PiecewiseLinearPath& w, double s, double t) {
  require_window(sol.xi, s, t);
  require_window(w, s, t);
  BoundCheck out;
  out.lhs = total_variation(sol.xi, s, t);
  out.rhs = kXiVariationConstant * total_variation(w, s, t);
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

BoundCheck check_holder_stability(const DomainSpec& domain, const SkorohodSolution& a, const SkorohodSolution& b,
                                  double t) {
  if (a.xi.dim() != domain.dim() || b.xi.dim() != domain.dim()) {
    throw Error(Errc::DomainMismatch, "solution dimension differs from the domain");
  }
  if ((a.domain && !(*a.domain == domain)) || (b.domain && !(*b.domain == domain))) {
    throw Error(Errc::DomainMismatch, "solutions were computed on a different domain");
  }
  require_window(a.xi, 0.0, t);
  require_window(b.xi, 0.0, t);

  const PiecewiseLinearPath wa = a.driver();
  const PiecewiseLinearPath wb = b.driver();
  const double v = variation_at(a, t) + variation_at(b, t);
  const double w_gap = (wa.eval(t) - wb.eval(t)).norm();
  const double w_sup = sup_distance(wa, wb, t);
  const double growth = std::isinf(domain.r0()) ? 1.0 : std::exp(v / domain.r0());

  BoundCheck out;
  out.lhs = (a.xi.eval(t) - b.xi.eval(t)).squaredNorm();
  out.rhs = (w_gap * w_gap + 4.0 * v * w_sup) * growth;
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

Diagnostics diagnostics(const SkorohodSolution& sol, const PiecewiseLinearPath& w, double s, double t, double theta) {
  require_window(sol.phi, s, t);
  require_window(w, s, t);
  return Diagnostics{
      total_variation(sol.phi, s, t),
      sup_osc(w, s, t),
      holder_quotient(w, s, t, theta),
  };
}

InvariantReport check_invariants(const DomainSpec& domain, const PiecewiseLinearPath& w, const SkorohodSolution& sol) {
  InvariantReport rep;
  auto fail = [&](bool& flag, const std::string& why) {
    if (flag && rep.first_failure.empty()) rep.first_failure = why;
    flag = false;
  };

  const std::size_t n = sol.xi.size();
  if ((sol.xi.value(0) - w.value(0)).norm() != 0.0) fail(rep.decomposition, "xi(0) != w(0)");
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sol.xi.time(k);
    const Vec xi = sol.xi.value(k);
    const Vec phi = sol.phi.value(k);
    const Vec wt = w.eval(t);
    const double scale = 1.0 + std::max({wt.norm(), phi.norm(), xi.norm()});
    if ((xi - wt - phi).norm() > 1e-12 * scale) {
      fail(rep.decomposition, "xi != w + phi at knot " + std::to_string(k));
    }
    if (domain.distance_to_closure(xi) > domain.boundary_band(xi)) {
      fail(rep.containment, "xi outside the closure at knot " + std::to_string(k));
    }
    if (k > 0) {
      const Vec dphi = phi - sol.phi.value(k - 1);
      const double mag = dphi.norm();
      running += mag;
      if (!sol.contact[k] && !sol.contact[k - 1] && mag > kSupportTolerance) {
        fail(rep.support, "phi moved away from the boundary at knot " + std::to_string(k));
      }
      if (mag > kSupportTolerance) {
        if (domain.classify(xi) != Membership::Boundary) {
          fail(rep.direction, "phi moved while xi is off the boundary at knot " + std::to_string(k));
        } else if (domain.normal_cone_angle(xi, dphi) > kDirectionTolerance) {
          fail(rep.direction, "phi increment outside the normal cone at knot " + std::to_string(k));
        }
      }
      if (sol.phi_variation[k] < sol.phi_variation[k - 1]) {
        fail(rep.variation, "phi variation decreased at knot " + std::to_string(k));
      }
    }
    if (std::abs(sol.phi_variation[k] - running) > 1e-12 * (1.0 + running)) {
      fail(rep.variation, "phi variation differs from the total variation at knot " + std::to_string(k));
    }
  }
  return rep;
}

void write_csv(std::ostream& out, const SkorohodSolution& sol) {
  const int d = sol.xi.dim();
  out << 't';
  for (int c = 1; c <= d; ++c) out << ",xi_" << c;
  for (int c = 1; c <= d; ++c) out << ",phi_" << c;
  out << ",phi_var,contact\n";
  for (std::size_t i = 0; i < sol.xi.size(); ++i) {
    out << csv::format_double(sol.xi.time(i));
    for (int c = 0; c < d; ++c) out << ',' << csv::format_double(sol.xi.coord(i, c));
    for (int c = 0; c < d; ++c) out << ',' << csv::format_double(sol.phi.coord(i, c));
    out << ',' << csv::format_double(sol.phi_variation[i]) << ',' << static_cast<int>(sol.contact[i]) << '\n';
  }
}

SkorohodSolution read_solution_csv(std::istream& in) {
  std::string line;
  do {
    if (!std::getline(in, line)) throw Error(Errc::ParseError, "missing solution CSV header");
  } while (!line.empty() && line.front() == '#');
  const auto header = csv::split(csv::trim(line));
  if (header.size() < 5 || (header.size() - 3) % 2 != 0 || csv::trim(header[0]) != "t" ||
      csv::trim(header.back()) != "contact") {
    throw Error(Errc::ParseError, "solution CSV header must be t,xi_*,phi_*,phi_var,contact");
  }
  const int d = static_cast<int>((header.size() - 3) / 2);
  std::vector<double> times;
  std::vector<double> xi;
  std::vector<double> phi;
  std::vector<double> var;
  std::vector<std::uint8_t> contact;
  while (std::getline(in, line)) {
    const auto trimmed = csv::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto f = csv::split(trimmed);
    if (f.size() != header.size()) throw Error(Errc::ParseError, "solution CSV row has the wrong field count");
    times.push_back(csv::parse_double(f[0]));
    for (int c = 0; c < d; ++c) xi.push_back(csv::parse_double(f[static_cast<std::size_t>(1 + c)]));
    for (int c = 0; c < d; ++c) phi.push_back(csv::parse_double(f[static_cast<std::size_t>(1 + d + c)]));
    var.push_back(csv::parse_double(f[static_cast<std::size_t>(1 + 2 * d)]));
    const auto flag = csv::trim(f.back());
    if (flag != "0" && flag != "1") throw Error(Errc::ParseError, "contact must be 0 or 1");
    contact.push_back(flag == "1" ? 1 : 0);
  }
  return SkorohodSolution{
      PiecewiseLinearPath(times, std::move(xi), d),
      PiecewiseLinearPath(std::move(times), std::move(phi), d),
      std::move(var),
      std::move(contact),
      nullptr,
  };
}

}  // namespace reflectsde
