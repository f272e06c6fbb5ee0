#include "reflectsde/path.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "reflectsde/csv.hpp"
#include "reflectsde/error.hpp"

namespace reflectsde {

namespace {

struct WindowPoint {
  double t;
  Vec x;
};

void check_window(const PiecewiseLinearPath& path, double& s, double& t) {
  const double slack = 1e-12 * std::max(1.0, path.horizon());
  if (!(s >= 0.0) || !(s <= t) || !(t <= path.horizon() + slack)) {
    throw Error(Errc::TimeOutOfRange, "window [" + std::to_string(s) + ", " + std::to_string(t) +
                                          "] outside [0, " + std::to_string(path.horizon()) + "]");
  }
  t = std::min(t, path.horizon());
  s = std::min(s, t);
}

// s, every knot strictly inside (s, t), and t.
std::vector<WindowPoint> window_points(const PiecewiseLinearPath& path, double s, double t) {
  check_window(path, s, t);
  std::vector<WindowPoint> pts;
  pts.push_back({s, path.eval(s)});
  const auto times = path.times();
  auto it = std::upper_bound(times.begin(), times.end(), s);
  for (; it != times.end() && *it < t; ++it) {
    const auto i = static_cast<std::size_t>(it - times.begin());
    pts.push_back({*it, path.value(i)});
  }
  if (t > s) pts.push_back({t, path.eval(t)});
  return pts;
}

}  // namespace

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times, std::vector<double> values, int dim)
    : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
  if (dim_ < 1 || dim_ > kMaxDim) throw Error(Errc::InvalidPath, "dimension out of range");
  if (times_.empty()) throw Error(Errc::InvalidPath, "a path needs at least one knot");
  if (values_.size() != times_.size() * static_cast<std::size_t>(dim_)) {
    throw Error(Errc::InvalidPath, "knot count and value count differ");
  }
  if (times_.front() != 0.0) throw Error(Errc::InvalidPath, "first knot time must be 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw Error(Errc::InvalidPath, "knot times must be strictly increasing");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteInput, "path value is not finite");
  }
  if (!std::isfinite(times_.back())) throw Error(Errc::NonFiniteInput, "knot time is not finite");
}

PiecewiseLinearPath PiecewiseLinearPath::from_points(std::vector<double> times, const std::vector<Vec>& points) {
  if (points.empty()) throw Error(Errc::InvalidPath, "a path needs at least one knot");
  const int dim = static_cast<int>(points.front().size());
  std::vector<double> values;
  values.reserve(points.size() * static_cast<std::size_t>(dim));
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(Errc::InvalidPath, "points of mixed dimension");
    values.insert(values.end(), p.data(), p.data() + dim);
  }
  return PiecewiseLinearPath(std::move(times), std::move(values), dim);
}

PiecewiseLinearPath PiecewiseLinearPath::constant(const Vec& point) {
  return from_points({0.0}, {point});
}

Vec PiecewiseLinearPath::value(std::size_t i) const {
  Vec v(dim_);
  const double* row = values_.data() + i * static_cast<std::size_t>(dim_);
  for (int c = 0; c < dim_; ++c) v(c) = row[c];
  return v;
}

Vec PiecewiseLinearPath::eval(double t) const {
  const double slack = 1e-12 * std::max(1.0, horizon());
  if (!(t >= 0.0) || !(t <= horizon() + slack)) {
    throw Error(Errc::TimeOutOfRange, "t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon()) + "]");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return value(times_.size() - 1);
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const auto lo = hi - 1;
  if (times_[lo] == t) return value(lo);
  const double frac = (t - times_[lo]) / (times_[hi] - times_[lo]);
  const Vec a = value(lo);
  return a + frac * (value(hi) - a);
}

PiecewiseLinearPath PiecewiseLinearPath::translated(const Vec& offset) const {
  if (offset.size() != dim_) throw Error(Errc::InvalidPath, "offset dimension mismatch");
  std::vector<double> values = values_;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    for (int c = 0; c < dim_; ++c) values[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(c)] += offset(c);
  }
  return PiecewiseLinearPath(times_, std::move(values), dim_);
}

PiecewiseLinearPath PiecewiseLinearPath::every_nth(std::size_t stride) const {
  if (stride == 0 || (times_.size() - 1) % stride != 0) {
    throw Error(Errc::InvalidPath, "stride does not divide the number of segments");
  }
  std::vector<double> times;
  std::vector<double> values;
  for (std::size_t i = 0; i < times_.size(); i += stride) {
    times.push_back(times_[i]);
    const auto* row = values_.data() + i * static_cast<std::size_t>(dim_);
    values.insert(values.end(), row, row + dim_);
  }
  return PiecewiseLinearPath(std::move(times), std::move(values), dim_);
}

double sup_osc(const PiecewiseLinearPath& path, double s, double t) {
  const auto pts = window_points(path, s, t);
  double best = 0.0;
  if (path.dim() == 1) {
    double lo = pts.front().x(0);
    double hi = lo;
    for (const auto& p : pts) {
      lo = std::min(lo, p.x(0));
      hi = std::max(hi, p.x(0));
    }
    return hi - lo;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, (pts[j].x - pts[i].x).norm());
  }
  return best;
}

double total_variation(const PiecewiseLinearPath& path, double s, double t) {
  const auto pts = window_points(path, s, t);
  double sum = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) sum += (pts[i].x - pts[i - 1].x).norm();
  return sum;
}

std::vector<double> cumulative_variation(const PiecewiseLinearPath& path) {
  std::vector<double> out(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    out[i] = out[i - 1] + (path.value(i) - path.value(i - 1)).norm();
  }
  return out;
}

double holder_quotient(const PiecewiseLinearPath& path, double s, double t, double theta) {
  if (!(theta > 0.0) || !(theta <= 1.0)) throw Error(Errc::BadTheta, "theta must lie in (0, 1]");
  const auto pts = window_points(path, s, t);
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dt = pts[j].t - pts[i].t;
      best = std::max(best, (pts[j].x - pts[i].x).norm() / std::pow(dt, theta));
    }
  }
  return best;
}

double sup_distance(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, double t) {
  if (a.dim() != b.dim()) throw Error(Errc::InvalidPath, "paths of different dimension");
  if (t > std::min(a.horizon(), b.horizon()) * (1.0 + 1e-12)) {
    throw Error(Errc::TimeOutOfRange, "sup_distance beyond a horizon");
  }
  std::vector<double> grid;
  for (double u : a.times()) if (u < t) grid.push_back(u);
  for (double u : b.times()) if (u < t) grid.push_back(u);
  grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double best = 0.0;
  for (double u : grid) best = std::max(best, (a.eval(u) - b.eval(u)).norm());
  return best;
}

void write_csv(std::ostream& out, const PiecewiseLinearPath& path) {
  out << 't';
  for (int c = 1; c <= path.dim(); ++c) out << ",x" << c;
  out << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << csv::format_double(path.time(i));
    for (int c = 0; c < path.dim(); ++c) out << ',' << csv::format_double(path.coord(i, c));
    out << '\n';
  }
}

PiecewiseLinearPath read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "empty path CSV");
  const auto header = csv::split(csv::trim(line));
  if (header.size() < 2 || csv::trim(header[0]) != "t") {
    throw Error(Errc::ParseError, "path CSV header must be t,x1,...,xm");
  }
  const int dim = static_cast<int>(header.size()) - 1;
  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto trimmed = csv::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = csv::split(trimmed);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw Error(Errc::ParseError, "row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields");
    }
    times.push_back(csv::parse_double(fields[0]));
    for (int c = 1; c <= dim; ++c) values.push_back(csv::parse_double(fields[static_cast<std::size_t>(c)]));
  }
  return PiecewiseLinearPath(std::move(times), std::move(values), dim);
}

}  // namespace reflectsde
