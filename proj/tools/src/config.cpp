#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "reflectsde/brownian.hpp"
#include "reflectsde/cli.hpp"
#include "reflectsde/csv.hpp"

namespace reflectsde::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"command", "seed", "horizon", "out"}},
      {"domain", {"kind", "dim", "normal", "offset", "center", "radius", "lo", "hi", "faces", "eps_bd"}},
      {"coefficients", {"diffusion", "drift", "noise_dim", "scale"}},
      {"scheme",
       {"name", "level", "levels", "substeps", "p", "paths", "x0", "ref_offset", "max_level", "max_failure_rate",
        "path_id"}},
      {"skorohod", {"driver", "substeps", "refine"}},
      {"bounds", {"cases", "level", "substeps", "start"}},
  };
  return keys;
}

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  throw Error(Errc::ConfigError, key + ": " + what);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return std::string(csv::trim(*v));
  }

  std::string text(const std::string& key, const std::string& fallback) const { return raw(key).value_or(fallback); }

  std::string required(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) field_error(key, "required");
    return *v;
  }

  double number(const std::string& key, double fallback) const {
    auto v = raw(key);
    return v ? parse_number(key, *v) : fallback;
  }

  template <typename Int>
  Int integer(const std::string& key, Int fallback) const {
    auto v = raw(key);
    return v ? parse_integer<Int>(key, *v) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    if (auto v = raw(key)) {
      for (std::string_view tok : tokens(*v)) out.push_back(parse_number(key, tok));
    }
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    if (auto v = raw(key)) {
      for (std::string_view tok : tokens(*v)) out.push_back(parse_integer<int>(key, tok));
    }
    return out;
  }

  bool flag(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    field_error(key, "expected true or false, got '" + *v + "'");
  }

  static std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && (s[i] == ' ' || s[i] == ',' || s[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != ',' && s[j] != '\t') ++j;
      if (j > i) out.push_back(s.substr(i, j - i));
      i = j;
    }
    return out;
  }

  static double parse_number(const std::string& key, std::string_view tok) {
    double x = 0.0;
    try {
      x = csv::parse_double(tok);
    } catch (const Error&) {
      field_error(key, "expected a number, got '" + std::string(tok) + "'");
    }
    if (!std::isfinite(x)) field_error(key, "must be finite");
    return x;
  }

  template <typename Int>
  static Int parse_integer(const std::string& key, std::string_view tok) {
    Int x{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      field_error(key, "expected an integer, got '" + std::string(tok) + "'");
    }
    return x;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = allowed_keys().find(section);
    if (it == allowed_keys().end()) {
      if (body.empty()) field_error(section, "key outside of any section");
      field_error(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) field_error(section + "." + key, "unknown key");
    }
  }
}

Vec to_vec(const std::string& key, const std::vector<double>& xs, int dim) {
  if (static_cast<int>(xs.size()) != dim) {
    field_error(key, "expected " + std::to_string(dim) + " components, got " + std::to_string(xs.size()));
  }
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = xs[static_cast<std::size_t>(i)];
  return v;
}

HalfSpaceConstraint unit_face(const std::string& key, Vec normal, double offset) {
  const double len = normal.norm();
  if (!(len > 0.0)) field_error(key, "face normal must be nonzero");
  return {normal / len, offset / len};
}

DomainSpec parse_domain(const Reader& r) {
  const std::string kind = r.required("domain.kind");
  DomainSpec d = DomainSpec::whole_space(1);
  try {
    if (kind == "whole_space") {
      d = DomainSpec::whole_space(r.integer("domain.dim", 1));
    } else if (kind == "half_space") {
      const auto n = r.numbers("domain.normal");
      if (n.empty()) field_error("domain.normal", "required");
      const auto face = unit_face("domain.normal", to_vec("domain.normal", n, static_cast<int>(n.size())),
                                  r.number("domain.offset", 0.0));
      d = DomainSpec::half_space(face.normal, face.offset);
    } else if (kind == "ball" || kind == "ball_exterior") {
      const auto c = r.numbers("domain.center");
      if (c.empty()) field_error("domain.center", "required");
      const double radius = r.number("domain.radius", 1.0);
      if (!(radius > 0.0)) field_error("domain.radius", "must be positive");
      const Vec center = to_vec("domain.center", c, static_cast<int>(c.size()));
      d = kind == "ball" ? DomainSpec::ball(center, radius) : DomainSpec::ball_exterior(center, radius);
    } else if (kind == "box") {
      const double lo = r.number("domain.lo", 0.0);
      const double hi = r.number("domain.hi", 1.0);
      if (!(hi > lo)) field_error("domain.hi", "must exceed domain.lo");
      d = DomainSpec::box(r.integer("domain.dim", 2), lo, hi);
    } else if (kind == "polyhedron") {
      // faces = a1 a2 ... ad c; ...   each row is the half-space a . y > c
      const std::string spec = r.required("domain.faces");
      const auto rows = csv::split(spec, ';');
      std::vector<HalfSpaceConstraint> faces;
      for (std::string_view row : rows) {
        std::vector<double> xs;
        for (auto tok : Reader::tokens(row)) xs.push_back(Reader::parse_number("domain.faces", tok));
        if (xs.size() < 2) field_error("domain.faces", "each face needs a normal and an offset");
        const double offset = xs.back();
        xs.pop_back();
        faces.push_back(unit_face("domain.faces", to_vec("domain.faces", xs, static_cast<int>(xs.size())), offset));
      }
      d = DomainSpec::convex_polyhedron(std::move(faces));
    } else {
      field_error("domain.kind", "unknown kind '" + kind + "'");
    }
    if (auto eps = r.raw("domain.eps_bd")) d = d.with_boundary_tolerance(Reader::parse_number("domain.eps_bd", *eps));
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) throw;
    throw Error(Errc::ConfigError, std::string("domain: ") + e.what());
  }
  return d;
}

CoefficientSet parse_coefficients(const Reader& r, int dim) {
  using coefficients::Diffusion;
  using coefficients::Drift;
  const std::string diffusion = r.text("coefficients.diffusion", "constant");
  const std::string drift = r.text("coefficients.drift", "zero");
  Diffusion dk{};
  Drift bk{};
  if (diffusion == "constant") {
    dk = Diffusion::Constant;
  } else if (diffusion == "diag_tanh") {
    dk = Diffusion::DiagTanh;
  } else {
    field_error("coefficients.diffusion", "unknown diffusion '" + diffusion + "'");
  }
  if (drift == "zero") {
    bk = Drift::Zero;
  } else if (drift == "neg_tanh") {
    bk = Drift::NegTanh;
  } else {
    field_error("coefficients.drift", "unknown drift '" + drift + "'");
  }
  const int noise_dim = r.integer("coefficients.noise_dim", dim);
  if (noise_dim < 1 || noise_dim > kMaxDim) field_error("coefficients.noise_dim", "out of range");
  try {
    return coefficients::make(dk, bk, dim, noise_dim, r.number("coefficients.scale", 1.0));
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, std::string("coefficients: ") + e.what());
  }
}

Command parse_command(const std::string& name) {
  if (name == "skorohod") return Command::Skorohod;
  if (name == "simulate") return Command::Simulate;
  if (name == "converge") return Command::Converge;
  if (name == "drift-check") return Command::DriftCheck;
  if (name == "check-bounds") return Command::CheckBounds;
  field_error("run.command", "unknown command '" + name + "'");
}

void require_range(const std::string& key, long long value, long long lo, long long hi) {
  if (value < lo || value > hi) {
    field_error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                         std::to_string(value));
  }
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::ConfigError, std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  check_keys(tree);
  const Reader r(tree);

  RunConfig cfg;
  cfg.command = parse_command(r.required("run.command"));
  cfg.seed = r.integer<std::uint64_t>("run.seed", 0);
  cfg.horizon = r.number("run.horizon", 1.0);
  if (!(cfg.horizon > 0.0)) field_error("run.horizon", "must be positive");
  cfg.out = r.text("run.out", "");

  cfg.domain = parse_domain(r);
  const int dim = cfg.domain.dim();
  cfg.coef = parse_coefficients(r, dim);

  cfg.scheme = r.text("scheme.name", "euler_peano");
  cfg.level = r.integer("scheme.level", 6);
  require_range("scheme.level", cfg.level, 0, kMaxBrownianLevel);
  cfg.levels = r.integers("scheme.levels");
  cfg.substeps = r.integer("scheme.substeps", 0);
  require_range("scheme.substeps", cfg.substeps, 0, 1 << 20);
  cfg.p = r.integer("scheme.p", 1);
  cfg.paths = r.integer("scheme.paths", 1000);
  cfg.ref_offset = r.integer("scheme.ref_offset", 2);
  cfg.max_level = r.integer("scheme.max_level", 20);
  require_range("scheme.max_level", cfg.max_level, 0, kMaxBrownianLevel);
  cfg.max_failure_rate = r.number("scheme.max_failure_rate", 0.01);
  cfg.path_id = r.integer<std::uint64_t>("scheme.path_id", 0);
  const auto x0 = r.numbers("scheme.x0");
  cfg.x0 = x0.empty() ? Vec(Vec::Zero(dim)) : to_vec("scheme.x0", x0, dim);

  if (auto driver = r.raw("skorohod.driver")) {
    cfg.driver = std::filesystem::path(*driver);
    if (cfg.driver.is_relative()) cfg.driver = base_dir / cfg.driver;
  }
  cfg.refine = r.flag("skorohod.refine", false);
  if (auto s = r.raw("skorohod.substeps")) cfg.substeps = Reader::parse_integer<int>("skorohod.substeps", *s);

  cfg.cases = r.integer("bounds.cases", 100);
  require_range("bounds.cases", cfg.cases, 1, 1000000);
  if (auto s = r.raw("bounds.level")) cfg.level = Reader::parse_integer<int>("bounds.level", *s);
  if (auto s = r.raw("bounds.substeps")) cfg.substeps = Reader::parse_integer<int>("bounds.substeps", *s);
  const auto start = r.numbers("bounds.start");
  cfg.start = start.empty() ? cfg.x0 : to_vec("bounds.start", start, dim);

  switch (cfg.command) {
    case Command::Skorohod:
      if (cfg.driver.empty()) field_error("skorohod.driver", "required");
      break;
    case Command::Simulate:
      if (cfg.scheme != "euler_peano" && cfg.scheme != "wong_zakai") {
        field_error("scheme.name", "simulate supports euler_peano or wong_zakai");
      }
      if (cfg.level > cfg.max_level) field_error("scheme.level", "exceeds scheme.max_level");
      break;
    case Command::Converge:
    case Command::DriftCheck:
      if (cfg.levels.empty()) field_error("scheme.levels", "required");
      break;
    case Command::CheckBounds:
      require_range("bounds.level", cfg.level, 0, kMaxBrownianLevel - 1);
      break;
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::ConfigError, "config: cannot open " + file.string());
  return parse_config(in, file.parent_path());
}

}  // namespace reflectsde::cli
