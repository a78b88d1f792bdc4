#pragma once

// Surface spec files.
//
//   label = "sphere R=2"
//   [ambient]
//   dim = 3
//   metric = euclidean          # or g.i.j = "expr in x1..xm", 1-based
//   [embedding]
//   x1 = "2*sin(u1)*cos(u2)"
//   ...
//   [density]
//   rho = sqrt_g                 # sqrt_g | one | "expr in u1,u2"
//   [grid]
//   u1.min = 0.2
//   u1.max = "pi - 0.2"
//   u1.count = 20
//   ...
//
// Values are numbers, bare words or double-quoted text; '#' starts a comment
// outside quotes. Numeric grid values may be constant expressions.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "psurf/ambient.hpp"
#include "psurf/classical.hpp"
#include "psurf/error.hpp"
#include "psurf/expr.hpp"

namespace psurf {

/// A spec-file problem; `line` is 1-based, 0 when not tied to one line.
class SpecError : public InputError {
public:
  SpecError(std::size_t line, const std::string& detail, const std::string& source = "")
      : InputError(compose(line, detail, source)), line_(line), detail_(detail) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  static std::string compose(std::size_t line, const std::string& detail, const std::string& source) {
    std::string s = source.empty() ? "" : source + ": ";
    if (line) s += "line " + std::to_string(line) + ": ";
    return s + detail;
  }

  std::size_t line_;
  std::string detail_;
};

/// Closed interval sampled uniformly, endpoints included.
struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int count = 2;

  double at(int k) const {
    if (k == count - 1) return max;
    return min + (max - min) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
};

struct GridSpec {
  AxisSpec u1, u2;

  std::size_t size() const { return static_cast<std::size_t>(u1.count) * u2.count; }

  /// Row-major: u1 is the slow index.
  std::vector<UPoint> points() const {
    std::vector<UPoint> out;
    out.reserve(size());
    for (int i = 0; i < u1.count; ++i)
      for (int j = 0; j < u2.count; ++j) out.push_back({u1.at(i), u2.at(j)});
    return out;
  }
};

struct LoadedSpec {
  SurfaceSpec surface;
  GridSpec grid;
};

/// Parses a density keyword or expression as accepted by `rho =` and `--rho`.
inline Density parse_density(std::string_view text) {
  if (text == "sqrt_g") return Density::sqrt_g();
  if (text == "one" || text == "unit") return Density::unit();
  Expr e = parse(text);
  for (const auto& v : variables(e))
    if (v != "u1" && v != "u2")
      throw InputError("density uses '" + v + "'; only u1, u2 are allowed");
  return Density::custom(std::move(e));
}

namespace detail {

struct SpecValue {
  std::string text;
  bool quoted = false;
};

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Removes a trailing comment, honoring double quotes.
inline std::string_view strip_comment(std::string_view s) {
  bool in_quotes = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '"') in_quotes = !in_quotes;
    if (s[k] == '#' && !in_quotes) return s.substr(0, k);
  }
  return s;
}

inline SpecValue parse_value(std::string_view raw, std::size_t line) {
  if (raw.empty()) throw SpecError(line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw SpecError(line, "unterminated string");
    const auto inner = raw.substr(1, raw.size() - 2);
    if (inner.find('"') != std::string_view::npos) throw SpecError(line, "stray quote in value");
    return {std::string(inner), true};
  }
  if (raw.find_first_of(" \t\"") != std::string_view::npos)
    throw SpecError(line, "unquoted value contains spaces or quotes: " + std::string(raw));
  return {std::string(raw), false};
}

inline Expr parse_at(const std::string& text, std::size_t line) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw SpecError(line, std::string("in \"") + text + "\": " + e.what());
  }
}

inline double constant_at(const SpecValue& v, std::size_t line) {
  const Expr e = parse_at(v.text, line);
  if (!variables(e).empty()) throw SpecError(line, "expected a constant, got \"" + v.text + "\"");
  try {
    return eval(e, Env<double>{});
  } catch (const EvalError& err) {
    throw SpecError(line, err.what());
  }
}

/// Parses "<prefix><int>" and returns the integer, or nullopt.
inline std::optional<int> indexed(std::string_view key, std::string_view prefix) {
  if (key.size() <= prefix.size() || key.substr(0, prefix.size()) != prefix) return std::nullopt;
  int v = 0;
  for (char c : key.substr(prefix.size())) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
    if (v > 1000) return std::nullopt;
  }
  return v;
}

struct Located {
  Expr expr;
  std::size_t line;
};

}  // namespace detail

/// Parses spec text; errors carry the offending line number.
inline LoadedSpec parse_spec(std::string_view text) {
  using detail::SpecValue;
  enum class Section { top, ambient, embedding, density, grid };
  Section section = Section::top;

  std::optional<std::string> label;
  std::optional<int> dim;
  std::size_t dim_line = 0;
  bool euclidean = false;
  std::map<std::pair<int, int>, detail::Located> metric;
  std::map<int, detail::Located> embedding;
  std::optional<Density> density;
  std::map<std::string, std::pair<SpecValue, std::size_t>> grid;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = detail::trim(detail::strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw SpecError(line_no, "malformed section header");
      const auto name = detail::trim(line.substr(1, line.size() - 2));
      if (name == "ambient") section = Section::ambient;
      else if (name == "embedding") section = Section::embedding;
      else if (name == "density") section = Section::density;
      else if (name == "grid") section = Section::grid;
      else throw SpecError(line_no, "unknown section [" + std::string(name) + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SpecError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const SpecValue value = detail::parse_value(detail::trim(line.substr(eq + 1)), line_no);
    if (key.empty()) throw SpecError(line_no, "missing key");
    auto unknown = [&] { return SpecError(line_no, "unknown key '" + key + "'"); };

    switch (section) {
      case Section::top:
        if (key != "label") throw unknown();
        if (label) throw SpecError(line_no, "duplicate label");
        label = value.text;
        break;

      case Section::ambient:
        if (key == "dim") {
          if (dim) throw SpecError(line_no, "duplicate dim");
          const double d = detail::constant_at(value, line_no);
          if (d != std::floor(d) || d < 3 || d > 8)
            throw SpecError(line_no, "dim must be an integer in 3..8");
          dim = static_cast<int>(d);
          dim_line = line_no;
        } else if (key == "metric") {
          if (value.quoted || value.text != "euclidean")
            throw SpecError(line_no, "metric shorthand must be 'euclidean'");
          euclidean = true;
        } else if (key.rfind("g.", 0) == 0) {
          const auto dot = key.find('.', 2);
          const auto i = dot == std::string::npos ? std::nullopt
                                                  : detail::indexed(key.substr(0, dot), "g.");
          const auto j = dot == std::string::npos ? std::nullopt
                                                  : detail::indexed(key.substr(dot), ".");
          if (!i || !j || *i < 1 || *j < 1) throw SpecError(line_no, "malformed metric key '" + key + "'");
          Expr e = detail::parse_at(value.text, line_no);
          const auto ij = std::make_pair(std::min(*i, *j), std::max(*i, *j));
          if (auto it = metric.find(ij); it != metric.end()) {
            if (to_string(it->second.expr) != to_string(e))
              throw SpecError(line_no, "conflicting metric entries for g." + std::to_string(ij.first) +
                                           "." + std::to_string(ij.second) + " (first at line " +
                                           std::to_string(it->second.line) + ")");
          } else {
            metric.emplace(ij, detail::Located{std::move(e), line_no});
          }
        } else {
          throw unknown();
        }
        break;

      case Section::embedding: {
        const auto k = detail::indexed(key, "x");
        if (!k || *k < 1) throw unknown();
        if (embedding.count(*k)) throw SpecError(line_no, "duplicate embedding coordinate " + key);
        embedding.emplace(*k, detail::Located{detail::parse_at(value.text, line_no), line_no});
        break;
      }

      case Section::density:
        if (key != "rho") throw unknown();
        if (density) throw SpecError(line_no, "duplicate rho");
        try {
          density = parse_density(value.text);
        } catch (const Error& e) {
          throw SpecError(line_no, e.what());
        }
        if (!value.quoted && density->mode == DensityMode::custom && !variables(density->expr).empty())
          throw SpecError(line_no, "density expressions must be quoted");
        break;

      case Section::grid: {
        static const char* const kGridKeys[] = {"u1.min", "u1.max", "u1.count",
                                                "u2.min", "u2.max", "u2.count"};
        bool known = false;
        for (const char* g : kGridKeys) known = known || key == g;
        if (!known) throw unknown();
        if (grid.count(key)) throw SpecError(line_no, "duplicate " + key);
        grid.emplace(key, std::make_pair(value, line_no));
        break;
      }
    }
  }

  if (!dim) throw SpecError(0, "[ambient] dim is missing");
  const int m = *dim;

  LoadedSpec out;
  if (euclidean && !metric.empty())
    throw SpecError(metric.begin()->second.line, "explicit metric entries given with metric = euclidean");
  if (euclidean) {
    out.surface.ambient = AmbientManifold::euclidean(m);
  } else {
    if (metric.empty()) throw SpecError(dim_line, "[ambient] needs 'metric = euclidean' or g.i.j entries");
    std::vector<std::vector<Expr>> table(m, std::vector<Expr>(m, Expr::constant(0.0)));
    for (const auto& [ij, loc] : metric) {
      if (ij.second > m)
        throw SpecError(loc.line, "metric index exceeds dim = " + std::to_string(m));
      table[ij.first - 1][ij.second - 1] = loc.expr;
      table[ij.second - 1][ij.first - 1] = loc.expr;
    }
    for (int i = 1; i <= m; ++i)
      if (!metric.count({i, i}))
        throw SpecError(0, "metric diagonal entry g." + std::to_string(i) + "." + std::to_string(i) +
                               " is missing");
    try {
      out.surface.ambient = AmbientManifold::from_metric(m, table);
    } catch (const Error& e) {
      throw SpecError(0, std::string("ambient metric: ") + e.what());
    }
  }

  for (const auto& [k, loc] : embedding)
    if (k > m)
      throw SpecError(loc.line, "embedding has coordinate x" + std::to_string(k) +
                                    " but the ambient dimension is " + std::to_string(m));
  if (embedding.size() != static_cast<std::size_t>(m))
    throw SpecError(0, "embedding has " + std::to_string(embedding.size()) +
                           " coordinates but the ambient dimension is " + std::to_string(m));
  for (const auto& [k, loc] : embedding) {
    for (const auto& v : variables(loc.expr))
      if (v != "u1" && v != "u2")
        throw SpecError(loc.line, "embedding uses '" + v + "'; only u1, u2 are allowed");
    out.surface.embedding.push_back(loc.expr);
  }

  out.surface.density = density.value_or(Density::sqrt_g());
  out.surface.label = label.value_or("");

  auto axis = [&](const std::string& name) {
    AxisSpec a;
    for (const char* field : {".min", ".max", ".count"})
      if (!grid.count(name + field)) throw SpecError(0, "[grid] " + name + field + " is missing");
    a.min = detail::constant_at(grid.at(name + ".min").first, grid.at(name + ".min").second);
    a.max = detail::constant_at(grid.at(name + ".max").first, grid.at(name + ".max").second);
    const auto& [cv, cl] = grid.at(name + ".count");
    const double c = detail::constant_at(cv, cl);
    if (c != std::floor(c) || c < 2 || c > 10000)
      throw SpecError(cl, name + ".count must be an integer in 2..10000");
    a.count = static_cast<int>(c);
    if (!(a.min < a.max))
      throw SpecError(grid.at(name + ".max").second, name + ": min must be below max");
    return a;
  };
  out.grid.u1 = axis("u1");
  out.grid.u2 = axis("u2");
  out.surface.validate();
  return out;
}

/// Reads and parses a spec file. Unreadable files raise InputError.
inline LoadedSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(ss.str());
  } catch (const SpecError& e) {
    throw SpecError(e.line(), e.detail(), path);
  }
}

}  // namespace psurf
