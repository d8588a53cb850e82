#pragma once

// Medium description files (INI). Example:
//
//   [medium]
//   dimension = 2
//   outer_radius = 1
//   obstacle_radius = 0.8
//   profile = constant          ; constant | polynomial | piecewise
//   value = 2                   ; constant
//   coefficients = 2, 0, -1     ; polynomial, ascending powers of r
//   breaks = 0, 0.5, 1          ; piecewise: partition of [0, R]
//   piece0 = 3                  ; piecewise: coefficients on [breaks0, breaks1]
//   piece1 = 2, 0, -1
//   test_mode = false
//
//   [run]                       ; optional defaults for CLI flags
//   lambda_min = 0.5
//   lambda_max = 60
//   grid = 200
//   kmax = 20
//   tol = 1e-10

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "itelab/error.hpp"
#include "itelab/medium.hpp"

namespace itelab {

struct RunDefaults {
  std::optional<double> lambda_min, lambda_max, tol;
  std::optional<int> grid, kmax;
};

struct Config {
  RadialMedium medium;
  RunDefaults run;
  std::string text;       // raw file contents
  std::uint32_t hash = 0; // FNV-1a of the raw contents
};

/// 32-bit FNV-1a.
inline std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

namespace detail {

inline std::vector<double> parse_list(const std::string& raw, const std::string& key) {
  std::vector<std::string> parts;
  std::string cleaned = raw;
  boost::algorithm::trim(cleaned);
  boost::algorithm::split(parts, cleaned, boost::is_any_of(", \t"), boost::token_compress_on);
  std::vector<double> out;
  for (auto& p : parts) {
    if (p.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw Error(ErrorCode::config_error, "bad number '" + p + "' in " + key);
    }
  }
  if (out.empty()) throw Error(ErrorCode::config_error, key + " is empty");
  return out;
}

template <class T>
T required(const boost::property_tree::ptree& pt, const std::string& key) {
  auto v = pt.get_optional<T>(key);
  if (!v) throw Error(ErrorCode::config_error, "missing or malformed key " + key);
  return *v;
}

inline bool parse_bool(const boost::property_tree::ptree& pt, const std::string& key) {
  auto raw = pt.get_optional<std::string>(key);
  if (!raw) return false;
  std::string s = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(*raw));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::config_error, "bad boolean for " + key);
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  // Comments start at ';' or '#', also after a value.
  std::string stripped;
  {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto cut = line.find_first_of(";#");
      stripped += line.substr(0, cut) + '\n';
    }
  }
  try {
    std::istringstream in(stripped);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
  const int dim = detail::required<int>(tree, "medium.dimension");
  const double R = detail::required<double>(tree, "medium.outer_radius");
  const double r0 = tree.get<double>("medium.obstacle_radius", 0.0);
  const bool test_mode = detail::parse_bool(tree, "medium.test_mode");
  const std::string kind =
      boost::algorithm::to_lower_copy(detail::required<std::string>(tree, "medium.profile"));

  Profile profile;
  if (kind == "constant") {
    profile = ConstantProfile{detail::required<double>(tree, "medium.value")};
  } else if (kind == "polynomial") {
    profile = PolynomialProfile{Polynomial(
        detail::parse_list(detail::required<std::string>(tree, "medium.coefficients"),
                           "medium.coefficients"))};
  } else if (kind == "piecewise") {
    PiecewiseProfile pw;
    pw.breaks =
        detail::parse_list(detail::required<std::string>(tree, "medium.breaks"), "medium.breaks");
    for (std::size_t i = 0; i + 1 < pw.breaks.size(); ++i) {
      const std::string key = "medium.piece" + std::to_string(i);
      pw.pieces.emplace_back(
          detail::parse_list(detail::required<std::string>(tree, key), key));
    }
    profile = std::move(pw);
  } else {
    throw Error(ErrorCode::config_error, "unknown profile kind '" + kind + "'");
  }

  Config cfg{RadialMedium(dim, R, r0, std::move(profile), test_mode), {}, text, fnv1a(text)};
  auto opt = [&](const char* key, auto& slot) {
    using V = typename std::decay_t<decltype(slot)>::value_type;
    if (auto v = tree.get_optional<std::string>(key)) {
      auto parsed = tree.get_optional<V>(key);
      if (!parsed) throw Error(ErrorCode::config_error, std::string("malformed ") + key);
      slot = *parsed;
    }
  };
  opt("run.lambda_min", cfg.run.lambda_min);
  opt("run.lambda_max", cfg.run.lambda_max);
  opt("run.tol", cfg.run.tol);
  opt("run.grid", cfg.run.grid);
  opt("run.kmax", cfg.run.kmax);
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace itelab
