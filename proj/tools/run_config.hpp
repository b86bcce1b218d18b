#pragma once

// Run configuration: documented keys with defaults, overlaid by an INI file
// and then by command-line overrides. Every value is kept as text until a
// subcommand asks for it with a type, so the effective config echoes exactly
// what was resolved.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cli {

/// Invalid configuration: exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyDoc {
  std::string name;
  std::string value;  // default
  std::string help;
};

using Schema = std::map<std::string, std::vector<KeyDoc>>;

inline const Schema& schema() {
  static const Schema s = {
      {"general",
       {{"seed", "1", "seed for every randomized search"},
        {"threads", "0", "worker threads, 0 = hardware concurrency"},
        {"out", "out", "output directory"},
        {"max_grid_points", "16777216", "numerical budget: largest grid or FFT length"}}},
      {"lorentz-norm",
       {{"input", "", "CSV file with a header row"},
        {"value_column", "value", "column holding sample values"},
        {"weight_column", "weight", "column holding cell measures"},
        {"p", "2", "Lorentz exponent p > 0"},
        {"nu", "2", "second exponent, nu >= p or inf"}}},
      {"characterize",
       {{"d", "3", "spatial dimension >= 2"},
        {"p", "1.5", "Lorentz exponent p"},
        {"nu", "inf", "second exponent"},
        {"profile", "family", "family, a comparison-family name, br:<lambda> or csv:<path>"},
        {"shift", "1", "radial shift c of the (v) kernel"},
        {"truncation", "64", "common truncation of |s| in (iv) and |x| in (v)"},
        {"m0", "br:1", "radial multiplier for the global functional: br:<lambda> or none"},
        {"m0_per_octave", "8", "t grid points per octave"},
        {"m0_lo", "-3", "t grid starts at 2^m0_lo"},
        {"m0_hi", "3", "t grid ends at 2^m0_hi"},
        {"m0_R", "2000", "s-line truncation of the global functional"},
        {"m0_log2_N", "14", "log2 of the sample count of phi m0(t .)"}}},
      {"br-scan",
       {{"d", "4", "spatial dimension"},
        {"p_list", "1.05,8/7", "comma-separated exponents p > 1"},
        {"lambda_min", "0.5", "smallest lambda"},
        {"lambda_max", "2", "largest lambda"},
        {"lambda_step", "0.05", "lambda spacing"},
        {"R0", "125000", "smallest truncation"},
        {"doublings", "3", "ladder R0 .. 2^doublings R0"},
        {"log2_N", "22", "log2 of the sample count of gamma"},
        {"growth", "0.1", "divergent-trend threshold per doubling"}}},
      {"wave-check",
       {{"d", "3", "spatial dimension"},
        {"n_min", "3", "first dyadic scale"},
        {"n_max", "8", "last dyadic scale (budget 12)"},
        {"sign", "1", "sign of the phase e^{+-i|xi|}"},
        {"points_per_wavelength", "8", "samples per wavelength at the top frequency"},
        {"outer_radius", "16", "largest |x| of the error region"},
        {"n_test", "2", "weight (1+|x|)^N in the error sup"}}},
      {"sph-probe",
       {{"d", "3", "spatial dimension 2, 3 or 4"},
        {"p", "1.5", "exponent p >= 1"},
        {"radii", "1,2,4", "comma-separated shell radii >= 1"},
        {"budget", "256", "witness evaluations"},
        {"y_cell", "0.25", "side of the y cell carrying an atom"},
        {"x_max", "0", "radial truncation of outputs, 0 = automatic"},
        {"x_cells", "1024", "midpoint cells on [0, x_max]"},
        {"moments", "2", "vanishing moments M of the smoothing kernel"},
        {"radius", "2", "support radius of the smoothing kernel"},
        {"kappa", "16", "bump steepness of the smoothing kernel"}}},
      {"opnorm",
       {{"mode", "estimate", "estimate or equivlor"},
        {"operator", "br", "br (radial (1-|xi|^2)_+^lambda) or half_space (estimate only)"},
        {"lambda", "1", "Bochner-Riesz order"},
        {"dim", "2", "grid rank"},
        {"extent", "16", "half side L of the box [-L, L)^dim"},
        {"n", "128", "points per axis, a power of two"},
        {"p", "1.5", "exponent p"},
        {"nu", "1.5", "second exponent"},
        {"budget", "64", "operator applications"},
        {"random_starts", "6", "random starts per non-bump family"},
        {"families", "all", "comma-separated witness families or all"},
        {"t_grid", "0.25,0.5,1,2", "dilations of the bump witnesses"}}},
      {"apply",
       {{"input", "gaussian", "gaussian or a binary field file"},
        {"width", "1", "width of the gaussian input"},
        {"dim", "2", "grid rank of the gaussian input"},
        {"extent", "16", "half side of the gaussian input box"},
        {"n", "64", "points per axis of the gaussian input"},
        {"multiplier", "br", "br, cone_br, half_space or mgamma"},
        {"lambda", "1", "order for br and cone_br"},
        {"profile", "bump(0,0.2)", "comparison-family profile for mgamma"},
        {"output", "output", "stem of the output field files"},
        {"csv", "true", "also write the output field as CSV"}}},
  };
  return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

/// Decimal, "a/b" or "inf".
inline double parse_number(const std::string& key, const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  auto parse = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || !std::isfinite(v))
      throw config_error("config key '" + key + "': '" + s + "' is not a number");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse(s);
  const double den = parse(s.substr(slash + 1));
  if (den == 0.0) throw config_error("config key '" + key + "': zero denominator in '" + s + "'");
  return parse(s.substr(0, slash)) / den;
}

class RunConfig {
 public:
  RunConfig() {
    for (const auto& [section, keys] : schema())
      for (const auto& k : keys) values_[section][k.name] = k.value;
  }

  /// Overlays an INI file; unknown sections or keys are errors.
  void load_ini(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw config_error("cannot read config '" + path + "': " + e.message());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) throw config_error("config '" + path + "': key '" + section + "' outside a section");
      for (const auto& [key, value] : body) set(section, key, value.data());
    }
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    auto s = values_.find(section);
    if (s == values_.end()) throw config_error("unknown config section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw config_error("unknown config key '" + key + "' in [" + section + "]");
    k->second = value;
  }

  [[nodiscard]] const std::string& text(const std::string& section, const std::string& key) const {
    return values_.at(section).at(key);
  }

  [[nodiscard]] double number(const std::string& section, const std::string& key) const {
    return parse_number(section + "." + key, text(section, key));
  }

  [[nodiscard]] double finite(const std::string& section, const std::string& key) const {
    const double v = number(section, key);
    if (!std::isfinite(v)) throw config_error("config key '" + section + "." + key + "' must be finite");
    return v;
  }

  [[nodiscard]] long long integer(const std::string& section, const std::string& key) const {
    const double v = finite(section, key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
      throw config_error("config key '" + section + "." + key + "' must be an integer, got '" +
                         text(section, key) + "'");
    return static_cast<long long>(v);
  }

  [[nodiscard]] std::uint64_t count(const std::string& section, const std::string& key) const {
    const long long v = integer(section, key);
    if (v < 0) throw config_error("config key '" + section + "." + key + "' must be >= 0");
    return static_cast<std::uint64_t>(v);
  }

  [[nodiscard]] bool flag(const std::string& section, const std::string& key) const {
    const auto& v = text(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error("config key '" + section + "." + key + "' must be true or false");
  }

  [[nodiscard]] std::vector<double> numbers(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(section, key))) out.push_back(parse_number(section + "." + key, item));
    if (out.empty()) throw config_error("config key '" + section + "." + key + "' must list at least one value");
    return out;
  }

  /// INI text of [general] and the given section with every key resolved.
  [[nodiscard]] std::string effective_ini(const std::string& section) const {
    std::string out;
    for (const std::string& s : {std::string("general"), section}) {
      out += "[" + s + "]\n";
      for (const auto& k : schema().at(s)) out += k.name + " = " + text(s, k.name) + "\n";
      out += "\n";
    }
    return out;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace cli
