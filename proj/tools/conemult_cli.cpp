#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conemult/conemult.hpp"
#include "output.hpp"
#include "run_config.hpp"

namespace {

using conemult::GridField;
using conemult::GridSpec;
using conemult::LorentzParams;
using nlohmann::json;

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

void check_budget(const cli::RunConfig& cfg, double points, const std::string& what) {
  const double cap = static_cast<double>(cfg.count("general", "max_grid_points"));
  if (points > cap)
    throw conemult::budget_error(what + " needs " + std::to_string(static_cast<long long>(points)) +
                                 " points, above max_grid_points = " + std::to_string(static_cast<long long>(cap)));
}

LorentzParams lorentz_params(const cli::RunConfig& cfg, const std::string& s) {
  LorentzParams params{cfg.number(s, "p"), cfg.number(s, "nu")};
  params.validate();
  return params;
}

int dimension(const cli::RunConfig& cfg, const std::string& s, const std::string& key = "d") {
  const long long d = cfg.integer(s, key);
  if (d < 1 || d > 4) throw cli::config_error(s + "." + key + " must lie in 1..4");
  return static_cast<int>(d);
}

std::size_t log2_count(const cli::RunConfig& cfg, const std::string& s, const std::string& key) {
  const long long e = cfg.integer(s, key);
  if (e < 4 || e > 40) throw cli::config_error(s + "." + key + " must lie in 4..40");
  return std::size_t{1} << e;
}

/// "br:<lambda>" -> lambda; anything else is an error.
double br_order(const std::string& key, const std::string& spec) {
  if (spec.rfind("br:", 0) != 0) throw cli::config_error(key + ": expected br:<lambda>, got '" + spec + "'");
  return cli::parse_number(key, spec.substr(3));
}

std::function<double(double)> br_radial(double lambda) {
  if (!(lambda > 0.0)) throw cli::config_error("Bochner-Riesz order lambda must be > 0");
  return [lambda](double r) { return r < 1.0 ? std::pow(1.0 - r * r, lambda) : 0.0; };
}

struct CsvColumns {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::size_t column(const std::string& name, const std::string& path) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw cli::config_error("'" + path + "' has no column '" + name + "'");
  }
};

CsvColumns read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw cli::config_error("cannot open '" + path + "'");
  CsvColumns t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = cli::split_list(line);
    for (auto& c : cells)
      if (c.size() >= 2 && c.front() == '"' && c.back() == '"') c = c.substr(1, c.size() - 2);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw cli::config_error("'" + path + "': ragged row '" + line + "'");
      t.rows.push_back(cells);
    }
  }
  if (first) throw cli::config_error("'" + path + "' has no header row");
  return t;
}

// ---------------------------------------------------------------------------

json run_lorentz_norm(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "lorentz-norm";
  const auto params = lorentz_params(cfg, s);
  const std::string path = cfg.text(s, "input");
  if (path.empty()) throw cli::config_error("lorentz-norm: set input to a CSV file");
  const auto csv = read_csv(path);
  const auto vi = csv.column(cfg.text(s, "value_column"), path);
  const auto wi = csv.column(cfg.text(s, "weight_column"), path);
  conemult::WeightedSampleSet samples;
  for (const auto& row : csv.rows)
    samples.push_back(cli::parse_number("value", row[vi]), cli::parse_number("weight", row[wi]));
  if (samples.empty()) throw cli::config_error("'" + path + "' has no samples");

  const double q = conemult::lorentz_quasinorm(samples, params);
  const auto star = conemult::decreasing_rearrangement(samples);
  cli::CsvTable t({"t_start", "t_end", "level"});
  for (std::size_t i = 0; i < star.levels.size(); ++i) t.add(star.breakpoints[i], star.breakpoints[i + 1], star.levels[i]);
  out.write_csv("rearrangement.csv", t);

  std::cout << std::setprecision(17) << q << '\n';
  return {{"quasinorm", number(q)},
          {"weighted_lp_norm", number(conemult::weighted_lp_norm(samples, params.p))},
          {"samples", samples.size()},
          {"total_measure", samples.total_measure()}};
}

std::vector<conemult::GammaProfile> select_profiles(const std::string& key, const std::string& spec) {
  auto family = conemult::comparison_family();
  if (spec == "family") return family;
  for (const auto& g : family)
    if (g.name() == spec) return {g};
  if (spec.rfind("br:", 0) == 0) return {conemult::br_gamma_profile(conemult::br_gamma(br_order(key, spec)))};
  if (spec.rfind("csv:", 0) == 0) {
    const std::string path = spec.substr(4);
    const auto csv = read_csv(path);
    const auto ui = csv.column("u", path), gi = csv.column("gamma", path);
    std::vector<double> u, g;
    for (const auto& row : csv.rows) {
      u.push_back(cli::parse_number("u", row[ui]));
      g.push_back(cli::parse_number("gamma", row[gi]));
    }
    return {conemult::GammaProfile::sampled(u, g, 0.25, path)};
  }
  std::string names;
  for (const auto& g : family) names += " " + g.name();
  throw cli::config_error(key + ": unknown profile '" + spec + "'; expected family, br:<lambda>, csv:<path> or one of" +
                          names);
}

json run_characterize(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "characterize";
  const int d = dimension(cfg, s);
  if (d < 2) throw cli::config_error("characterize.d must be >= 2");
  const auto params = lorentz_params(cfg, s);
  const double truncation = cfg.finite(s, "truncation");
  if (!(truncation > 0.0)) throw cli::config_error("characterize.truncation must be > 0");
  check_budget(cfg, 128.0 * truncation, "condition (v)");
  const auto profiles = select_profiles(s + ".profile", cfg.text(s, "profile"));

  const auto band = conemult::compare_iv_v(profiles, d, params, cfg.finite(s, "shift"), truncation);
  cli::CsvTable t({"profile", "iv", "v", "ratio"});
  for (const auto& e : band.entries) t.add(e.name, e.iv, e.v, e.ratio);
  out.write_csv("iv_v.csv", t);
  json summary = {{"band", band}};

  const std::string m0 = cfg.text(s, "m0");
  if (m0 == "none") {
    summary["m0"] = nullptr;
  } else {
    const auto radial = br_radial(br_order(s + ".m0", m0));
    conemult::M0Options o;
    o.R = cfg.finite(s, "m0_R");
    o.N = log2_count(cfg, s, "m0_log2_N");
    check_budget(cfg, static_cast<double>(o.N), "m0 functional");
    const auto grid = conemult::default_t_grid(static_cast<int>(cfg.integer(s, "m0_per_octave")),
                                               static_cast<int>(cfg.integer(s, "m0_lo")),
                                               static_cast<int>(cfg.integer(s, "m0_hi")));
    const auto rep = conemult::m0_characterization(radial, d, params, grid, o);
    cli::CsvTable m({"t", "value"});
    for (const auto& e : rep.entries) m.add(e.t, e.ladder.value());
    out.write_csv("m0.csv", m);
    summary["m0"] = rep;
  }
  return summary;
}

json run_br_scan(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "br-scan";
  const int d = dimension(cfg, s);
  const auto p_list = cfg.numbers(s, "p_list");
  const double lo = cfg.finite(s, "lambda_min"), hi = cfg.finite(s, "lambda_max"), step = cfg.finite(s, "lambda_step");
  if (!(step > 0.0) || !(hi >= lo)) throw cli::config_error("br-scan: need lambda_step > 0 and lambda_max >= lambda_min");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> lambdas(count);
  for (std::size_t j = 0; j < count; ++j) lambdas[j] = lo + step * static_cast<double>(j);

  conemult::CriticalScanOptions o;
  o.R0 = cfg.finite(s, "R0");
  o.doublings = static_cast<int>(cfg.integer(s, "doublings"));
  o.N = log2_count(cfg, s, "log2_N");
  o.growth = cfg.finite(s, "growth");
  check_budget(cfg, static_cast<double>(o.N), "br-scan spectrum");

  const auto res = conemult::critical_scan(d, p_list, lambdas, o);
  cli::CsvTable t({"p", "lambda", "value", "divergent_trend"});
  for (const auto& pt : res.points) t.add(pt.p, pt.lambda, pt.ladder.value(), pt.ladder.divergent);
  out.write_csv("scan.csv", t);
  return {{"scan", res}};
}

json run_wave_check(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "wave-check";
  const int d = dimension(cfg, s);
  const long long n_min = cfg.integer(s, "n_min"), n_max = cfg.integer(s, "n_max");
  if (n_min < 1 || n_max < n_min) throw cli::config_error("wave-check: need 1 <= n_min <= n_max");
  if (n_max > conemult::max_wave_n)
    throw conemult::budget_error("wave-check: n_max = " + std::to_string(n_max) + " exceeds the quadrature budget " +
                                 std::to_string(conemult::max_wave_n));
  conemult::WaveDecompositionOptions o;
  o.points_per_wavelength = cfg.finite(s, "points_per_wavelength");
  o.outer_radius = cfg.finite(s, "outer_radius");
  o.n_test = static_cast<int>(cfg.integer(s, "n_test"));
  o.sign = static_cast<int>(cfg.integer(s, "sign"));

  std::vector<conemult::WaveDecomposition> ws;
  cli::CsvTable l1({"n", "omega_l1"}), sup({"n", "error_sup"});
  for (long long n = n_min; n <= n_max; ++n) {
    ws.push_back(conemult::decompose(static_cast<int>(n), d, conemult::cutoff::wave_theta, o));
    const auto& w = ws.back();
    l1.add(w.n, w.omega_l1);
    sup.add(w.n, w.error_sup);
    cli::CsvTable prof({"rho", "re", "im"});
    for (std::size_t i = 0; i < w.omega.radii.size(); ++i)
      prof.add(w.omega.radii[i], w.omega.values[i].real(), w.omega.values[i].imag());
    out.write_csv("omega_n" + std::to_string(n) + ".csv", prof);
  }
  out.write_csv("omega_l1.csv", l1);
  out.write_csv("error_sup.csv", sup);
  json summary = {{"per_n", ws}, {"omega_l1_spread", number(conemult::omega_l1_spread(ws))}};
  summary["error_decay_rate"] = ws.size() >= 2 ? number(conemult::error_decay_rate(ws)) : json(nullptr);
  return summary;
}

json run_sph_probe(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "sph-probe";
  const int d = dimension(cfg, s);
  conemult::SmoothingKernelOptions ko;
  ko.moments = static_cast<int>(cfg.integer(s, "moments"));
  ko.radius = cfg.finite(s, "radius");
  ko.kappa = cfg.finite(s, "kappa");
  const conemult::SmoothingKernel kernel(d, ko);

  conemult::SphProbeOptions o;
  o.budget = cfg.count(s, "budget");
  o.y_cell = cfg.finite(s, "y_cell");
  o.x_max = cfg.finite(s, "x_max");
  o.x_cells = cfg.count(s, "x_cells");
  o.seed = cfg.count("general", "seed");
  check_budget(cfg, static_cast<double>(o.x_cells), "sph-probe radial grid");
  const auto est = conemult::sph_opnorm_lower(d, cfg.finite(s, "p"), kernel, cfg.numbers(s, "radii"), o);

  cli::CsvTable t({"xi", "psi_hat"});
  for (double xi = 0.0; xi <= kernel.frequency_cutoff(); xi += 0.125) t.add(xi, kernel.psi_hat(xi));
  out.write_csv("kernel_hat.csv", t);
  return {{"estimate", est},
          {"kernel",
           {{"moments", kernel.moments()},
            {"radius", kernel.radius()},
            {"nonvanishing_margin", kernel.nonvanishing_margin()},
            {"frequency_cutoff", kernel.frequency_cutoff()},
            {"resolving_frequency", kernel.resolving_frequency()},
            {"support_leak", kernel.support_leak()}}}};
}

json run_opnorm(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "opnorm";
  const auto n = cfg.count(s, "n");
  const int dim = dimension(cfg, s, "dim");
  check_budget(cfg, std::pow(static_cast<double>(n), dim), "opnorm grid");
  const auto spec = GridSpec::cube(static_cast<std::size_t>(dim), cfg.finite(s, "extent"), n);
  const auto params = lorentz_params(cfg, s);

  conemult::EstimateOptions o;
  o.budget = cfg.count(s, "budget");
  o.seed = cfg.count("general", "seed");
  o.random_starts = static_cast<int>(cfg.integer(s, "random_starts"));
  o.t_grid = cfg.numbers(s, "t_grid");
  if (cfg.text(s, "families") != "all") {
    o.families.clear();
    for (const auto& f : cli::split_list(cfg.text(s, "families"))) o.families.push_back(conemult::parse_family(f));
  }

  const std::string mode = cfg.text(s, "mode"), op_name = cfg.text(s, "operator");
  conemult::GridOperator op;
  std::function<double(double)> radial;
  if (op_name == "br") {
    radial = br_radial(cfg.finite(s, "lambda"));
    op = [radial](const GridField& f) { return conemult::apply_radial_multiplier(f, radial); };
  } else if (op_name == "half_space") {
    auto m = conemult::sample_symbol(spec, [](std::span<const double> xi) { return xi[0] > 0.0 ? 1.0 : 0.0; });
    op = [m](const GridField& f) { return conemult::apply_multiplier(f, m); };
  } else {
    throw cli::config_error("opnorm.operator must be br or half_space, got '" + op_name + "'");
  }

  if (mode == "estimate") {
    const auto est = conemult::estimate_lower(op, spec, params, o);
    return {{"mode", mode}, {"operator", op_name}, {"estimate", est}};
  }
  if (mode != "equivlor") throw cli::config_error("opnorm.mode must be estimate or equivlor, got '" + mode + "'");
  if (!radial) throw cli::config_error("opnorm: equivlor needs a radial operator (operator = br)");
  const auto rep = conemult::equivlor_experiment(radial, spec, params, o.t_grid, o);
  cli::CsvTable t({"t", "resolved", "ratio"});
  for (const auto& e : rep.entries) t.add(e.t, e.resolved, e.ratio);
  out.write_csv("per_t.csv", t);
  return {{"mode", mode}, {"operator", op_name}, {"equivlor", rep}};
}

json run_apply(const cli::RunConfig& cfg, const cli::OutputDir& out) {
  const std::string s = "apply";
  GridField f;
  const std::string input = cfg.text(s, "input");
  if (input == "gaussian") {
    const auto n = cfg.count(s, "n");
    const int dim = dimension(cfg, s, "dim");
    check_budget(cfg, std::pow(static_cast<double>(n), dim), "apply input grid");
    const double w = cfg.finite(s, "width");
    if (!(w > 0.0)) throw cli::config_error("apply.width must be > 0");
    const auto spec = GridSpec::cube(static_cast<std::size_t>(dim), cfg.finite(s, "extent"), n);
    f = GridField::sample(spec, conemult::Representation::space, [w](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return std::exp(-0.5 * r2 / (w * w));
    });
  } else {
    std::ifstream is(input, std::ios::binary);
    if (!is) throw cli::config_error("cannot open field '" + input + "'");
    f = conemult::read_field(is);
    check_budget(cfg, static_cast<double>(f.size()), "apply input grid");
    if (f.representation != conemult::Representation::space)
      throw cli::config_error("apply: input field must be in the space representation");
  }

  const std::string name = cfg.text(s, "multiplier");
  GridField g;
  json provenance;
  if (name == "br") {
    const double lambda = cfg.finite(s, "lambda");
    g = conemult::apply_radial_multiplier(f, br_radial(lambda));
    provenance = {{"builder", "br_radial"}, {"lambda", lambda}};
  } else if (name == "half_space") {
    auto m = conemult::sample_symbol(f.spec, [](std::span<const double> xi) { return xi[0] > 0.0 ? 1.0 : 0.0; });
    g = conemult::apply_multiplier(f, m);
    provenance = {{"builder", "half_space"}};
  } else if (name == "cone_br") {
    const auto m = conemult::build_br_cone(cfg.finite(s, "lambda"), f.spec);
    g = conemult::apply_multiplier(f, m);
    provenance = m.provenance;
  } else if (name == "mgamma") {
    const auto profiles = select_profiles(s + ".profile", cfg.text(s, "profile"));
    if (profiles.size() != 1) throw cli::config_error("apply.profile must name a single profile");
    const auto [k_lo, k_hi] = conemult::slabs_in_box(f.spec);
    const auto m = conemult::build_mgamma(conemult::GammaFamily::uniform(k_lo, k_hi, profiles.front()), f.spec);
    g = conemult::apply_multiplier(f, m);
    provenance = m.provenance;
  } else {
    throw cli::config_error("apply.multiplier must be br, cone_br, half_space or mgamma, got '" + name + "'");
  }

  const std::string stem = cfg.text(s, "output");
  if (stem.empty() || stem.find('/') != std::string::npos)
    throw cli::config_error("apply.output must be a plain file stem");
  std::ostringstream bin;
  conemult::write_field(bin, g);
  out.write(stem + ".cmgf", bin.str());
  if (cfg.flag(s, "csv")) {
    std::ostringstream csv;
    conemult::write_field_csv(csv, g);
    out.write(stem + ".csv", csv.str());
  }
  json axes = json::array();
  for (const auto& a : g.spec.axes) axes.push_back({{"extent", a.extent}, {"n", a.n}});
  return {{"axes", axes},
          {"multiplier", provenance},
          {"input_l2", conemult::l2_norm(f)},
          {"output_l2", conemult::l2_norm(g)},
          {"output_boundary_mass_fraction", conemult::boundary_mass_fraction(g)},
          {"output_file", stem + ".cmgf"}};
}

using Runner = std::function<json(const cli::RunConfig&, const cli::OutputDir&)>;

const std::vector<std::pair<std::string, std::pair<std::string, Runner>>>& subcommands() {
  static const std::vector<std::pair<std::string, std::pair<std::string, Runner>>> table = {
      {"lorentz-norm", {"Lorentz quasi-norm of a CSV sample set", run_lorentz_norm}},
      {"characterize", {"conditions (iv)/(v) over gamma profiles and the m0 functional", run_characterize}},
      {"br-scan", {"critical Bochner-Riesz exponent scan", run_br_scan}},
      {"wave-check", {"wave kernel decomposition over a range of n", run_wave_check}},
      {"sph-probe", {"lower bound for the spherical superposition operator", run_sph_probe}},
      {"opnorm", {"operator quasi-norm lower bound or dilation equivalence", run_opnorm}},
      {"apply", {"apply a named multiplier to a field", run_apply}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial and conical Fourier multiplier experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::string seed, threads;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads (0 = all)");

  std::map<std::string, std::map<std::string, std::string>> overrides;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : subcommands()) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    for (const auto& key : cli::schema().at(name)) sub->add_option("--" + key.name, overrides[name][key.name], key.help);
    subs[name] = sub;
  }

  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--", 0) == 0) {
      if (a.find('=') == std::string::npos && i + 1 < argc) ++i;  // global options all take a value
      continue;
    }
    if (a.rfind('-', 0) == 0 || subs.count(a)) break;
    std::cerr << "error: unknown subcommand '" << a << "'\n\n" << app.help();
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const auto started = std::chrono::system_clock::now();
  try {
    cli::RunConfig cfg;
    if (!config_path.empty()) cfg.load_ini(config_path);
    if (!out_dir.empty()) cfg.set("general", "out", out_dir);
    if (!seed.empty()) cfg.set("general", "seed", seed);
    if (!threads.empty()) cfg.set("general", "threads", threads);

    for (const auto& [name, entry] : subcommands()) {
      auto* sub = subs.at(name);
      if (!sub->parsed()) continue;
      for (const auto& key : cli::schema().at(name))
        if (sub->get_option("--" + key.name)->count() > 0) cfg.set(name, key.name, overrides[name][key.name]);

      const auto seed_value = cfg.count("general", "seed");
      conemult::set_thread_count(static_cast<unsigned>(cfg.count("general", "threads")));
      const cli::OutputDir out(cfg.text("general", "out"));
      out.write("effective_config.ini", cfg.effective_ini(name));

      json section = json::object();
      for (const auto& key : cli::schema().at(name)) section[key.name] = cfg.text(name, key.name);
      json summary = {{"schema_version", cli::schema_version},
                      {"subcommand", name},
                      {"seed", seed_value},
                      {"config", section},
                      {"result", entry.second(cfg, out)}};
      out.write_json("summary.json", summary);

      const auto finished = std::chrono::system_clock::now();
      std::string command;
      for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);
      out.write_json("metadata.json",
                     {{"schema_version", cli::schema_version},
                      {"started_utc", cli::utc_timestamp(started)},
                      {"finished_utc", cli::utc_timestamp(finished)},
                      {"elapsed_seconds", std::chrono::duration<double>(finished - started).count()},
                      {"threads", conemult::thread_count()},
                      {"command_line", command}});
    }
  } catch (const cli::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const conemult::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const conemult::budget_error& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
