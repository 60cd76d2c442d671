#pragma once

// Command-line front end: `nks <subcommand> [options]`. Results go to stdout
// or, with --out DIR, to files in DIR together with a JSON run manifest.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nks/nks.hpp"

namespace nks::cli {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

namespace detail {

inline json smoothness_json(int s) { return s == kInfiniteSmoothness ? json("inf") : json(s); }
inline json degree_json(int deg) { return deg == kZeroPolynomialDegree ? json("-inf") : json(deg); }

inline json polynomial_json(const PolynomialInfo& p) {
  json j{{"is_polynomial", p.is_polynomial}};
  if (p.is_polynomial) {
    j["degree"] = degree_json(p.degree);
    j["even_degree"] = degree_json(p.even_degree);
    j["odd_degree"] = degree_json(p.odd_degree);
  }
  return j;
}

inline std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
  std::map<std::string, double> out;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--params expects key=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = io::parse_double(kv.substr(eq + 1), "--params " + kv.substr(0, eq));
  }
  return out;
}

/// Where results go: stdout, or files under --out plus a manifest.
class Session {
 public:
  Session(std::string name, std::string out_dir, std::ostream& out)
      : name_(std::move(name)), dir_(std::move(out_dir)), out_(out), start_(std::chrono::steady_clock::now()) {}

  bool to_files() const { return !dir_.empty(); }

  void emit(const std::string& filename, const std::string& content) {
    if (!to_files()) {
      out_ << content;
      if (!content.empty() && content.back() != '\n') out_ << '\n';
      return;
    }
    std::filesystem::create_directories(dir_);
    const auto path = std::filesystem::path(dir_) / filename;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    f << content;
    if (!content.empty() && content.back() != '\n') f << '\n';
    outputs_.push_back(filename);
  }

  void finish(const std::string& subcommand, const json& params, std::optional<std::uint64_t> seed) {
    if (!to_files()) return;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m{{"subcommand", subcommand}, {"params", params},       {"seed", seed ? json(*seed) : json(nullptr)},
           {"version", kVersion},      {"outputs", outputs_},    {"wall_time_s", wall}};
    const auto path = std::filesystem::path(dir_) / (name_ + ".manifest.json");
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot write '" + path.string() + "'");
    f << m.dump(2) << '\n';
  }

 private:
  std::string name_;
  std::string dir_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

/// Resolved option values of a subcommand (command-line, config or default).
inline json resolved_params(CLI::App* sub) {
  json p = json::object();
  for (CLI::Option* opt : sub->get_options()) {
    const std::string& name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config" || name == "out" || name == "threads") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_items_expected_max() > 1) p[name] = res;
      else p[name] = res.empty() ? std::string("true") : res.back();
    } else if (opt->get_items_expected_max() > 1) {
      p[name] = json::array();
    } else if (!opt->get_default_str().empty()) {
      p[name] = opt->get_default_str();
    }
  }
  return p;
}

/// Splices "--key=value" pairs from a flat JSON config into argv after the
/// subcommand, skipping keys already given on the command line.
inline std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (cfg.contains("params") && cfg["params"].is_object()) cfg = cfg["params"];  // a run manifest
  if (!cfg.is_object()) throw ValidationError("config file '" + path + "' must hold a flat JSON object");
  auto given = [&args](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    if (given(key)) continue;
    auto scalar = [&key](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number()) return v.dump();
      throw ValidationError("config key '" + key + "' must be a scalar or a list of scalars");
    };
    if (value.is_array()) {
      for (const auto& v : value) injected.push_back("--" + key + "=" + scalar(v));
    } else {
      injected.push_back("--" + key + "=" + scalar(value));
    }
  }
  args.insert(args.begin() + 2, injected.begin(), injected.end());
  return args;
}

inline KernelKind parse_kind(const std::string& s) {
  if (s == "nngp") return KernelKind::nngp;
  if (s == "ntk") return KernelKind::ntk;
  throw ValidationError("--kind must be nngp or ntk");
}

inline EigenParity parse_parity(const std::string& s) {
  if (s == "even") return EigenParity::even;
  if (s == "odd") return EigenParity::odd;
  if (s == "all") return EigenParity::all;
  throw ValidationError("--parity must be even, odd or all");
}

inline DualBackend parse_backend(const std::string& s) {
  if (s == "hermite") return DualBackend::hermite;
  if (s == "quadrature") return DualBackend::quadrature;
  throw ValidationError("--backend must be hermite or quadrature");
}

struct NetArgs {
  std::string act = "relu";
  std::vector<std::string> params;
  std::string kind = "nngp";
  int depth = 2;
  double sw2 = 1, sb2 = 0, si2 = 0;
  std::string backend = "quadrature";
  int n_coeffs = kDefaultHermiteCoefficients;

  void add_to(CLI::App* sub, bool with_kind = true) {
    sub->add_option("--act", act, "activation identifier")->capture_default_str();
    sub->add_option("--params", params, "activation parameters key=value");
    if (with_kind) sub->add_option("--kind", kind, "nngp or ntk")->check(CLI::IsMember({"nngp", "ntk"}));
    sub->add_option("--depth", depth, "number of layers L");
    sub->add_option("--sw2", sw2, "sigma_w^2");
    sub->add_option("--sb2", sb2, "sigma_b^2");
    sub->add_option("--si2", si2, "sigma_i^2");
    sub->add_option("--backend", backend, "dual backend: hermite or quadrature");
    sub->add_option("--n-coeffs", n_coeffs, "Hermite coefficients for the hermite backend");
  }
  ActivationSpec activation() const { return make_activation(act, parse_params(params)); }
  NetworkConfig config() const { return {depth, sw2, sb2, si2}; }
  KernelOptions options() const {
    KernelOptions o;
    o.backend = parse_backend(backend);
    o.n_coeffs = n_coeffs;
    return o;
  }
};

inline json prediction_json(const ExponentPrediction& p) {
  json j{{"kind", to_string(p.kind)},
         {"parity", to_string(p.parity)},
         {"decay", to_string(p.decay)},
         {"smoothness", smoothness_json(p.smoothness)},
         {"simplified_activation", p.simplified},
         {"regime", p.regime}};
  j["exponent"] = p.decay == DecayClass::power_law ? json(p.exponent) : json(nullptr);
  j["max_degree"] = p.decay == DecayClass::finite_rank ? json(p.max_degree) : json(nullptr);
  return j;
}

inline json fit_json(const DecayFit& f) {
  return json{{"parity", to_string(f.parity)},       {"window", {f.l_lo, f.l_hi}},
              {"slope", f.slope},                    {"intercept", f.intercept},
              {"max_residual", f.max_residual},      {"n_points", f.n_points},
              {"zero_threshold", f.zero_threshold},  {"zero_set", f.zero_set}};
}

}  // namespace detail

/// Runs the CLI; returns the process exit code (0 ok, 2 invalid input,
/// 3 numerically untrustworthy result).
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Neural kernel spectra: dual activations, NNGP/NTK kernels, eigenvalue decay", "nks"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string out_dir, config_path;
  unsigned threads = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "write outputs and a manifest into this directory");
    sub->add_option("--threads", threads, "worker threads (0: NK_THREADS or hardware)");
    sub->add_option("--config", config_path, "flat JSON file with default option values");
  };

  // classify
  std::string act_name;
  std::vector<std::string> act_params;
  int max_order = 6;
  auto* classify_cmd = app.add_subcommand("classify", "smoothness report of an activation (JSON)");
  classify_cmd->add_option("activation,--act", act_name, "activation identifier")->required();
  classify_cmd->add_option("--params", act_params, "activation parameters key=value");
  classify_cmd->add_option("--max-order", max_order, "highest derivative order inspected");
  common(classify_cmd);

  // hermite
  int n_coeffs = kDefaultHermiteCoefficients, nodes = 2000;
  double cutoff = 12.0;
  auto* hermite_cmd = app.add_subcommand("hermite", "Hermite coefficients a_n (CSV n,a_n)");
  hermite_cmd->add_option("activation,--act", act_name, "activation identifier")->required();
  hermite_cmd->add_option("--params", act_params, "activation parameters key=value");
  hermite_cmd->add_option("--n-coeffs", n_coeffs, "highest index N");
  hermite_cmd->add_option("--nodes", nodes, "quadrature nodes per half-line");
  hermite_cmd->add_option("--cutoff", cutoff, "half-line cutoff in standard deviations");
  common(hermite_cmd);

  // dual
  std::string backend = "quadrature", grid = "-1:1:201";
  double quad_c = 12.0;
  int quad_n = 50;
  auto* dual_cmd = app.add_subcommand("dual", "dual activation on a grid (CSV t,dual)");
  dual_cmd->add_option("activation,--act", act_name, "activation identifier")->required();
  dual_cmd->add_option("--params", act_params, "activation parameters key=value");
  dual_cmd->add_option("--backend", backend, "hermite or quadrature");
  dual_cmd->add_option("--grid", grid, "t0:t1:n");
  dual_cmd->add_option("--n-coeffs", n_coeffs, "Hermite coefficients (hermite backend)");
  dual_cmd->add_option("--quad-c", quad_c, "quadrant rule cutoff c");
  dual_cmd->add_option("--quad-n", quad_n, "quadrant rule points per axis");
  common(dual_cmd);

  // kernel
  NetArgs net;
  auto* kernel_cmd = app.add_subcommand("kernel", "NNGP or NTK kernel on a grid (CSV t,kappa)");
  net.add_to(kernel_cmd);
  kernel_cmd->add_option("--grid", grid, "t0:t1:n");
  common(kernel_cmd);

  // spectrum
  int d = 2, l_max = kDefaultLMax, n_quad = kDefaultQuadratureNodes;
  double mercer_tol = 1e-5;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues on S^d (CSV l,mu,N_ld)");
  net.add_to(spectrum_cmd);
  spectrum_cmd->add_option("--d", d, "sphere dimension");
  spectrum_cmd->add_option("--lmax", l_max, "largest degree");
  spectrum_cmd->add_option("--nquad", n_quad, "Gauss-Jacobi nodes");
  spectrum_cmd->add_option("--mercer-tol", mercer_tol, "reconstruction tolerance relative to kappa(1)");
  common(spectrum_cmd);

  // fit
  std::string spectrum_file, parity = "all", window = "16:128";
  double zero_threshold = kDefaultZeroThreshold;
  auto* fit_cmd = app.add_subcommand("fit", "power-law fit of a spectrum CSV (JSON)");
  fit_cmd->add_option("--spectrum", spectrum_file, "CSV from the spectrum subcommand")->required();
  fit_cmd->add_option("--parity", parity, "even, odd or all");
  fit_cmd->add_option("--window", window, "a:b");
  fit_cmd->add_option("--zero-threshold", zero_threshold, "relative zero threshold");
  common(fit_cmd);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "predicted eigenvalue decay (JSON)");
  net.add_to(predict_cmd);
  predict_cmd->add_option("--parity", parity, "even, odd or all");
  predict_cmd->add_option("--d", d, "sphere dimension");
  common(predict_cmd);

  // paths
  std::uint64_t seed = 0;
  int grid_n = 256;
  auto* paths_cmd = app.add_subcommand("paths", "GP sample path on S^1 or S^2 (CSV coordinates,f)");
  paths_cmd->add_option("--spectrum", spectrum_file, "CSV from the spectrum subcommand")->required();
  paths_cmd->add_option("--seed", seed, "random seed");
  paths_cmd->add_option("--grid", grid_n, "points on S^1, or latitudes on S^2");
  common(paths_cmd);

  // sobolev
  std::string r_range = "0.5:3:26";
  std::string tail_window;
  auto* sobolev_cmd = app.add_subcommand("sobolev", "Sobolev series verdicts (CSV r,verdict,tail_exponent)");
  sobolev_cmd->add_option("--spectrum", spectrum_file, "CSV from the spectrum subcommand")->required();
  sobolev_cmd->add_option("--r-range", r_range, "a:b:n");
  sobolev_cmd->add_option("--window", tail_window, "tail window a:b (default 16:lmax/2)");
  common(sobolev_cmd);

  // mc-validate
  int width = 1024, samples = 2000, n_pairs = 10;
  bool diagonal = false;
  auto* mc_cmd = app.add_subcommand("mc-validate", "finite-width Monte-Carlo check (JSON)");
  net.add_to(mc_cmd, false);
  mc_cmd->add_option("--width", width, "hidden width");
  mc_cmd->add_option("--samples", samples, "independent initializations");
  mc_cmd->add_option("--d", d, "sphere dimension");
  mc_cmd->add_option("--seed", seed, "random seed");
  mc_cmd->add_option("--pairs", n_pairs, "random point pairs");
  mc_cmd->add_flag("--diagonal", diagonal, "prepend the pair (x, x)");
  common(mc_cmd);

  // figures
  std::string figure;
  auto* fig_cmd = app.add_subcommand("figures", "spectra behind the fig1/fig2 plots (CSV + JSON)");
  fig_cmd->add_option("figure", figure, "fig1 or fig2")->required()->check(CLI::IsMember({"fig1", "fig2"}));
  fig_cmd->add_option("--lmax", l_max, "largest degree");
  fig_cmd->add_option("--nquad", n_quad, "Gauss-Jacobi nodes");
  fig_cmd->add_option("--mercer-tol", mercer_tol, "reconstruction tolerance relative to kappa(1)");
  common(fig_cmd);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> full{"nks"};
    full.insert(full.end(), args.begin(), args.end());
    full = apply_config(full);
    std::vector<std::string> rev(full.rbegin(), full.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "nks: error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "nks: error: " << e.what() << '\n';
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    set_threads(threads);
    const json params = resolved_params(sub);
    std::optional<std::uint64_t> used_seed;
    Session session(name == "figures" ? figure : (name == "mc-validate" ? "mc_validate" : name), out_dir, out);

    if (name == "classify") {
      const auto act = make_activation(act_name, parse_params(act_params));
      const auto rep = classify(act, max_order);
      json j{{"activation", act.name},
             {"smoothness", smoothness_json(rep.smoothness)},
             {"deltas", rep.deltas},
             {"deltas_exact", rep.deltas_exact},
             {"parity", to_string(rep.parity)},
             {"even_smoothness", smoothness_json(rep.even_smoothness)},
             {"odd_smoothness", smoothness_json(rep.odd_smoothness)},
             {"polynomial", polynomial_json(rep.polynomial)},
             {"even_polynomial", polynomial_json(rep.even_polynomial)},
             {"odd_polynomial", polynomial_json(rep.odd_polynomial)}};
      session.emit("classify.json", j.dump(2));
    } else if (name == "hermite") {
      const auto act = make_activation(act_name, parse_params(act_params));
      const auto series = expand(act, n_coeffs, split_normal_rule(nodes, cutoff));
      if (series.truncated) err << "nks: warning: |a_N| exceeds 1e-6 ||a||; the expansion is truncated\n";
      io::CsvTable t({"n", "a_n"});
      for (int n = 0; n <= series.N; ++n) t.add_row({std::to_string(n), io::format_double(series.coeffs[n])});
      session.emit("hermite.csv", t.str());
    } else if (name == "dual") {
      const auto act = make_activation(act_name, parse_params(act_params));
      const auto ts = io::parse_grid(grid);
      const auto dual = make_dual(act, parse_backend(backend), n_coeffs, QuadrantRule{quad_c, quad_n});
      std::vector<double> v(ts.size());
      parallel_for(ts.size(), [&](std::size_t i) { v[i] = dual(ts[i]); });
      io::CsvTable t({"t", "dual"});
      for (std::size_t i = 0; i < ts.size(); ++i) t.add_numeric_row({ts[i], v[i]});
      session.emit("dual.csv", t.str());
    } else if (name == "kernel") {
      const auto k = build_kernel(parse_kind(net.kind), net.activation(), net.config(), net.options());
      const auto ts = io::parse_grid(grid);
      const auto v = evaluate_kernel(k, ts);
      io::CsvTable t({"t", "kappa"});
      for (std::size_t i = 0; i < ts.size(); ++i) t.add_numeric_row({ts[i], v[i]});
      session.emit("kernel.csv", t.str());
    } else if (name == "spectrum") {
      const auto k = build_kernel(parse_kind(net.kind), net.activation(), net.config(), net.options());
      SpectrumOptions so;
      so.mercer_tolerance = mercer_tol;
      const auto s = eigenvalues(k, d, l_max, n_quad, so);
      session.emit("spectrum.csv", io::spectrum_table(s).str());
    } else if (name == "fit") {
      const auto s = io::read_spectrum_csv(spectrum_file);
      const auto [lo, hi] = io::parse_window(window);
      const auto f = fit_decay(s, parse_parity(parity), lo, hi, zero_threshold);
      session.emit("fit.json", fit_json(f).dump(2));
    } else if (name == "predict") {
      const auto p = predict_exponent(net.activation(), net.config(), parse_kind(net.kind), parse_parity(parity), d);
      session.emit("predict.json", prediction_json(p).dump(2));
    } else if (name == "paths") {
      const auto s = io::read_spectrum_csv(spectrum_file);
      const SphericalBasis basis(s.d, s.l_max());
      const auto path = sample_path(s, basis, seed);
      used_seed = seed;
      const auto pts = sphere_grid(s.d, grid_n);
      std::vector<double> f(pts.size());
      parallel_for(pts.size(), [&](std::size_t i) { f[i] = path(pts[i]); });
      std::vector<std::string> header;
      for (int c = 0; c <= s.d; ++c) header.push_back("x" + std::to_string(c));
      header.push_back("f");
      io::CsvTable t(header);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        auto row = pts[i];
        row.push_back(f[i]);
        t.add_numeric_row(row);
      }
      session.emit("paths.csv", t.str());
    } else if (name == "sobolev") {
      const auto s = io::read_spectrum_csv(spectrum_file);
      SobolevOptions so;
      if (!tail_window.empty()) std::tie(so.l_lo, so.l_hi) = io::parse_window(tail_window);
      io::CsvTable t({"r", "verdict", "tail_exponent", "partial_sum", "threshold_estimate"});
      for (double r : io::parse_grid(r_range)) {
        const auto ser = sobolev_series(s, r, so);
        t.add_row({io::format_double(r), to_string(ser.verdict), io::format_double(ser.tail_exponent),
                   io::format_double(ser.partial_sums.back()), io::format_double(ser.threshold_estimate)});
      }
      session.emit("sobolev.csv", t.str());
    } else if (name == "mc-validate") {
      const auto act = net.activation();
      const auto cfg = net.config();
      used_seed = seed;
      auto pairs = random_pairs(d, n_pairs, derive_seed(seed, 0xFFFFFFFFULL));
      if (diagonal && !pairs.empty()) pairs.insert(pairs.begin(), PointPair{pairs.front().x, pairs.front().x});
      const auto est = estimate(act, cfg, d, pairs, width, samples, seed);
      const auto nngp = build_nngp(act, cfg, net.options());
      std::optional<KernelFunction> ntk;
      if (!jump_is_nonzero(jump(act, 0), act, 0)) ntk = build_ntk(act, cfg, net.options());
      json rows = json::array();
      for (const auto& e : est) {
        const double t = std::clamp(e.pair.t(), -1.0, 1.0);
        const double an = nngp(t);
        json r{{"t", t},
               {"empirical_nngp", e.nngp_mean},
               {"nngp_se", e.nngp_se},
               {"analytic_nngp", an},
               {"nngp_z", (e.nngp_mean - an) / e.nngp_se}};
        if (ntk) {
          const double at = (*ntk)(t);
          r["empirical_ntk"] = e.ntk_mean;
          r["ntk_se"] = e.ntk_se;
          r["analytic_ntk"] = at;
          r["ntk_z"] = (e.ntk_mean - at) / e.ntk_se;
        }
        rows.push_back(r);
      }
      json j{{"activation", act.name}, {"depth", cfg.depth}, {"width", width}, {"samples", samples},
             {"d", d},                 {"seed", seed},       {"pairs", rows}};
      session.emit("mc_validate.json", j.dump(2));
    } else if (name == "figures") {
      if (!session.to_files()) throw ValidationError("figures needs --out DIR");
      struct Series {
        std::string act;
        std::map<std::string, double> params;
        KernelKind kind;
        NetworkConfig cfg;
        std::string file;
      };
      std::vector<Series> series;
      if (figure == "fig1") {
        const std::vector<std::pair<std::string, std::map<std::string, double>>> acts{
            {"relu", {}}, {"leakyrelu", {}}, {"selu", {}}, {"elu", {{"alpha", 0.5}}}, {"celu", {}}};
        for (const auto& [a, p] : acts)
          for (KernelKind k : {KernelKind::nngp, KernelKind::ntk})
            series.push_back({a, p, k, {3, 1, 1, 1}, "fig1_" + a + "_" + to_string(k) + ".csv"});
      } else {
        for (const std::string a : {"relu", "gelu", "selu", "elu", "celu"})
          for (bool bias : {true, false})
            series.push_back({a, {}, KernelKind::ntk, bias ? NetworkConfig{2, 1, 1, 1} : NetworkConfig{2, 1, 0, 0},
                              "fig2_" + a + (bias ? "_bias" : "_nobias") + ".csv"});
      }
      json index = json::array();
      for (const auto& s : series) {
        const auto act = make_activation(s.act, s.params);
        SpectrumOptions so;
        so.mercer_tolerance = mercer_tol;
        const auto spec = eigenvalues(build_kernel(s.kind, act, s.cfg), 2, l_max, n_quad, so);
        session.emit(s.file, io::spectrum_table(spec).str());
        json entry{{"file", s.file},
                   {"activation", s.act},
                   {"params", s.params},
                   {"kind", to_string(s.kind)},
                   {"depth", s.cfg.depth},
                   {"sw2", s.cfg.sigma_w2},
                   {"sb2", s.cfg.sigma_b2},
                   {"si2", s.cfg.sigma_i2},
                   {"d", 2}};
        for (EigenParity p : {EigenParity::even, EigenParity::odd})
          entry["prediction_" + to_string(p)] = prediction_json(predict_exponent(act, s.cfg, s.kind, p, 2));
        index.push_back(entry);
      }
      session.emit(figure + "_index.json", json{{"figure", figure}, {"series", index}}.dump(2));
    }
    session.finish(name, params, used_seed);
    return 0;
  } catch (const ValidationError& e) {
    err << "nks: error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "nks: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "nks: internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nks::cli
