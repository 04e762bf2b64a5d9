#include "anisoag/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "anisoag/costs.hpp"
#include "anisoag/entropy.hpp"
#include "anisoag/errors.hpp"
#include "anisoag/field.hpp"
#include "anisoag/profile.hpp"

namespace anisoag {

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["norm"] = c.norm;
  j["resolution"] = c.resolution;
  j["jobs"] = c.jobs;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["field_output"] = c.field_output;
  j["theta_minus"] = c.theta_minus;
  j["theta_plus"] = c.theta_plus;
  j["lp_nodes"] = c.lp_nodes;
  j["grid"] = c.grid;
  j["min_width"] = c.min_width;
  j["max_width"] = c.max_width;
  j["limit_points"] = c.limit_points;
  j["tol"] = c.tol;
  j["cells"] = c.cells;
  j["cells_per_eps"] = c.cells_per_eps;
  j["max_iter"] = c.max_iter;
  j["eps_list"] = c.eps_list;
  j["xi_theta"] = c.xi_theta;
  j["deltas"] = c.deltas;
  j["lambda_nodes"] = c.lambda_nodes;
  j["points"] = c.points;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  nlohmann::json merged = to_json(ExperimentConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!merged.contains(key)) throw std::invalid_argument("unknown config key: " + key);
    merged[key] = value;
  }
  ExperimentConfig c;
  try {
    merged.at("command").get_to(c.command);
    c.norm = merged.at("norm");
    if (!c.norm.is_string() && !c.norm.is_object()) throw std::invalid_argument("norm must be a string or an object");
    merged.at("resolution").get_to(c.resolution);
    merged.at("jobs").get_to(c.jobs);
    merged.at("seed").get_to(c.seed);
    merged.at("output").get_to(c.output);
    merged.at("field_output").get_to(c.field_output);
    merged.at("theta_minus").get_to(c.theta_minus);
    merged.at("theta_plus").get_to(c.theta_plus);
    merged.at("lp_nodes").get_to(c.lp_nodes);
    merged.at("grid").get_to(c.grid);
    merged.at("min_width").get_to(c.min_width);
    merged.at("max_width").get_to(c.max_width);
    merged.at("limit_points").get_to(c.limit_points);
    merged.at("tol").get_to(c.tol);
    merged.at("cells").get_to(c.cells);
    merged.at("cells_per_eps").get_to(c.cells_per_eps);
    merged.at("max_iter").get_to(c.max_iter);
    merged.at("eps_list").get_to(c.eps_list);
    merged.at("xi_theta").get_to(c.xi_theta);
    merged.at("deltas").get_to(c.deltas);
    merged.at("lambda_nodes").get_to(c.lambda_nodes);
    merged.at("points").get_to(c.points);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(c).dump())));
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json flag_value(const std::string& text, const nlohmann::json& like, const std::string& key) {
  try {
    if (key == "norm") {
      return !text.empty() && text.front() == '{' ? nlohmann::json::parse(text) : nlohmann::json(text);
    }
    std::size_t used = 0;
    switch (like.type()) {
      case nlohmann::json::value_t::number_unsigned: {
        if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case nlohmann::json::value_t::number_integer: {
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case nlohmann::json::value_t::number_float: {
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
      }
      case nlohmann::json::value_t::array: {
        nlohmann::json arr = nlohmann::json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const double v = std::stod(item, &used);
          if (used != item.size()) throw std::invalid_argument("trailing");
          arr.push_back(v);
        }
        return arr;
      }
      default:
        return text;
    }
  } catch (const nlohmann::json::exception&) {
  } catch (const std::logic_error&) {
  }
  throw std::invalid_argument("bad value for --" + key + ": " + text);
}

NormSpec resolve_norm(const nlohmann::json& j) {
  return j.is_string() ? NormSpec::parse(j.get<std::string>()) : NormSpec::from_json(j);
}

struct Context {
  ExperimentConfig cfg;
  std::shared_ptr<const BoundaryParam> bp;
  std::string hash;
  std::ostream* out = nullptr;
};

void csv_header(const Context& cx) {
  *cx.out << "# anisoag " << cx.cfg.command << "\n# config_hash " << cx.hash << "\n# kappa " << fmt(cx.bp->kappa())
          << "\n# config " << to_json(cx.cfg).dump() << "\n";
}

void emit_json(const Context& cx, nlohmann::json result) {
  nlohmann::json j;
  j["command"] = cx.cfg.command;
  j["config_hash"] = cx.hash;
  j["kappa"] = cx.bp->kappa();
  j["config"] = to_json(cx.cfg);
  j["result"] = std::move(result);
  *cx.out << j.dump(2) << "\n";
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double cent_of(const BoundaryParam& bp, const JumpPair& jp, int lp_nodes) {
  return jp.width() < kPi / 2 ? cent_explicit(bp, jp) : cent_lp(bp, jp, lp_nodes).value;
}

BoundsOptions bounds_options(const ExperimentConfig& c) {
  require(c.grid >= 2, "grid must be at least 2");
  BoundsOptions o;
  o.base_points = c.grid;
  o.widths = c.grid;
  o.min_width = c.min_width;
  o.max_width = c.max_width;
  o.lp_nodes = c.lp_nodes;
  o.jobs = c.jobs;
  o.limit_points = c.limit_points;
  return o;
}

void cmd_norm_info(Context& cx) {
  const BoundaryParam& bp = *cx.bp;
  const PowerTypeEstimate pt = power_type_estimate(bp, 256);
  nlohmann::json r;
  r["norm"] = bp.input_norm().describe();
  r["norm_spec"] = bp.input_norm().to_json();
  r["kappa"] = bp.kappa();
  r["input_perimeter"] = bp.input_perimeter();
  r["perimeter"] = kTwoPi;
  r["inradius"] = bp.inradius();
  r["min_alpha_increment"] = bp.min_alpha_increment();
  r["flatness_warning"] = bp.flatness_warning();
  r["power_type"] = {{"exponent", pt.exponent}, {"constant", pt.constant}};
  emit_json(cx, r);
}

void cmd_gamma_table(Context& cx) {
  csv_header(cx);
  cx.bp->write_csv(*cx.out);
}

void cmd_cost(Context& cx) {
  const BoundaryParam& bp = *cx.bp;
  const JumpPair jp = make_jump_theta(bp, cx.cfg.theta_plus, cx.cfg.theta_minus);
  const CostReport rep = cost_report(bp, jp, cx.cfg.lp_nodes);
  nlohmann::json r = to_json(rep);
  r["theta_minus"] = jp.theta_minus;
  r["theta_plus"] = jp.theta_plus;
  r["z_minus"] = {jp.z_minus.x, jp.z_minus.y};
  r["z_plus"] = {jp.z_plus.x, jp.z_plus.y};
  r["nu"] = {jp.nu.x, jp.nu.y};
  r["a"] = jp.a;
  r["theta_tilde"] = jp.theta_tilde ? nlohmann::json(*jp.theta_tilde) : nlohmann::json(nullptr);
  const double k = bp.kappa();
  r["input_norm"] = {{"c1d", rep.c1d / k}, {"cent", rep.cent / (k * k)}, {"pi", rep.pi / (k * k)}};
  emit_json(cx, r);
}

void cmd_cost_scan(Context& cx) {
  const BoundsReport rep = verify_bounds(*cx.bp, bounds_options(cx.cfg));
  csv_header(cx);
  *cx.out << "theta_minus,theta_plus,c1d,cent,pi,ratio\n";
  for (const auto& p : rep.pairs) {
    *cx.out << fmt(p.theta_minus) << ',' << fmt(p.theta_plus) << ',' << fmt(p.c1d) << ',' << fmt(p.cent) << ','
            << fmt(p.pi) << ',' << fmt(p.ratio) << '\n';
  }
}

void cmd_verify_bounds(Context& cx) {
  const BoundsReport rep = verify_bounds(*cx.bp, bounds_options(cx.cfg));
  nlohmann::json r = to_json(rep);
  r["grid"] = cx.cfg.grid;
  emit_json(cx, r);
}

void cmd_profile(Context& cx, std::ostream& log) {
  const BoundaryParam& bp = *cx.bp;
  const JumpPair jp = make_jump_theta(bp, cx.cfg.theta_plus, cx.cfg.theta_minus);
  ProfileOptions o;
  o.tol = cx.cfg.tol;
  const Profile p = solve_profile(bp, jp, o);
  const double e = profile_energy(p);
  const double c = c1d(bp, jp);
  if (!p.converged) log << "# warning: " << p.diagnostics << "\n";
  csv_header(cx);
  *cx.out << "# energy " << fmt(e) << "\n# c1d " << fmt(c) << "\n# relative_difference " << fmt(std::abs(e / c - 1.0))
          << "\n# endpoint_errors " << fmt(p.err_minus) << ' ' << fmt(p.err_plus) << "\n# tail_orders "
          << fmt(p.tail_order_minus) << ' ' << fmt(p.tail_order_plus) << "\n# converged "
          << (p.converged ? "true" : "false") << "\n";
  p.write_csv(*cx.out);
}

void cmd_minimize(Context& cx, std::ostream& log) {
  const auto& c = cx.cfg;
  const BoundaryParam& bp = *cx.bp;
  require(c.cells >= 4, "cells must be at least 4");
  require(c.cells_per_eps > 0.0, "cells_per_eps must be positive");
  const JumpPair jp = make_jump_theta(bp, c.theta_plus, c.theta_minus);
  ProfileOptions po;
  po.tol = std::clamp(c.tol, 1e-10, 1e-3);
  const Profile prof = solve_profile(bp, jp, po);
  const GridSpec g = GridSpec::unit_square(c.cells, c.cells_per_eps);
  const GridField start = profile_jump_field(g, prof, Vec2{0.5, 0.5});
  MinimizeOptions mo;
  mo.max_iter = c.max_iter;
  mo.tol = c.tol;
  mo.jobs = c.jobs;
  const MinimizeResult res = minimize(bp, start, mo);
  const Vec2 tau = rot90(jp.nu);
  const double len = 1.0 / std::max(std::abs(tau.x), std::abs(tau.y));
  const double cd = c1d(bp, jp);
  const double ce = cent_of(bp, jp, c.lp_nodes);
  const double pi = pi_fast(bp, jp.theta_minus, jp.theta_plus);
  const ExtendedEntropy ent(project_to_admissible(cx.bp, cent_lp(bp, jp, c.lp_nodes).lambda));
  const double tv_start = entropy_production(start, ent).total_variation;
  const double tv_final = entropy_production(res.field, ent).total_variation;
  const double e_final = res.energies.back();
  nlohmann::json r;
  r["cells"] = c.cells;
  r["h"] = g.h;
  r["eps"] = g.eps;
  r["jump_length"] = len;
  r["c1d_L"] = cd * len;
  r["cent_L"] = ce * len;
  r["pi_L"] = pi * len;
  r["initial_energy"] = res.energies.front();
  r["final_energy"] = e_final;
  r["final_over_c1d_L"] = e_final / (cd * len);
  r["cent_L_over_final"] = ce * len / e_final;
  r["production_tv_start"] = tv_start;
  r["production_tv_final"] = tv_final;
  r["production_over_energy"] = tv_final / e_final;
  r["iterations"] = res.iterations;
  r["converged"] = res.converged;
  r["reason"] = res.reason;
  if (!c.field_output.empty()) {
    std::ofstream fo(c.field_output, std::ios::binary);
    if (!fo) throw std::invalid_argument("cannot write " + c.field_output);
    res.field.write_binary(fo);
  }
  log << "# c^ENT L " << fmt(ce * len) << "  final energy " << fmt(e_final) << "  1.05 c^1D L "
      << fmt(1.05 * cd * len) << "\n";
  emit_json(cx, r);
}

void cmd_vortex_study(Context& cx) {
  const VortexDecay d = vortex_decay_study(*cx.bp, cx.cfg.eps_list, cx.cfg.cells_per_eps, cx.cfg.jobs);
  csv_header(cx);
  *cx.out << "# fit_c " << fmt(d.fit_c) << "\n# fit_rel_residual " << fmt(d.fit_rel_residual)
          << "\n# strictly_decreasing " << (d.strictly_decreasing ? "true" : "false") << "\n";
  *cx.out << "eps,h,n,energy\n";
  for (const auto& r : d.rows) *cx.out << fmt(r.eps) << ',' << fmt(r.h) << ',' << r.n << ',' << fmt(r.energy) << '\n';
}

void cmd_entropy_check(Context& cx) {
  const auto& c = cx.cfg;
  const auto rows = heaviside_study(cx.bp, cx.bp->gamma(c.xi_theta), c.deltas, c.lambda_nodes, c.points, 0.25,
                                    static_cast<unsigned>(c.seed));
  bool err_mono = true;
  bool mu_mono = true;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].max_error < rows[k - 1].max_error)) err_mono = false;
    if (!(rows[k].mu_l1 < rows[k - 1].mu_l1)) mu_mono = false;
  }
  csv_header(cx);
  *cx.out << "# error_decreasing " << (err_mono ? "true" : "false") << "\n# mu_l1_decreasing "
          << (mu_mono ? "true" : "false") << "\n";
  *cx.out << "delta,max_error,mu_l1\n";
  for (const auto& r : rows) *cx.out << fmt(r.delta) << ',' << fmt(r.max_error) << ',' << fmt(r.mu_l1) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"anisoag: jump costs, entropies and field experiments for anisotropic Aviles-Giga energies"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");
  const nlohmann::json defaults = to_json(ExperimentConfig{});
  std::map<std::string, std::string> flag_text;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const auto& [key, value] : defaults.items()) {
    if (key == "command") continue;
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag_opts[key] = app.add_option("--" + flag, flag_text[key], "config key " + key);
  }
  const char* commands[][2] = {
      {"norm-info", "rescale factor, perimeter and convexity diagnostics (JSON)"},
      {"gamma-table", "arc-length table of the boundary (CSV)"},
      {"cost", "c1d, cent and Pi for one jump (JSON)"},
      {"cost-scan", "costs over a grid of jumps (CSV)"},
      {"verify-bounds", "ratio envelopes, cent <= Pi check and small-jump limit (JSON)"},
      {"profile", "optimal one-dimensional transition (CSV)"},
      {"minimize", "minimize the energy with straight-jump boundary data (JSON)"},
      {"vortex-study", "energies of the smoothed vortex along eps (CSV)"},
      {"entropy-check", "Heaviside entropy convergence along delta (CSV)"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    Context cx;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config " + config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
      }
      cx.cfg = config_from_json(j);
    }
    nlohmann::json merged = to_json(cx.cfg);
    for (const auto& [key, opt] : flag_opts) {
      if (opt->count() > 0) merged[key] = flag_value(flag_text[key], defaults.at(key), key);
    }
    merged["command"] = app.get_subcommands().front()->get_name();
    cx.cfg = config_from_json(merged);
    require(cx.cfg.resolution >= 64, "resolution must be at least 64");
    require(cx.cfg.jobs >= 1, "jobs must be at least 1");

    cx.bp = std::make_shared<const BoundaryParam>(BoundaryParam::trace(resolve_norm(cx.cfg.norm), cx.cfg.resolution));
    cx.hash = config_hash(cx.cfg);
    log << "# kappa " << fmt(cx.bp->kappa()) << "\n# config " << to_json(cx.cfg).dump() << "\n# config_hash "
        << cx.hash << "\n";
    if (cx.bp->flatness_warning()) log << "# warning: boundary is nearly flat somewhere\n";

    std::ofstream file;
    if (!cx.cfg.output.empty()) {
      file.open(cx.cfg.output, std::ios::binary);
      if (!file) throw std::invalid_argument("cannot write " + cx.cfg.output);
    }
    std::ostringstream buffer;
    cx.out = &buffer;
    const std::string& cmd = cx.cfg.command;
    if (cmd == "norm-info") cmd_norm_info(cx);
    else if (cmd == "gamma-table") cmd_gamma_table(cx);
    else if (cmd == "cost") cmd_cost(cx);
    else if (cmd == "cost-scan") cmd_cost_scan(cx);
    else if (cmd == "verify-bounds") cmd_verify_bounds(cx);
    else if (cmd == "profile") cmd_profile(cx, log);
    else if (cmd == "minimize") cmd_minimize(cx, log);
    else if (cmd == "vortex-study") cmd_vortex_study(cx);
    else if (cmd == "entropy-check") cmd_entropy_check(cx);
    else throw std::invalid_argument("unknown command " + cmd);

    if (cx.cfg.output.empty()) {
      out << buffer.str();
    } else {
      file << buffer.str();
      if (!file) throw std::invalid_argument("write failed: " + cx.cfg.output);
    }
    return 0;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace anisoag
