#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "output.hpp"
#include "qpspec/gaps.hpp"
#include "qpspec/kam.hpp"
#include "qpspec/rotnum.hpp"
#include "qpspec/spectrum.hpp"

namespace qpcli {

using nlohmann::json;

namespace {

struct Context {
  const RunConfig& cfg;
  qps::Frequency freq;
  qps::ScalarSeries V;
  int threads;
  OutputDir out;
  Manifest manifest;

  template <class F>
  auto stage(const std::string& name, F&& f) {
    StageTimer t{name};
    auto r = f();
    manifest.stage_done(t);
    return r;
  }
};

std::vector<double> energies_or_default(const Context& ctx) {
  if (!ctx.cfg.numerics.energies.empty()) return ctx.cfg.numerics.energies;
  double r = 2.5 + ctx.V.l1_norm();
  std::vector<double> e;
  for (int i = 0; i <= 200; ++i) e.push_back(-r + 2.0 * r * i / 200);
  return e;
}

qps::SpectralSample sample(Context& ctx) {
  const auto& n = ctx.cfg.numerics;
  return ctx.stage("spectral_sample", [&] {
    return qps::spectral_sample(ctx.V, ctx.freq, n.L, n.phases, ctx.threads);
  });
}

std::vector<qps::Interval> scan(Context& ctx, const qps::SpectralSample& s) {
  return ctx.stage("spectrum_scan", [&] { return qps::spectrum_scan(s, ctx.cfg.numerics.resolution); });
}

qps::GapDetection gaps(Context& ctx, const qps::SpectralSample& s,
                       const std::vector<qps::Interval>& intervals) {
  const auto& n = ctx.cfg.numerics;
  double min_len = n.min_length > 0.0 ? n.min_length : 4.0 / n.L;
  auto det = ctx.stage("detect_gaps", [&] { return qps::detect_gaps(intervals, s, min_len); });
  ctx.stage("label_gaps", [&] {
    qps::label_gaps(det.gaps, ctx.freq, n.label_M_max, n.label_tol);
    return 0;
  });
  if (n.refine_edges) {
    ctx.stage("refine_gap_edges", [&] {
      for (auto& g : det.gaps) {
        auto m = g.m;
        double defect = g.label_defect;
        g = qps::refine_gap_edges(ctx.V, ctx.freq, g, n.L, n.edge_tol, n.phases);
        g.m = m;
        g.label_defect = defect;
      }
      return 0;
    });
  }
  return det;
}

Table gap_table(const std::vector<qps::GapRecord>& gs) {
  Table t{{"m", "E_minus", "E_plus", "length", "N_plateau", "label_defect"}, {}};
  for (const auto& g : gs)
    t.add({index_string(g.m), g.E_minus, g.E_plus, g.length, g.N_plateau, g.label_defect});
  return t;
}

std::vector<double> holder_eps_or_default(const Context& ctx) {
  if (!ctx.cfg.numerics.holder_eps.empty()) return ctx.cfg.numerics.holder_eps;
  std::vector<double> e;
  for (int p = 12; p >= 4; --p) e.push_back(std::ldexp(1.0, -p));
  return e;
}

json holder_json(const qps::HolderReport& h) {
  return {{"C0_hat", h.C0_hat}, {"E_arg", h.E_arg},        {"eps_arg", h.eps_arg},
          {"eps", h.eps},       {"max_ratio", h.max_ratio}, {"ratio_slope", h.ratio_slope},
          {"violation", h.violation}};
}

json separation_json(const qps::SeparationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back({{"kind", x.kind}, {"i", x.i}, {"j", x.j}, {"distance", x.distance}, {"bound", x.bound}});
  return {{"checks", r.checks}, {"pass", r.pass()}, {"violations", v}};
}

json mat_json(const qps::Mat2& m) { return json::array({m.a, m.b, m.c, m.d}); }
json sl2_json(const qps::Sl2& x) { return json::array({x.h, x.e, x.f}); }

// ---- subcommands ----------------------------------------------------------

int cmd_ids(Context& ctx) {
  auto s = sample(ctx);
  auto curve = ctx.stage("ids_curve", [&] { return qps::ids_curve(s, energies_or_default(ctx)); });
  Table t{{"E", "N"}, {}};
  for (std::size_t i = 0; i < curve.energy.size(); ++i) t.add({curve.energy[i], curve.N[i]});
  ctx.out.write_table("ids", t);
  return 0;
}

int cmd_scan(Context& ctx) {
  auto s = sample(ctx);
  auto iv = scan(ctx, s);
  Table t{{"lo", "hi"}, {}};
  for (const auto& i : iv) t.add({i.lo, i.hi});
  ctx.out.write_table("scan", t);
  return 0;
}

int cmd_gaps(Context& ctx) {
  auto s = sample(ctx);
  auto iv = scan(ctx, s);
  auto det = gaps(ctx, s, iv);
  ctx.out.write_table("gaps", gap_table(det.gaps));

  auto holder = ctx.stage("holder_modulus", [&] {
    double pad = 2.0 * holder_eps_or_default(ctx).back();
    auto curve = qps::ids_curve(s, det.E_min - pad, det.E_max + pad, 20001);
    return qps::holder_modulus(curve, holder_eps_or_default(ctx));
  });
  json report = {{"E_min", det.E_min}, {"E_max", det.E_max}, {"holder", holder_json(holder)}};
  if (holder.C0_hat > 0.0) {
    auto sep = ctx.stage("gap_separation", [&] {
      return qps::gap_separation_check(det.gaps, det.E_min, det.E_max, ctx.freq, holder.C0_hat);
    });
    report["separation"] = separation_json(sep);
  }
  ctx.out.write_json("gaps_report.json", report);
  return 0;
}

int cmd_decay(Context& ctx) {
  auto s = sample(ctx);
  auto iv = scan(ctx, s);
  auto det = gaps(ctx, s, iv);
  int k = ctx.cfg.numerics.k;
  auto norm = qps::ck_norm(ctx.V, k);
  auto rep = ctx.stage("decay_profile", [&] { return qps::decay_profile(det.gaps, norm.upper, k); });
  Table t{{"m", "length", "bound", "pass"}, {}};
  for (const auto& it : rep.items)
    t.add({index_string(it.m), it.length, it.bound, std::string(it.pass ? "pass" : "fail")});
  ctx.out.write_table("decay", t);
  ctx.out.write_json("decay_report.json",
                     {{"k", k},
                      {"ck_norm_lower", norm.lower},
                      {"ck_norm_upper", norm.upper},
                      {"slope", std::isfinite(rep.slope) ? json(rep.slope) : json(nullptr)},
                      {"all_pass", rep.all_pass}});
  return 0;
}

int cmd_homog(Context& ctx) {
  auto s = sample(ctx);
  auto iv = scan(ctx, s);
  const auto& n = ctx.cfg.numerics;
  auto prof = ctx.stage("homogeneity_profile",
                        [&] { return qps::homogeneity_profile(iv, n.homog_eps, n.homog_samples); });
  Table t{{"eps", "mu", "argmin_E"}, {}};
  for (std::size_t i = 0; i < prof.eps.size(); ++i) t.add({prof.eps[i], prof.mu[i], prof.argmin_E[i]});
  ctx.out.write_table("homog", t);
  return 0;
}

int cmd_rotation(Context& ctx) {
  std::vector<double> theta0(ctx.freq.dim(), 0.0);
  long iters = ctx.cfg.numerics.rotation_iters;
  Table t{{"E", "rho", "iterations", "error"}, {}};
  ctx.stage("rotation_number", [&] {
    for (double E : energies_or_default(ctx)) {
      auto r = qps::rotation_number(qps::Cocycle::schrodinger(ctx.V, E, ctx.freq), theta0, iters);
      t.add({E, r.rho, static_cast<long long>(r.iterations), r.error});
    }
    return 0;
  });
  ctx.out.write_table("rotation", t);
  return 0;
}

Table ledger_table(const qps::KamState& s) {
  Table t{{"step", "kind", "norm_before", "norm_after", "rho", "window", "threshold", "n_star",
           "inner_iterations", "residual", "residual_tol", "bch_defect"},
          {}};
  long long i = 0;
  for (const auto& e : s.ledger)
    t.add({i++, e.kind, e.norm_before, e.norm_after, e.rho, static_cast<long long>(e.window),
           e.threshold, e.n_star ? index_string(*e.n_star) : std::string(),
           static_cast<long long>(e.inner_iterations), e.residual, e.residual_tol, e.bch_defect});
  return t;
}

json kam_summary(const qps::KamState& s) {
  json sites = json::array();
  for (const auto& n : s.resonant_sites) sites.push_back(n);
  auto er = qps::eigen_rho(s.A);
  return {{"A", mat_json(s.A)},
          {"kind", qps::to_string(er.kind)},
          {"rho", er.rho},
          {"final_norm", s.norm()},
          {"steps", s.ledger.size()},
          {"deg_accum", s.deg_accum},
          {"resonant_sites", sites},
          {"residual", qps::conjugacy_residual(s)},
          {"residual_tol", qps::residual_tolerance(s)},
          {"B_sup_norm", s.B.sup_norm(64)}};
}

int cmd_kam(Context& ctx) {
  const auto& spec = ctx.cfg.kam;
  if (!spec.energy && !spec.constant) throw ConfigError("kam: section missing (needs 'E', 'constant' or 'rotation')");
  qps::Cocycle c = spec.energy
                       ? qps::Cocycle::schrodinger(ctx.V, *spec.energy, ctx.freq)
                       : qps::Cocycle::kam_form(*spec.constant,
                                                spec.has_perturbation
                                                    ? spec.perturbation
                                                    : qps::MatrixSeries(ctx.freq.dim(), 0),
                                                ctx.freq);
  try {
    auto s = ctx.stage("kam_run", [&] { return qps::continuation_run(c, ctx.cfg.numerics.k, spec.options); });
    ctx.out.write_table("kam_ledger", ledger_table(s));
    ctx.out.write_json("kam_summary.json", kam_summary(s));
    return 0;
  } catch (const qps::DivergenceError& e) {
    ctx.out.write_table("kam_ledger", ledger_table(e.state));
    json j = kam_summary(e.state);
    j["error"] = e.what();
    ctx.out.write_json("kam_summary.json", j);
    throw;
  }
}

// gaps file from a prior `gaps` run, CSV or JSON
std::vector<qps::GapRecord> read_gaps_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InventoryError("gaps file '" + path + "' not found");
  auto parse_m = [&](const std::string& s) {
    qps::Index m;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) {
      try {
        m.push_back(std::stoi(part));
      } catch (const std::exception&) {
        throw InventoryError("gaps file '" + path + "': bad label '" + s + "'");
      }
    }
    return m;
  };
  std::vector<qps::GapRecord> out;
  if (std::filesystem::path(path).extension() == ".json") {
    json j;
    try {
      j = json::parse(in);
      for (const auto& r : j) {
        qps::GapRecord g;
        g.m = parse_m(r.at("m").get<std::string>());
        g.E_minus = r.at("E_minus").get<double>();
        g.E_plus = r.at("E_plus").get<double>();
        g.length = r.at("length").get<double>();
        g.N_plateau = r.at("N_plateau").get<double>();
        out.push_back(g);
      }
    } catch (const json::exception& e) {
      throw InventoryError("gaps file '" + path + "': " + e.what());
    }
    return out;
  }
  std::string line;
  if (!std::getline(in, line)) throw InventoryError("gaps file '" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InventoryError("gaps file '" + path + "': no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t cm = col("m"), clo = col("E_minus"), chi = col("E_plus"), clen = col("length"),
              cN = col("N_plateau");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw InventoryError("gaps file '" + path + "': ragged row");
    qps::GapRecord g;
    try {
      g.m = parse_m(cells[cm]);
      g.E_minus = std::stod(cells[clo]);
      g.E_plus = std::stod(cells[chi]);
      g.length = std::stod(cells[clen]);
      g.N_plateau = std::stod(cells[cN]);
    } catch (const std::logic_error&) {
      throw InventoryError("gaps file '" + path + "': unreadable row");
    }
    out.push_back(g);
  }
  return out;
}

int cmd_edge(Context& ctx) {
  if (!ctx.cfg.edge) throw ConfigError("edge: section missing (needs 'gaps_file' and 'label')");
  const auto& spec = *ctx.cfg.edge;
  auto records = read_gaps_file(spec.gaps_file);
  auto it = std::find_if(records.begin(), records.end(),
                         [&](const qps::GapRecord& g) { return g.m == spec.label; });
  if (it == records.end())
    throw InventoryError("label " + index_string(spec.label) + " not in '" + spec.gaps_file + "'");
  const qps::GapRecord gap = *it;

  qps::ParabolicOptions popt;
  popt.kam = ctx.cfg.kam.options;
  int k = ctx.cfg.numerics.k;
  auto pol = ctx.stage("polish_edge", [&] {
    return qps::polish_gap_edge(ctx.V, ctx.freq, gap.E_plus, k, popt.kam);
  });
  // gap label m is N = <m, alpha>; the reduction uses 2 rho = <-m, alpha>
  auto pr = ctx.stage("parabolic", [&] {
    return qps::parabolic_from_state(pol.state, qps::FourierSeries<qps::cd>::negate(gap.m), popt);
  });

  json report = {{"label", gap.m},
                 {"E_plus_input", gap.E_plus},
                 {"E_edge", pol.E},
                 {"trace_defect", pol.trace_defect},
                 {"polish_iterations", pol.iterations},
                 {"zeta", pr.zeta},
                 {"sign", pr.sign},
                 {"H", mat_json(pr.H)},
                 {"residual", pr.residual},
                 {"X_sup_norm", pr.X.sup_norm(64)},
                 {"measured_length", gap.length}};
  double delta1 = 0.0, predicted = std::nan("");
  std::string status;
  if (pr.zeta > 0.0 && pr.zeta < 0.5) {
    delta1 = std::exp(17.0 / 18.0 * std::log(pr.zeta));
    auto mp = ctx.stage("moser_poschel", [&] {
      return qps::moser_poschel_step(pr.X, pr.zeta, delta1, ctx.freq, popt.kam, false);
    });
    auto gb = qps::gap_edge_bound(mp, pr.zeta);
    predicted = gb.predicted_gap_upper;
    status = gb.rotation_positive ? "rotation_positive" : "hypotheses_failed";
    report["moser_poschel"] = {{"b0", sl2_json(mp.b0)},
                               {"b1", sl2_json(mp.b1)},
                               {"X11_sq", mp.X11_sq},
                               {"X11_X12", mp.X11_X12},
                               {"X12_sq", mp.X12_sq},
                               {"cauchy_schwarz", mp.cauchy_schwarz()},
                               {"d_of_delta1", mp.d_of_delta(delta1)},
                               {"d_direct", mp.d_direct(delta1)},
                               {"P1_norm", mp.P1_norm},
                               {"P1_norm_bound", mp.P1_norm_bound},
                               {"delta_guard", mp.delta_guard},
                               {"guard_ok", mp.guard_ok}};
    report["gap_edge_bound"] = {{"delta1", gb.delta1},
                                {"kappa", gb.kappa},
                                {"hyp_ratio", gb.hyp_ratio},
                                {"hyp_cs", gb.hyp_cs},
                                {"det_bound", gb.det_bound},
                                {"det_value", gb.det_value},
                                {"rotation_lower", gb.rotation_lower},
                                {"rotation_positive", gb.rotation_positive},
                                {"predicted_gap_upper", gb.predicted_gap_upper},
                                {"failed", gb.failed}};
  } else {
    status = pr.zeta <= 0.0 ? "zeta_not_positive" : "zeta_too_large";
  }
  report["status"] = status;

  Table t{{"m", "E_edge", "zeta", "delta1", "predicted_gap_upper", "measured_length", "status"}, {}};
  t.add({index_string(gap.m), pol.E, pr.zeta, delta1, predicted, gap.length, status});
  ctx.out.write_table("edge", t);
  ctx.out.write_json("edge_report.json", report);
  return 0;
}

const std::map<std::string, std::function<int(Context&)>>& table() {
  static const std::map<std::string, std::function<int(Context&)>> t = {
      {"ids", cmd_ids},     {"gaps", cmd_gaps},         {"decay", cmd_decay}, {"homog", cmd_homog},
      {"rotation", cmd_rotation}, {"kam", cmd_kam}, {"edge", cmd_edge},   {"scan", cmd_scan}};
  return t;
}

}  // namespace

int run_command(const Invocation& inv) {
  auto it = table().find(inv.command);
  if (it == table().end()) throw ConfigError("unknown command '" + inv.command + "'");
  auto freq = inv.config.validated_frequency();
  Context ctx{inv.config, freq, inv.config.potential_series(), inv.threads,
              OutputDir(inv.config.out_dir, inv.config.format), Manifest(inv.command, inv.config.raw)};
  int code = 0;
  try {
    code = it->second(ctx);
  } catch (...) {
    ctx.manifest.write(ctx.out);
    throw;
  }
  ctx.manifest.write(ctx.out);
  return code;
}

}  // namespace qpcli
