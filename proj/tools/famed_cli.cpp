#include <chrono>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "famed/asymptotics.hpp"
#include "famed/famed_check.hpp"
#include "famed/geometry.hpp"
#include "famed/json_io.hpp"
#include "famed/one_loop.hpp"
#include "famed/potential.hpp"
#include "famed/triangulation.hpp"

namespace {

using namespace famed;

struct Tols {
  double newton = 1e-13;
  double delta = 1e-3;
};

Tols load_tols() {
  Tols t;
  if (const char* env = std::getenv("FAMED_TOL")) {
    try {
      t.newton = std::stod(env);
    } catch (...) {
    }
  }
  return t;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string input_digest(const std::string& text) {
  // FNV-1a, enough to tie a report to its input
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

int famed_exit_code(const FamedCertificate& cert) {
  if (cert.famed_lm()) return 0;
  if (cert.famed_l()) return 2;
  return 3;
}

ordered_json tols_json(const Tols& t) {
  return ordered_json{{"newton", t.newton}, {"cut_delta", t.delta}};
}

int run_check_one(const std::string& path, bool verify, const Tols& tols, bool compact) {
  const std::string text = read_input(path);
  ordered_json out;
  out["input"] = path;
  out["digest"] = input_digest(text);
  out["tolerances"] = tols_json(tols);
  int code;
  try {
    OrderedTriangulation t = parse_triangulation(text);
    FamedCertificate cert = check_def_1_7(t);
    out["certificate"] = certificate_to_json(cert);
    if (verify) out["witnesses_verified"] = verify_certificate(cert, t);
    code = famed_exit_code(cert);
  } catch (const ParseError& e) {
    out["error"] = {{"code", e.code}, {"message", e.what()}};
    code = 1;
  } catch (const std::exception& e) {
    out["error"] = {{"code", "InternalError"}, {"message", e.what()}};
    code = 1;
  }
  out["exit_code"] = code;
  std::cout << (compact ? out.dump() : out.dump(2)) << "\n";
  return code;
}

NzPair pair_for_curve(const OrderedTriangulation& t, const PeripheralCurve& curve) {
  return build_nz_pair(build_gluing_matrices(t, curve));
}

int cmd_solve(const std::string& path, double xi_re, double xi_im, const std::string& curve,
              double wm, int steps, bool verify, const Tols& tols) {
  const std::string text = read_input(path);
  ordered_json out;
  out["input"] = path;
  out["digest"] = input_digest(text);
  out["tolerances"] = tols_json(tols);
  try {
    OrderedTriangulation t = parse_triangulation(text);
    FamedCertificate cert = check_def_1_7(t);
    if (!cert.famed_l()) {
      out["error"] = {{"code", "NotFamed"}, {"message", "first definition fails"}};
      std::cout << out.dump(2) << "\n";
      return 3;
    }
    const GluingMatrices gm = build_gluing_matrices(t, t.longitude);
    const NzPair p_l = pair_for_curve(t, t.longitude);
    const Flattening fl = solve_strong_flattening(gm, t.meridian);
    ShapeAssignment shapes;
    if (curve == "m") {
      const NzPair p_m = pair_for_curve(t, t.meridian);
      DeformationPath path = deform_path(p_m, t.longitude, cplx(wm, 0.0), steps);
      shapes = path.samples.back().shapes;
      out["wm"] = wm;
      out["wl"] = complex_to_json(path.w_other.back());
    } else {
      // continuation from the complete structure keeps the branch and
      // enforces the deformation radius
      DeformationPath path = deform_path(p_l, t.meridian, cplx(xi_re, xi_im),
                                         std::max(1, steps));
      const ConeStructure& cs = path.samples.back();
      shapes = cs.shapes;
      out["xi"] = complex_to_json(cs.xi);
      out["residual"] = cs.residual;
      out["jacobian_condition"] = cs.jacobian_condition;
      out["num_flat"] = cs.num_flat;
      out["negatively_oriented"] = cs.negatively_oriented;
    }
    out["shapes"] = shapes_to_json(shapes);
    out["volume"] = volume(shapes);
    out["holonomies"] = {{"meridian", complex_to_json(holonomy(shapes, t.meridian))},
                         {"longitude", complex_to_json(holonomy(shapes, t.longitude))}};
    const GluingMatrices gm_curve =
        build_gluing_matrices(t, curve == "m" ? t.meridian : t.longitude);
    OneLoopValue tau = one_loop_invariant(shapes, gm_curve, fl);
    out["one_loop"] = {{"tau", complex_to_json(tau.tau)}, {"abs", std::abs(tau.tau)}};
    if (verify) {
      out["verify"] = {{"polynomial_residual", shapes.polynomial_residual()},
                       {"flattening_ok", verify_flattening(gm, t.meridian, fl)}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const ParseError& e) {
    out["error"] = {{"code", e.code}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  } catch (const ContinuationBreakdown& e) {
    out["error"] = {{"code", "ContinuationBreakdown"}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 4;
  } catch (const std::exception& e) {
    out["error"] = {{"code", "InternalError"}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  }
}

int cmd_report(const std::string& path, bool verify, const Tols& tols) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::string text = read_input(path);
  ordered_json out;
  out["input"] = path;
  out["digest"] = input_digest(text);
  out["tolerances"] = tols_json(tols);
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
        .count();
  };
  try {
    OrderedTriangulation t = parse_triangulation(text);
    FamedCertificate cert = check_def_1_7(t);
    out["certificate"] = certificate_to_json(cert);
    if (verify) out["witnesses_verified"] = verify_certificate(cert, t);
    const double t_cert = elapsed_ms();
    if (cert.famed_l()) {
      const GluingMatrices gm = build_gluing_matrices(t, t.longitude);
      const NzPair p_l = pair_for_curve(t, t.longitude);
      const Flattening fl = solve_strong_flattening(gm, t.meridian);
      ConeStructure cs = solve_gluing(p_l, 0.0, std::nullopt, tols.newton);
      out["geometry"] = {{"shapes", shapes_to_json(cs.shapes)},
                         {"volume", volume(cs.shapes)},
                         {"residual", cs.residual},
                         {"jacobian_condition", cs.jacobian_condition},
                         {"meridian_holonomy", complex_to_json(holonomy(cs.shapes, t.meridian))},
                         {"longitude_holonomy", complex_to_json(holonomy(cs.shapes, t.longitude))}};
      OneLoopValue tau = one_loop_invariant(cs.shapes, gm, fl);
      out["one_loop"] = {{"tau", complex_to_json(tau.tau)}, {"abs", std::abs(tau.tau)}};
      ordered_json flj;
      for (int i = 0; i < t.N; ++i) {
        flj["f"].push_back(fl.f[i].str());
        flj["fp"].push_back(fl.fp[i].str());
        flj["fpp"].push_back(fl.fpp[i].str());
      }
      out["strong_flattening"] = flj;
      if (verify)
        out["geometry_verified"] = {{"polynomial_residual", cs.shapes.polynomial_residual()},
                                    {"flattening_ok", verify_flattening(gm, t.meridian, fl)}};
    }
    out["timings_ms"] = {{"certificate", t_cert}, {"total", elapsed_ms()}};
    std::cout << out.dump(2) << "\n";
    return famed_exit_code(cert);
  } catch (const ParseError& e) {
    out["error"] = {{"code", e.code}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    out["error"] = {{"code", "InternalError"}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  }
}

int cmd_asymptotics(const std::string& path, const std::string& mode,
                    std::vector<double> hbars, double w_re, const std::string& tsv_path,
                    const Tols& tols) {
  const std::string text = read_input(path);
  ordered_json out;
  out["input"] = path;
  out["digest"] = input_digest(text);
  out["tolerances"] = tols_json(tols);
  try {
    if (hbars.empty()) throw InsufficientSamples("empty hbar list");
    OrderedTriangulation t = parse_triangulation(text);
    FamedCertificate cert = check_def_1_7(t);
    if ((mode == "Z" && !cert.famed_l()) || (mode == "J" && !cert.famed_lm())) {
      out["error"] = {{"code", "NotFamed"}, {"message", "required definition fails"}};
      std::cout << out.dump(2) << "\n";
      return 3;
    }
    if (!cert.angles.feasible) throw std::runtime_error("no angle structure");
    PotentialContext ctx = build_context(t, cert, cert.angles.alpha);
    ctx.delta = tols.delta;
    std::vector<std::pair<double, double>> samples;
    for (double hb : hbars) {
      double lv;
      if (mode == "Z") {
        lv = partition_modulus(ctx, 0.0, hb).log_abs;
      } else {
        lv = jones_value(ctx, hb, cplx(w_re, 0.0)).log_abs;
      }
      samples.emplace_back(hb, lv);
    }
    AsymptoticFit fit = volume_slope_fit(samples, mode == "J");
    out["mode"] = mode;
    if (mode == "J") out["w"] = w_re;
    ordered_json samp = ordered_json::array();
    for (auto& [hb, lv] : samples) samp.push_back({{"hbar", hb}, {"log_abs", lv}});
    out["samples"] = samp;
    out["slope"] = fit.slope;
    out["slope_error"] = fit.slope_error;
    out["prefactor_drift"] = fit.prefactor_drift;
    if (!tsv_path.empty()) {
      std::ofstream tsv(tsv_path);
      tsv << "hbar\tlog_abs\ttwo_pi_hbar_log\n";
      for (auto& [hb, lv] : samples)
        tsv << hb << "\t" << lv << "\t" << 2.0 * std::numbers::pi * hb * lv << "\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const ParseError& e) {
    out["error"] = {{"code", e.code}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    out["error"] = {{"code", "InternalError"}, {"message", e.what()}};
    std::cout << out.dump(2) << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized FAMED checks, gluing solves and TQFT asymptotics"};
  app.require_subcommand(1);
  const Tols tols = load_tols();

  std::string path;
  bool verify = false;
  std::string batch_dir;

  auto* check = app.add_subcommand("check", "decide the FAMED conditions");
  check->add_option("path", path, "triangulation file (or - for stdin)");
  check->add_flag("--verify", verify, "re-verify embedded witnesses");
  check->add_option("--batch", batch_dir, "run every .json file in a directory");

  double xi_re = 0, xi_im = 0, wm = 0;
  std::string curve = "l";
  int steps = 20;
  auto* solve = app.add_subcommand("solve", "solve the gluing equations");
  solve->add_option("path", path)->required();
  solve->add_option("--xi", xi_re, "longitude holonomy target (real part)");
  solve->add_option("--xi-im", xi_im, "longitude holonomy target (imaginary part)");
  solve->add_option("--curve", curve, "l (default) or m");
  solve->add_option("--wm", wm, "meridian holonomy target for --curve m");
  solve->add_option("--steps", steps, "continuation steps");
  solve->add_flag("--verify", verify);

  std::string mode = "Z", hbar_list = "0.125,0.0833333333333333,0.0625,0.0416666666666667,0.03125";
  std::string tsv_path;
  double w_re = 0;
  auto* asym = app.add_subcommand("asymptotics", "partition / Jones slope fits");
  asym->add_option("path", path)->required();
  asym->add_option("--mode", mode, "Z or J");
  asym->add_option("--hbar-list", hbar_list, "comma separated hbar values");
  asym->add_option("--w", w_re, "meridian holonomy for mode J");
  asym->add_option("--tsv", tsv_path, "write a plot-ready table");

  auto* report = app.add_subcommand("report", "certificate plus geometry in one JSON");
  report->add_option("path", path)->required();
  report->add_flag("--verify", verify);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      if (!batch_dir.empty()) {
        int worst = 0;
        std::vector<std::string> files;
        for (const auto& e : std::filesystem::directory_iterator(batch_dir))
          if (e.path().extension() == ".json") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) worst = std::max(worst, run_check_one(f, verify, tols, true));
        return worst == 1 ? 1 : 0;
      }
      if (path.empty()) {
        std::cerr << "check: need a path or --batch\n";
        return 1;
      }
      return run_check_one(path, verify, tols, false);
    }
    if (solve->parsed()) return cmd_solve(path, xi_re, xi_im, curve, wm, steps, verify, tols);
    if (asym->parsed()) {
      std::vector<double> hbars;
      std::stringstream ss(hbar_list);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) hbars.push_back(std::stod(tok));
      return cmd_asymptotics(path, mode, hbars, w_re, tsv_path, tols);
    }
    if (report->parsed()) return cmd_report(path, verify, tols);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
