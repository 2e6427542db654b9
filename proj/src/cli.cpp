#include "eknot/cli.hpp"

#include "eknot/diagnostics.hpp"
#include "eknot/energy.hpp"
#include "eknot/error.hpp"
#include "eknot/families.hpp"
#include "eknot/io.hpp"
#include "eknot/optimize.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace eknot {

namespace {

struct CommonOutput {
  std::string output;
  bool force = false;
};

void emit(const std::string& text, const CommonOutput& o, std::ostream& out) {
  if (o.output.empty() || o.output == "-") {
    out << text;
  } else {
    write_file(o.output, text, o.force);
  }
}

Curve load_curve(const std::string& path) { return curve_from_string(read_file(path)); }

Json provenance(const std::string& command, const std::vector<std::string>& args) {
  Json p;
  p["tool"] = "eknot";
  p["version"] = kVersion;
  p["command"] = command;
  p["args"] = args;
  return p;
}

struct OptimizeFlags {
  std::string method = "gradient";
  std::string repulsion = "moebius";
  std::string trace;
  bool no_precondition = false;
  OptimizeOptions opts;

  void add(CLI::App* app) {
    app->add_option("--method", method, "gradient | anneal | hybrid")
        ->check(CLI::IsMember({"gradient", "anneal", "hybrid"}));
    app->add_option("--repulsion", repulsion, "moebius | ropelength")
        ->check(CLI::IsMember({"moebius", "ropelength"}));
    app->add_option("--lambda", opts.lambda, "Moebius prefactor");
    app->add_option("--max-steps", opts.max_steps, "gradient steps or anneal moves");
    app->add_option("--polish-steps", opts.polish_steps, "gradient steps after annealing (hybrid)");
    app->add_option("--step-size", opts.step_size, "initial gradient step");
    app->add_option("--tolerance", opts.tolerance, "relative decrease threshold over the window");
    app->add_option("--window", opts.window, "steps in the stopping window");
    app->add_option("--seed", opts.seed, "random seed");
    app->add_option("--t-start", opts.anneal.t_start, "initial anneal temperature");
    app->add_option("--t-end", opts.anneal.t_end, "final anneal temperature");
    app->add_option("--moves-per-temp", opts.anneal.moves_per_temp, "anneal moves per temperature level");
    app->add_option("--move-amplitude", opts.anneal.move_amplitude, "move size as a fraction of thickness");
    app->add_flag("--no-precondition", no_precondition, "use the raw gradient");
  }

  OptimizeOptions resolve() const {
    OptimizeOptions o = opts;
    o.method = method == "anneal" ? Method::anneal : method == "hybrid" ? Method::hybrid : Method::gradient;
    o.repulsion = repulsion == "ropelength" ? Repulsion::ropelength : Repulsion::moebius;
    o.precondition = !no_precondition;
    return o;
  }

  Json to_json() const {
    const OptimizeOptions o = resolve();
    return Json{{"method", method},
                {"repulsion", repulsion},
                {"lambda", o.lambda},
                {"max_steps", o.max_steps},
                {"polish_steps", o.polish_steps},
                {"step_size", o.step_size},
                {"tolerance", o.tolerance},
                {"window", o.window},
                {"seed", o.seed},
                {"precondition", o.precondition},
                {"anneal", {{"t_start", o.anneal.t_start},
                            {"t_end", o.anneal.t_end},
                            {"cooling", "geometric"},
                            {"moves_per_temp", o.anneal.moves_per_temp},
                            {"move_amplitude", o.anneal.move_amplitude}}}};
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);

  CLI::App app{"Elastic knots: energies, minimization and diagnostics of closed polygons", "eknot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // gen
  CommonOutput gen_out;
  std::string family;
  TorusKnotSpec torus;
  double phi = 0.0;
  int cover = 1;
  std::size_t n = 1024;
  auto* gen = app.add_subcommand("gen", "generate a family curve");
  gen->add_option("family", family, "circle | torus | tangential-pair | covered-circle")
      ->required()
      ->check(CLI::IsMember({"circle", "torus", "tangential-pair", "covered-circle"}));
  gen->add_option("--a", torus.a, "torus knot longitudinal winding");
  gen->add_option("--b", torus.b, "torus knot meridional winding");
  gen->add_option("--rho", torus.rho, "torus tube radius");
  gen->add_option("--phi", phi, "opening angle of the tangential pair");
  gen->add_option("--k", cover, "covering number of the circle");
  gen->add_option("--n", n, "vertex count");
  gen->add_option("-o,--output", gen_out.output, "output path (stdout when omitted)");
  gen->add_flag("--force", gen_out.force, "overwrite an existing output");

  // eval
  CommonOutput eval_out;
  std::string eval_in;
  double eval_theta = 0.0;
  double eval_lambda = 1.0;
  std::string eval_repulsion = "ropelength";
  std::string eval_thickness = "litherland";
  auto* eval = app.add_subcommand("eval", "evaluate the energy report of a curve");
  eval->add_option("input", eval_in, "curve file")->required();
  eval->add_option("--theta", eval_theta, "penalty weight");
  eval->add_option("--lambda", eval_lambda, "Moebius prefactor");
  eval->add_option("--repulsion", eval_repulsion, "ropelength | moebius")
      ->check(CLI::IsMember({"moebius", "ropelength"}));
  eval->add_option("--thickness", eval_thickness, "litherland | triples")
      ->check(CLI::IsMember({"litherland", "triples"}));
  eval->add_option("-o,--output", eval_out.output, "output path (stdout when omitted)");
  eval->add_flag("--force", eval_out.force, "overwrite an existing output");

  // minimize
  CommonOutput min_out;
  std::string min_in;
  double min_theta = 0.0;
  std::string min_report;
  OptimizeFlags min_flags;
  auto* mini = app.add_subcommand("minimize", "minimize the total energy from a start curve");
  mini->add_option("input", min_in, "start curve file")->required();
  mini->add_option("--theta", min_theta, "penalty weight")->required();
  min_flags.add(mini);
  mini->add_option("--trace", min_flags.trace, "write the energy trace CSV here");
  mini->add_option("--report", min_report, "write the final energy report JSON here");
  mini->add_option("-o,--output", min_out.output, "output curve path (stdout when omitted)");
  mini->add_flag("--force", min_out.force, "overwrite existing outputs");

  // sweep
  CommonOutput sweep_out;
  std::string sweep_in;
  std::vector<double> thetas;
  std::vector<int> compare;
  std::string curves_prefix;
  OptimizeFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "warm-started theta continuation");
  sweep->add_option("input", sweep_in, "start curve file")->required();
  sweep->add_option("--thetas", thetas, "strictly decreasing theta list")->delimiter(',');
  sweep->add_option("--compare-torus", compare, "a,b of the comparison torus knot")->delimiter(',')->expected(2);
  sweep->add_option("--curves-prefix", curves_prefix, "write each row's minimizer to PREFIX<k>.json");
  sweep_flags.add(sweep);
  sweep->add_option("-o,--output", sweep_out.output, "output CSV path (stdout when omitted)");
  sweep->add_flag("--force", sweep_out.force, "overwrite existing outputs");

  // diagnose
  CommonOutput diag_out;
  std::string diag_in;
  std::size_t directions = 20000;
  std::uint64_t diag_seed = 0;
  bool claimed_knotted = false;
  double phi_ref = -1.0;
  double zeta = max_cylinder_radius();
  bool strict = false;
  std::vector<double> projection;
  bool skip_fit = false;
  auto* diag = app.add_subcommand("diagnose", "structural diagnostics of a curve");
  diag->add_option("input", diag_in, "curve file")->required();
  diag->add_option("--directions", directions, "sampled directions for crookedness");
  diag->add_option("--seed", diag_seed, "random seed for the direction sample");
  diag->add_flag("--knotted", claimed_knotted, "evaluate the Fary-Milnor bound");
  diag->add_option("--phi-ref", phi_ref, "reference angle for the two-braid signature");
  diag->add_option("--zeta", zeta, "cylinder radius for the two-braid signature");
  diag->add_flag("--strict-alignment", strict, "require C1 closeness for the two-braid signature");
  diag->add_option("--crossings", projection, "projection direction x,y,z for crossing signs")
      ->delimiter(',')
      ->expected(3);
  diag->add_flag("--no-fit", skip_fit, "skip the tangential-pair fit");
  diag->add_option("-o,--output", diag_out.output, "output path (stdout when omitted)");
  diag->add_flag("--force", diag_out.force, "overwrite an existing output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitIo;
  }

  try {
    if (gen->parsed()) {
      Json prov = provenance("gen", args);
      Curve c = [&] {
        if (family == "torus") return torus_knot({torus.a, torus.b, torus.rho, n});
        if (family == "tangential-pair") return tangential_pair({phi, n});
        if (family == "covered-circle") return covered_circle(cover, n);
        return covered_circle(1, n);
      }();
      emit(curve_to_string(c, prov), gen_out, out);
    } else if (eval->parsed()) {
      const Curve c = load_curve(eval_in);
      const auto report =
          total_energy(c, eval_theta, eval_repulsion == "moebius" ? Repulsion::moebius : Repulsion::ropelength,
                       eval_lambda, eval_thickness == "triples" ? ThicknessMethod::triples : ThicknessMethod::litherland);
      Json doc = to_json(report);
      doc["config"] = provenance("eval", args);
      emit(doc.dump(2) + "\n", eval_out, out);
    } else if (mini->parsed()) {
      const Curve start = load_curve(min_in);
      const OptimizeOptions opts = min_flags.resolve();
      for (const auto& path : {min_flags.trace, min_report}) {
        if (!path.empty() && !min_out.force && std::filesystem::exists(path)) {
          throw Error(Errc::IoError, path + " exists (use --force to overwrite)");
        }
      }
      const auto res = minimize(start, min_theta, opts);
      Json prov = provenance("minimize", args);
      prov["options"] = min_flags.to_json();
      prov["steps_taken"] = res.steps_taken;
      prov["accepted_moves"] = res.accepted_moves;
      prov["knot_guard_triggers"] = res.knot_guard_triggers;
      emit(curve_to_string(res.curve, prov), min_out, out);
      if (!min_flags.trace.empty()) write_file(min_flags.trace, trace_csv(res.energy_trace), min_out.force);
      if (!min_report.empty()) {
        Json doc = to_json(res.report);
        doc["config"] = prov;
        write_file(min_report, doc.dump(2) + "\n", min_out.force);
      }
    } else if (sweep->parsed()) {
      if (thetas.empty()) throw Error(Errc::UsageError, "sweep needs a non-empty --thetas list");
      const Curve start = load_curve(sweep_in);
      std::optional<ComparisonKnot> cmp;
      if (!compare.empty()) cmp = ComparisonKnot{compare[0], compare[1]};
      const bool to_file = !(sweep_out.output.empty() || sweep_out.output == "-");
      const std::string meta_path = sweep_out.output + ".meta.json";
      if (to_file && !sweep_out.force && std::filesystem::exists(meta_path)) {
        throw Error(Errc::IoError, meta_path + " exists (use --force to overwrite)");
      }
      std::vector<Curve> minimizers;
      const auto rows = theta_sweep(start, thetas, sweep_flags.resolve(), cmp, &minimizers);
      Json meta = provenance("sweep", args);
      meta["options"] = sweep_flags.to_json();
      meta["thetas"] = thetas;
      emit(sweep_csv(rows), sweep_out, out);
      if (to_file) write_file(meta_path, meta.dump(2) + "\n", sweep_out.force);
      if (!curves_prefix.empty()) {
        for (std::size_t k = 0; k < minimizers.size(); ++k) {
          Json prov = meta;
          prov["row"] = k;
          write_file(curves_prefix + std::to_string(k) + ".json", curve_to_string(minimizers[k], prov),
                     sweep_out.force);
        }
      }
    } else if (diag->parsed()) {
      const Curve c = load_curve(diag_in);
      Json doc;
      doc["energies"] = to_json(total_energy(c, 0.0));
      doc["crookedness"] = to_json(milnor_tc(c, directions, diag_seed));
      doc["fary_milnor"] = to_json(fary_milnor_check(c, claimed_knotted));
      if (!skip_fit) doc["tangential_pair_fit"] = to_json(fit_tangential_pair(c));
      if (phi_ref >= 0.0) {
        CylinderOptions copts;
        copts.strict_alignment = strict;
        doc["cylinder"] = to_json(two_braid_signature(c, phi_ref, zeta, copts));
      }
      if (!projection.empty()) {
        doc["crossings"] = to_json(crossing_signs(c, Vec3(projection[0], projection[1], projection[2])));
      }
      doc["sphericity"] = to_json(sphericity(c));
      doc["config"] = provenance("diagnose", args);
      emit(doc.dump(2) + "\n", diag_out, out);
    }
  } catch (const Error& e) {
    err << "eknot: " << to_string(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case Errc::ParseError:
      case Errc::IoError:
      case Errc::UsageError:
        return kExitIo;
      default:
        return kExitDomain;
    }
  } catch (const std::exception& e) {
    err << "eknot: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace eknot
