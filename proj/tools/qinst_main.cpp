#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qinst/assemblage.hpp"
#include "qinst/instrumentality.hpp"
#include "qinst/json_io.hpp"
#include "qinst/scenarios.hpp"
#include "qinst/sdp.hpp"
#include "qinst/steering.hpp"

namespace {

using namespace qinst;

sdp::SolverConfig config_from_env() {
  sdp::SolverConfig cfg;
  if (const char* env = std::getenv("QINST_GAP_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0)
      cfg.gap_tol = v;
    else
      std::cerr << "warning: ignoring invalid QINST_GAP_TOL value '" << env << "'\n";
  }
  return cfg;
}

// The primal and dual programs bound the same value from both sides, so one
// certified solve plus agreement of the two values is a sound certificate
// even when the other solve stops short of its own optimality flag.
void require_trusted(sdp::SolveStatus primal, sdp::SolveStatus dual, double gap,
                     const std::string& what) {
  const bool certified =
      primal == sdp::SolveStatus::Optimal || dual == sdp::SolveStatus::Optimal;
  if (certified && gap <= 1e-6) return;
  throw std::runtime_error(what + ": solver result not trusted (primal " +
                           sdp::to_string(primal) + ", dual " + sdp::to_string(dual) +
                           ", value gap " + format_significant(gap, 3) + ")");
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<Povm> load_bob_measurements(const std::string& path) {
  nlohmann::json j = load_json_file(path);
  if (!j.is_array() || j.size() != 2)
    throw std::runtime_error(path + ": expected [[matrix, matrix], [matrix, matrix]]");
  std::vector<Povm> bob;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 2)
      throw std::runtime_error(path + ": each entry must hold two POVM element matrices");
    std::vector<HermitianMatrix> elems{hermitian_from_json(row.at(0)),
                                       hermitian_from_json(row.at(1))};
    bob.emplace_back(std::move(elems));
  }
  return bob;
}

int run_curve(double v_min, double v_max, int steps, const std::string& out_path,
              const std::string& format, const sdp::SolverConfig& cfg) {
  if (v_min < 0.0 || v_max > 1.0 || v_min > v_max)
    throw std::runtime_error("curve: need 0 <= v-min <= v-max <= 1");
  if (steps < 1) throw std::runtime_error("curve: steps must be at least 1");

  std::string csv = "V,R_steer,R_ni,di_value,di_violated\n";
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < steps; ++i) {
    const double v =
        steps == 1 ? v_min : v_min + (v_max - v_min) * static_cast<double>(i) / (steps - 1);
    Assemblage s = paper_assemblage(v);
    SteeringRobustnessResult steer = steering_robustness(s, cfg);
    require_trusted(steer.primal_status, steer.dual_status, steer.gap,
                    "curve: steering robustness");
    RobustnessResult rob = robustness_ni(s, cfg);
    require_trusted(rob.primal_status, rob.dual_status, rob.gap, "curve: robustness");
    DiEvaluation di = optimize_bob_measurements(s);
    const bool violated = di.value > kDiClassicalBound;
    csv += format_significant(v, 12) + "," + format_significant(steer.t_star, 12) + "," +
           format_significant(rob.t_star, 12) + "," + format_significant(di.value, 12) + "," +
           (violated ? "1" : "0") + "\n";
    rows.push_back({{"V", v},
                    {"R_steer", steer.t_star},
                    {"R_ni", rob.t_star},
                    {"di_value", di.value},
                    {"di_violated", violated}});
  }
  if (format == "json")
    save_json_file(out_path, rows);
  else
    write_text_file(out_path, csv);
  std::cout << "wrote " << steps << " grid point(s) to " << out_path << "\n";
  return 0;
}

int run_membership(const std::string& in_path, const std::string& out_path,
                   const sdp::SolverConfig& cfg) {
  Assemblage s = assemblage_from_json(load_json_file(in_path));
  MembershipResult r = membership(s, cfg);
  require_trusted(r.primal_status, r.dual_status, r.gap, "membership");
  if (!out_path.empty()) save_json_file(out_path, membership_result_to_json(r));
  std::cout << "mu_star = " << format_significant(r.mu_star, 12)
            << (r.in_model ? " (inside the model set)" : " (outside the model set)") << "\n";
  return 0;
}

int run_robustness(const std::string& in_path, const std::string& out_path,
                   const sdp::SolverConfig& cfg) {
  Assemblage s = assemblage_from_json(load_json_file(in_path));
  RobustnessResult r = robustness_ni(s, cfg);
  require_trusted(r.primal_status, r.dual_status, r.gap, "robustness");
  if (!out_path.empty()) save_json_file(out_path, robustness_result_to_json(r));
  std::cout << "t_star = " << format_significant(r.t_star, 12) << "\n";
  return 0;
}

int run_witness(const std::string& in_path, const std::string& out_path,
                const std::string& kind, const sdp::SolverConfig& cfg) {
  Assemblage s = assemblage_from_json(load_json_file(in_path));
  Witness w;
  if (kind == "membership") {
    MembershipResult r = membership(s, cfg);
    require_trusted(r.primal_status, r.dual_status, r.gap, "witness");
    w = r.witness;
  } else if (kind == "robustness") {
    RobustnessResult r = robustness_ni(s, cfg);
    require_trusted(r.primal_status, r.dual_status, r.gap, "witness");
    w = r.witness;
  } else {
    throw std::runtime_error("witness: --kind must be 'robustness' or 'membership'");
  }
  save_json_file(out_path, witness_to_json(w));
  std::cout << "witness value = " << format_significant(pair_value(w.blocks, s), 12)
            << " against bound " << format_significant(w.beta, 12) << "\n";
  return 0;
}

int run_di(const std::string& in_path, const std::string& out_path, const std::string& bob_spec) {
  Assemblage s = assemblage_from_json(load_json_file(in_path));
  DiEvaluation eval;
  if (bob_spec == "optimized") {
    eval = optimize_bob_measurements(s);
  } else if (bob_spec.rfind("fixed:", 0) == 0) {
    eval = evaluate_di(s, load_bob_measurements(bob_spec.substr(6)));
  } else {
    throw std::runtime_error("di: --bob must be 'optimized' or 'fixed:<file>'");
  }
  if (!out_path.empty()) {
    nlohmann::json bob = nlohmann::json::array();
    for (const Povm& m : eval.bob_measurements)
      bob.push_back({hermitian_to_json(m.element(0)), hermitian_to_json(m.element(1))});
    save_json_file(out_path, {{"value", eval.value},
                              {"classical_bound", kDiClassicalBound},
                              {"violated", eval.value > kDiClassicalBound},
                              {"joint_distribution", eval.joint_distribution},
                              {"bob_measurements", bob}});
  }
  std::cout << "di_value = " << format_significant(eval.value, 12) << " (classical bound "
            << format_significant(kDiClassicalBound, 12) << ")\n";
  return 0;
}

int run_report(const VerificationReport& rep, const std::string& out_path) {
  if (out_path.empty())
    std::cout << rep.to_json().dump(2) << "\n";
  else
    save_json_file(out_path, rep.to_json());
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "pass" : "FAIL") << ": " << c.name << " (observed "
              << format_significant(c.observed, 12) << ", tolerance "
              << format_significant(c.tolerance, 12) << ")\n";
  return rep.pass ? 0 : 2;
}

int run_sample(int outcomes, int inputs, int dim, std::uint64_t seed, bool pure,
               const std::string& out_path) {
  Assemblage s = sample_random_1sqi(outcomes, inputs, dim, seed, pure);
  save_json_file(out_path, assemblage_to_json(s));
  std::cout << "wrote sampled assemblage to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decides membership of classical-quantum assemblages in the instrumental "
               "hidden-state model, computes robustness and witnesses, and sweeps the "
               "dephased-Bell family"};
  app.require_subcommand(1);

  sdp::SolverConfig cfg = config_from_env();
  auto add_solver_options = [&cfg](CLI::App* sub) {
    sub->add_option("--gap-tol", cfg.gap_tol, "relative duality gap tolerance");
    sub->add_option("--feas-tol", cfg.feas_tol, "feasibility tolerance");
    sub->add_option("--max-iterations", cfg.max_iterations, "interior-point iteration cap");
  };

  double v_min = 0.0, v_max = 1.0;
  int steps = 21;
  std::string out_path, in_path, format = "csv", kind = "robustness", bob_spec = "optimized";
  std::uint64_t seed = 0;
  int trials = 50;
  int outcomes = 2, inputs = 3, dim = 2;
  bool pure = false;

  CLI::App* curve = app.add_subcommand(
      "curve", "sweep the dephased-Bell family and write V, steering robustness, model "
               "robustness, inequality value and violation flag");
  curve->add_option("--v-min", v_min, "grid start")->check(CLI::Range(0.0, 1.0));
  curve->add_option("--v-max", v_max, "grid end")->check(CLI::Range(0.0, 1.0));
  curve->add_option("--steps", steps, "number of grid points")->check(CLI::PositiveNumber);
  curve->add_option("--out", out_path, "output file")->required();
  curve->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_solver_options(curve);

  CLI::App* memb = app.add_subcommand("membership", "decide model membership of an assemblage");
  memb->add_option("--in", in_path, "assemblage JSON")->required();
  memb->add_option("--out", out_path, "result JSON");
  add_solver_options(memb);

  CLI::App* rob = app.add_subcommand("robustness", "compute the noise robustness of an assemblage");
  rob->add_option("--in", in_path, "assemblage JSON")->required();
  rob->add_option("--out", out_path, "result JSON");
  add_solver_options(rob);

  CLI::App* wit = app.add_subcommand("witness", "export the optimal witness for an assemblage");
  wit->add_option("--in", in_path, "assemblage JSON")->required();
  wit->add_option("--out", out_path, "witness JSON")->required();
  wit->add_option("--kind", kind, "robustness or membership")
      ->check(CLI::IsMember({"robustness", "membership"}));
  add_solver_options(wit);

  CLI::App* di = app.add_subcommand("di", "evaluate the instrumental inequality");
  di->add_option("--in", in_path, "assemblage JSON")->required();
  di->add_option("--out", out_path, "evaluation JSON");
  di->add_option("--bob", bob_spec, "'optimized' or 'fixed:<file>'");

  CLI::App* th1 = app.add_subcommand("verify-theorem1", "check the doubled-assemblage witness "
                                                        "construction at full visibility");
  th1->add_option("--out", out_path, "report JSON");
  add_solver_options(th1);

  CLI::App* th2 = app.add_subcommand("verify-theorem2", "check robustness monotonicity under "
                                                        "outcome-dependent post-processing");
  th2->add_option("--seed", seed, "trial seed");
  th2->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  th2->add_option("--out", out_path, "report JSON");
  add_solver_options(th2);

  CLI::App* mono = app.add_subcommand("monotonicity", "check robustness monotonicity under "
                                                      "model-preserving maps");
  mono->add_option("--seed", seed, "trial seed");
  mono->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  mono->add_option("--out", out_path, "report JSON");
  add_solver_options(mono);

  CLI::App* sample = app.add_subcommand("sample", "write a random model-member assemblage");
  sample->add_option("--outcomes", outcomes, "outcome count")->check(CLI::PositiveNumber);
  sample->add_option("--inputs", inputs, "input count")->check(CLI::PositiveNumber);
  sample->add_option("--dim", dim, "block dimension")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_flag("--pure", pure, "use rank-1 hidden states");
  sample->add_option("--out", out_path, "assemblage JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (curve->parsed()) return run_curve(v_min, v_max, steps, out_path, format, cfg);
    if (memb->parsed()) return run_membership(in_path, out_path, cfg);
    if (rob->parsed()) return run_robustness(in_path, out_path, cfg);
    if (wit->parsed()) return run_witness(in_path, out_path, kind, cfg);
    if (di->parsed()) return run_di(in_path, out_path, bob_spec);
    if (th1->parsed()) return run_report(verify_theorem1(cfg), out_path);
    if (th2->parsed()) return run_report(verify_theorem2(seed, trials, cfg), out_path);
    if (mono->parsed()) return run_report(monotonicity_check(seed, trials, cfg), out_path);
    if (sample->parsed()) return run_sample(outcomes, inputs, dim, seed, pure, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
