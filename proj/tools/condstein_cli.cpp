// Command-line front end: model checking against exact joints or samples,
// seeded simulation, equation solving, and the validation suites.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "condstein/io.hpp"
#include "condstein/validate.hpp"

namespace {

using namespace condstein;

json tolerances_json() {
  return json{{"mass", 1e-12},          {"residual", 1e-8},  {"identity", 1e-8},
              {"characterization", 1e-10}, {"tv_match", 1e-8}, {"zero_mean", 1e-8}};
}

json versions_json() {
  return json{{"library", kLibraryVersion},
              {"report_schema", kReportSchemaVersion},
              {"rng", kRngName}};
}

void emit_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write_file(out_path, text);
  }
}

int run_check(const std::string& model_path, const std::string& samples_path,
              const std::string& joint_path, const std::string& out_path, std::uint64_t seed) {
  const ConditionalModel model = load_model_file(model_path);
  json report;
  report["model_digest"] = model_digest(model);
  report["seed"] = seed;

  if (!joint_path.empty()) {
    const JointTable joint = load_joint_file(joint_path);
    const DiscrepancyReport tv = tv_bound(joint, model, seed);
    const DiscrepancyReport w = w_bound(joint, model, seed);
    const bool characterized = characterize_finite(joint, model);
    const JointTable model_table = joint_table(model);
    const double oracle_tv = tv_exact(joint, model_table);
    const double oracle_w = wasserstein_exact(joint, model_table);
    if (std::fabs(tv.sup_value - oracle_tv) > 1e-8) {
      throw ToleranceBreachError("tv sweep disagrees with the exact oracle beyond 1e-8");
    }
    if (w.sup_value > oracle_w + 1e-8) {
      throw ToleranceBreachError("w sweep exceeded the transport oracle beyond 1e-8");
    }
    report["mode"] = "exact";
    report["n"] = "exact";
    report["tv"] = discrepancy_to_json(tv);
    report["w"] = discrepancy_to_json(w);
    report["characterization"] = characterized;
    report["oracle"] = json{{"tv", oracle_tv}, {"w", oracle_w}};
  } else {
    const SampleSet samples = load_samples_file(samples_path);
    const DiscrepancyReport tv = tv_bound(samples, model, seed);
    const DiscrepancyReport w = w_bound(samples, model, seed);
    report["mode"] = "empirical";
    report["n"] = samples.size();
    report["tv"] = discrepancy_to_json(tv);
    report["w"] = discrepancy_to_json(w);
    report["characterization"] = nullptr;
    report["oracle"] = nullptr;
  }
  report["tolerances"] = tolerances_json();
  report["versions"] = versions_json();
  emit_report(report, out_path);
  return 0;
}

int run_simulate(const std::string& model_path, std::size_t n, std::uint64_t seed,
                 const std::string& out_path, std::optional<double> shift_eps,
                 std::optional<double> contaminate_eps, const std::string& noise_path,
                 const std::vector<double>& swap_pair) {
  ConditionalModel model = load_model_file(model_path);
  if (shift_eps) model = mean_shift(model, *shift_eps);
  if (contaminate_eps) {
    if (noise_path.empty()) {
      throw SpecParseError("--contaminate requires --noise pointing to a finite-law JSON file");
    }
    const json nj = detail::load_json_file(noise_path);
    model = contaminate(model, *contaminate_eps, finite_law_from_json(nj, "noise"));
  }
  if (!swap_pair.empty()) {
    model = swap_conditionals(model, swap_pair[0], swap_pair[1]);
  }
  const SampleSet samples = sample_model(model, n, Seed{seed});
  atomic_write_file(out_path, samples_to_csv(samples));
  return 0;
}

SourceFn parse_source_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string token;
  for (char c : spec) {
    if (c == ':') {
      parts.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  parts.push_back(token);
  auto num = [&](std::size_t i) {
    try {
      return std::stod(parts.at(i));
    } catch (...) {
      throw SpecParseError("h spec: bad numeric argument in '" + spec + "'");
    }
  };
  if (parts[0] == "step" && parts.size() == 2) return step_source(num(1), spec);
  if (parts[0] == "indicator" && parts.size() == 3) return window_source(num(1), num(2), spec);
  if (parts[0] == "const" && parts.size() == 2) {
    const double c = num(1);
    return SourceFn{[c](double) { return c; }, {}, spec};
  }
  if (parts[0] == "sin" && parts.size() == 2) {
    const double w = num(1);
    return SourceFn{[w](double x) { return std::sin(w * x); }, {}, spec};
  }
  if (parts[0] == "cos" && parts.size() == 2) {
    const double w = num(1);
    return SourceFn{[w](double x) { return std::cos(w * x); }, {}, spec};
  }
  if (parts[0] == "poly" && parts.size() >= 2) {
    std::vector<double> coef;
    std::string cur;
    for (char c : parts[1] + ",") {
      if (c == ',') {
        try {
          coef.push_back(std::stod(cur));
        } catch (...) {
          throw SpecParseError("h spec: bad polynomial coefficient in '" + spec + "'");
        }
        cur.clear();
      } else {
        cur += c;
      }
    }
    return SourceFn{[coef](double x) {
                      double v = 0.0;
                      for (std::size_t i = coef.size(); i-- > 0;) v = v * x + coef[i];
                      return v;
                    },
                    {},
                    spec};
  }
  throw SpecParseError("h spec: expected step:c | indicator:a:b | const:c | sin:w | cos:w | "
                       "poly:c0,c1,... got '" + spec + "'");
}

int run_solve(const std::string& model_path, const std::string& h_spec,
              const std::string& grid_spec, const std::string& out_path) {
  const ConditionalModel model = load_model_file(model_path);
  const SourceFn h = parse_source_spec(h_spec);

  std::string out = "y,x,f,residual\n";
  char buf[120];
  for (std::size_t j = 0; j < model.size(); ++j) {
    const TargetFamily& family = model.family(j);
    const SteinSolution sol = solve(family, h);
    std::vector<double> grid;
    if (family.kind() == FamilyKind::gaussian || family.kind() == FamilyKind::gamma) {
      if (!grid_spec.empty()) {
        double lo = 0.0, hi = 0.0;
        int n = 0;
        if (std::sscanf(grid_spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2 ||
            !(lo < hi)) {
          throw SpecParseError("grid spec: expected lo:hi:count");
        }
        grid = linspace(lo, hi, static_cast<std::size_t>(n));
        const TruncatedDomain dom = truncated_domain(family);
        for (double& x : grid) x = std::clamp(x, dom.lo, dom.hi);
      } else {
        grid = residual_grid(family, h, 512);
      }
    } else {
      grid = residual_grid(family, h);
    }
    for (double x : grid) {
      const double fx = sol.f.eval(x);
      const double r = std::fabs(apply(family, sol.f, x) - (h.eval(x) - sol.centered_mean));
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", model.y_values()[j], x, fx, r);
      out += buf;
    }
  }
  atomic_write_file(out_path, out);
  return 0;
}

int run_validate(const std::string& suite, std::uint64_t seed) {
  const std::vector<CheckResult> results = run_validation_suite(suite, seed);
  bool all_passed = true;
  for (const auto& r : results) {
    std::printf("[%s] %d. %s — %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional Stein discrepancy toolkit"};
  app.require_subcommand(1);

  std::string model_path, samples_path, joint_path, out_path, noise_path;
  std::string h_spec, grid_spec = "";
  std::string suite = "all";
  std::uint64_t seed = condstein::kDictionarySeed;
  std::uint64_t validate_seed = condstein::kValidationSeed;
  std::uint64_t sim_seed = 1;
  std::size_t n = 1000;
  std::optional<double> shift_eps, contaminate_eps;
  std::vector<double> swap_pair;

  auto* check = app.add_subcommand("check", "compare a joint law or samples against a model");
  check->add_option("model", model_path, "model spec JSON")->required();
  auto* samples_opt = check->add_option("samples", samples_path, "samples CSV (empirical mode)");
  auto* exact_opt =
      check->add_option("--exact", joint_path, "joint table JSON (exact mode)");
  samples_opt->excludes(exact_opt);
  check->add_option("--out", out_path, "report path (stdout when omitted)");
  check->add_option("--seed", seed, "dictionary seed");

  auto* simulate = app.add_subcommand("simulate", "draw seeded samples from a model");
  simulate->add_option("model", model_path, "model spec JSON")->required();
  simulate->add_option("--n", n, "sample count")->required();
  simulate->add_option("--seed", sim_seed, "sampler seed")->required();
  simulate->add_option("--out", out_path, "samples CSV path")->required();
  simulate->add_option("--mean-shift", shift_eps, "shift conditional means by eps");
  simulate->add_option("--contaminate", contaminate_eps, "mix conditionals with noise at eps");
  simulate->add_option("--noise", noise_path, "finite-law JSON used by --contaminate");
  simulate->add_option("--swap", swap_pair, "swap the families at two y values")->expected(2);

  auto* solve_cmd = app.add_subcommand("solve", "solve the per-family equation for a source term");
  solve_cmd->add_option("model", model_path, "model spec JSON")->required();
  solve_cmd->add_option("--source", h_spec, "source spec, e.g. step:0.0")->required();
  solve_cmd->add_option("--grid", grid_spec, "lo:hi:count grid for continuous families");
  solve_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* validate = app.add_subcommand("validate", "run a validation suite");
  validate->add_option("--suite", suite,
                       "identity | characterization | bounds | independence | all");
  validate->add_option("--seed", validate_seed, "base seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      if (joint_path.empty() && samples_path.empty()) {
        std::fprintf(stderr, "error: check needs a samples CSV or --exact joint\n");
        return 2;
      }
      return run_check(model_path, samples_path, joint_path, out_path, seed);
    }
    if (simulate->parsed()) {
      return run_simulate(model_path, n, sim_seed, out_path, shift_eps, contaminate_eps,
                          noise_path, swap_pair);
    }
    if (solve_cmd->parsed()) {
      return run_solve(model_path, h_spec, grid_spec, out_path);
    }
    if (validate->parsed()) {
      return run_validate(suite, validate_seed);
    }
  } catch (const condstein::QuadratureError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const condstein::OverflowGuardError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const condstein::ToleranceBreachError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const condstein::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
