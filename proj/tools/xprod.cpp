#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xprod/pipeline.hpp"
#include "xprod/scenarios.hpp"

using namespace xprod;

namespace {

constexpr int kInputError = 2;

struct Options {
  RunConfig run;
  std::string format = "json";
  std::string out;

  std::string scenario;
  int n = -1, nt = 33, nz = 16, nr = 8, na = 9, p = 3;

  std::string system;
  std::string system_b;
  std::string map_file;
  bool recover = false;
};

SampledSystem generate(const Options& o) {
  if (o.scenario == "circle-conjugation") return circle_conjugation(o.n < 0 ? 64 : o.n);
  if (o.scenario == "torus-swap") return torus_swap(o.n < 0 ? 8 : o.n);
  if (o.scenario == "cylinder-reflection") return cylinder_reflection(o.nt, o.nz);
  if (o.scenario == "disk-rotation") return disk_rotation(o.nr, o.na, o.p);
  throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + o.scenario +
                                              "' (expected circle-conjugation, torus-swap, cylinder-reflection or "
                                              "disk-rotation)");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    write_text_file(o.out, text);
}

int emit_report(const Options& o, const Report& r) {
  emit(o, o.format == "md" ? to_markdown(r) : to_json(r).dump(2) + "\n");
  return r.exit_code();
}

SampledSystem load(const std::string& path) { return system_from_json(read_json_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossed products by periodic homeomorphisms: construction and verification"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--tol-alg", o.run.tol.algebraic, "tolerance for identities exact up to rounding")
      ->capture_default_str();
  app.add_option("--tol-acc", o.run.tol.acceptance, "acceptance tolerance")->capture_default_str();
  app.add_option("--tol-triv", o.run.trivialization_tol, "largest admissible frame jump across a quotient edge")
      ->capture_default_str();
  app.add_option("--frontier-radius", o.run.frontier_radius, "width of the band next to the fixed set")
      ->capture_default_str();
  app.add_option("--trials", o.run.trials, "random trials per check")->capture_default_str();
  app.add_option("--seed", o.run.seed, "random seed")->capture_default_str();
  app.add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "md"}))->capture_default_str();
  app.add_option("--out", o.out, "output path (stdout when omitted)");

  auto* gen = app.add_subcommand("generate", "write a scenario system file");
  gen->add_option("scenario", o.scenario, "circle-conjugation | torus-swap | cylinder-reflection | disk-rotation")
      ->required();
  gen->add_option("--n", o.n, "samples (circle) or grid size (torus)");
  gen->add_option("--nt", o.nt, "cylinder t-samples (odd)")->capture_default_str();
  gen->add_option("--nz", o.nz, "cylinder angle samples")->capture_default_str();
  gen->add_option("--nr", o.nr, "disk rings")->capture_default_str();
  gen->add_option("--na", o.na, "disk angle samples")->capture_default_str();
  gen->add_option("--p", o.p, "disk rotation period")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "check the algebraic invariants of a system");
  ver->add_option("system", o.system, "system JSON file")->required();

  auto* iso = app.add_subcommand("isomorphism", "build and certify the structure isomorphism");
  iso->add_option("system", o.system, "system JSON file")->required();

  auto* cls = app.add_subcommand("classify", "compare two systems");
  cls->add_option("system_a", o.system, "first system JSON file")->required();
  cls->add_option("system_b", o.system_b, "second system JSON file")->required();
  auto* map_opt = cls->add_option("--map", o.map_file, "quotient map JSON from A's classes to B's");
  cls->add_flag("--recover", o.recover, "recover the quotient map from the composed isomorphism")->excludes(map_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (o.run.tol.algebraic <= 0 || o.run.tol.acceptance <= 0 || o.run.trivialization_tol <= 0)
      throw Error(ErrorCode::InvalidParams, "tolerances must be positive");
    if (o.run.trials < 0 || o.run.frontier_radius < 0)
      throw Error(ErrorCode::InvalidParams, "trials and frontier radius must be non-negative");

    if (*gen) {
      emit(o, to_json(generate(o)).dump() + "\n");
      return 0;
    }
    if (*ver) return emit_report(o, run_verify(load(o.system), o.run));
    if (*iso) return emit_report(o, run_isomorphism(load(o.system), o.run));
    if (*cls) {
      if (o.map_file.empty() && !o.recover)
        throw Error(ErrorCode::InvalidParams, "classify needs --map FILE or --recover");
      std::optional<std::vector<ClassId>> forward;
      if (!o.map_file.empty()) forward = quotient_forward_from_json(read_json_file(o.map_file));
      return emit_report(o, run_classify(load(o.system), load(o.system_b), forward, o.recover, o.run));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
