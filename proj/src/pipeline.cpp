#include "xprod/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xprod {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

Check make_check(std::string name, std::string anchor) {
  Check c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  return c;
}

Check failed_check(std::string name, std::string anchor, const Error& e) {
  Check c = make_check(std::move(name), std::move(anchor));
  c.pass = false;
  c.detail = e.what();
  c.metrics["error"] = std::string(to_string(e.code()));
  return c;
}

/// Validation as a check; the space is returned when it is usable.
SpacePtr validated(const SampledSystem& system, Report& report) {
  Check c = make_check("validation", "periodic system with fixed points");
  ValidationReport v = validate(system);
  c.metrics["points"] = system.points.size();
  c.metrics["period"] = system.period;
  c.metrics["fixed_points"] = v.fixed_ids.size();
  c.metrics["components"] = v.components;
  c.metrics["density_ok"] = v.density_ok;
  Json errors = Json::array(), warnings = Json::array();
  for (const auto& e : v.errors) errors.push_back(std::string(to_string(e.code)) + ": " + e.message);
  for (const auto& w : v.warnings) warnings.push_back(std::string(to_string(w.code)) + ": " + w.message);
  c.metrics["errors"] = errors;
  c.metrics["warnings"] = warnings;
  c.pass = v.ok();
  if (!v.ok())
    c.detail = std::string(to_string(v.errors.front().code)) + ": " + v.errors.front().message;
  else if (!v.density_ok)
    c.detail = "valid; DensityViolation warning: some fixed point has no non-fixed neighbour";
  else
    c.detail = "valid";
  report.checks.push_back(c);
  if (!v.ok()) return nullptr;
  SpacePtr space = PeriodicSpace::create(system);
  report.data["classes"] = space->class_count();
  return space;
}

Check fourier_check(int p, const Tolerances& tol) {
  Check c = make_check("fourier_projections", "Fourier diagonalization of circulants");
  const CMatrix omega = fourier_unitary(p);
  const auto proj = canonical_projections(p);
  double unitary = unitarity_defect(omega), projection = 0.0, orthogonal = 0.0;
  CMatrix sum = CMatrix::Zero(p, p);
  bool rank_one = true;
  for (int i = 0; i < p; ++i) {
    sum += proj[i];
    projection = std::max(projection, (proj[i] * proj[i] - proj[i]).norm() + (proj[i] - proj[i].adjoint()).norm());
    rank_one = rank_one && projection_rank(proj[i]) == 1;
    for (int j = 0; j < p; ++j)
      if (i != j) orthogonal = std::max(orthogonal, (proj[i] * proj[j]).norm());
  }
  double resolution = (sum - CMatrix::Identity(p, p)).norm();
  c.metrics = {{"unitarity", unitary}, {"projection", projection}, {"orthogonality", orthogonal},
               {"resolution", resolution}, {"rank_one", rank_one}};
  double worst = std::max({unitary, projection, orthogonal, resolution});
  c.pass = rank_one && worst <= tol.algebraic;
  c.detail = "worst defect " + sci(worst);
  return c;
}

Check algebra_check(const SpacePtr& space, int trials, std::mt19937_64& rng, const Tolerances& tol) {
  Check c = make_check("algebra_laws", "twisted circulant realization of the crossed product");
  double closure = 0.0, assoc = 0.0, involution = 0.0, anti = 0.0;
  for (int t = 0; t < trials; ++t) {
    CrossedElement a = random_element(space, rng), b = random_element(space, rng), d = random_element(space, rng);
    closure = std::max(closure, closure_defect(a, b));
    CrossedElement ab = multiply(a, b);
    assoc = std::max(assoc, distance(multiply(ab, d), multiply(a, multiply(b, d))));
    involution = std::max(involution, distance(adjoint(adjoint(a)), a));
    anti = std::max(anti, distance(adjoint(ab), multiply(adjoint(b), adjoint(a))));
  }
  c.metrics = {{"trials", trials}, {"closure", closure}, {"associativity", assoc},
               {"involution", involution}, {"anti_multiplicativity", anti}};
  double worst = std::max({closure, assoc, involution, anti});
  c.pass = worst <= tol.algebraic;
  c.detail = "worst defect " + sci(worst);
  return c;
}

Check boundary_check(const SpacePtr& space, int trials, std::mt19937_64& rng) {
  Check c = make_check("boundary_sequence", "exact sequence through the boundary map");
  if (space->fixed_ids().empty()) {
    c.pass = true;
    c.detail = "no fixed points; the boundary map is zero";
    return c;
  }
  const double tol = 1e-10;
  double hom = 0.0, star = 0.0, exact = 0.0, residual = 0.0, kernel = 0.0, vanishing = 0.0;
  const int p = space->period();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    CrossedElement a = random_element(space, rng), b = random_element(space, rng);
    BoundaryTuple pa = pi_boundary(a);
    hom = std::max(hom, tuple_distance(pi_boundary(multiply(a, b)), pointwise_product(pa, pi_boundary(b))));
    BoundaryTuple conj = pa;
    for (auto& slot : conj.slots)
      for (auto& v : slot) v = std::conj(v);
    star = std::max(star, tuple_distance(pi_boundary(adjoint(a)), conj));

    BoundaryTuple target{space->fixed_ids(), std::vector<ScalarField>(p, ScalarField(space->fixed_ids().size()))};
    for (auto& slot : target.slots)
      for (auto& v : slot) {
        double re = gauss(rng);
        double im = gauss(rng);
        v = Complex(re, im);
      }
    CrossedElement pre = boundary_preimage(space, target);
    double d = tuple_distance(pi_boundary(pre), target);
    exact = std::max(exact, d);
    residual = std::max(residual, d / std::max(1.0, tuple_norm(target)));

    kernel = std::max(kernel, tuple_norm(pi_boundary(random_ideal_element(space, rng))));
    CrossedElement k = a - boundary_preimage(space, pa);
    for (PointId x : space->fixed_ids()) vanishing = std::max(vanishing, k.matrix_at(x).norm());
  }
  c.metrics = {{"trials", trials},         {"homomorphism", hom},          {"adjoint", star},
               {"preimage_exactness", exact}, {"preimage_residual", residual}, {"ideal_to_kernel", kernel},
               {"kernel_to_ideal", vanishing}};
  c.pass = hom <= tol && star <= tol && residual <= tol && exact <= 1e-12 && kernel == 0.0 && vanishing <= tol;
  c.detail = "homomorphism " + sci(hom) + ", preimage " + sci(exact) + ", kernel inclusions " + sci(kernel) + " / " +
             sci(vanishing);
  return c;
}

Check representation_check(const SpacePtr& space, int trials, std::mt19937_64& rng, const Tolerances& tol) {
  Check c = make_check("representations", "irreducible representations at non-fixed points");
  auto free = space->free_classes();
  if (free.empty()) {
    c.pass = true;
    c.detail = "no non-fixed points";
    return c;
  }
  std::vector<PointId> free_points;
  for (ClassId q : free)
    for (PointId y : space->orbit_space().classes[q]) free_points.push_back(y);
  std::uniform_int_distribution<std::size_t> pick(0, free_points.size() - 1);
  std::uniform_int_distribution<int> power(1, space->period() - 1);

  double span = 0.0, leak = 0.0, inter = 0.0;
  int span_points = std::min<int>(20, static_cast<int>(free_points.size()));
  int min_rank = space->period() * space->period();
  for (int i = 0; i < span_points; ++i) {
    SpanCheckReport r = evaluation_span_check(space, free_points[pick(rng)]);
    span = std::max(span, r.max_residual);
    leak = std::max(leak, r.max_fixed_leak);
    min_rank = std::min(min_rank, r.rank);
  }
  int inter_trials = std::max(1, trials / 2);
  for (int t = 0; t < inter_trials; ++t) {
    CrossedElement a = random_element(space, rng);
    PointId x = free_points[pick(rng)];
    int j = power(rng);
    CMatrix u = orbit_intertwiner(*space, x, j);
    inter = std::max(inter, (a.matrix_at(x) - u * a.matrix_at(space->theta(x, j)) * u.adjoint()).norm());
  }
  c.metrics = {{"span_points", span_points}, {"span_residual", span}, {"fixed_leak", leak}, {"min_rank", min_rank},
               {"intertwiner_trials", inter_trials}, {"intertwiner_defect", inter}};
  c.pass = span <= 1e-10 && leak == 0.0 && inter <= tol.algebraic;
  c.detail = "span residual " + sci(span) + ", intertwiner " + sci(inter);
  return c;
}

Check pure_state_check(const SpacePtr& space, int trials, std::mt19937_64& rng, const Tolerances& tol) {
  Check c = make_check("pure_states", "characters at fixed points");
  if (space->fixed_ids().empty()) {
    c.pass = true;
    c.detail = "no fixed points";
    return c;
  }
  const int p = space->period();
  const CMatrix omega = fourier_unitary(p);
  double mult = 0.0, eigen = 0.0;
  for (int t = 0; t < trials; ++t) {
    CrossedElement a = random_element(space, rng), b = random_element(space, rng);
    CrossedElement ab = multiply(a, b);
    for (PointId x : space->fixed_ids()) {
      CMatrix diag = omega * a.matrix_at(x) * omega.adjoint();
      for (int k = 0; k < p; ++k) {
        Complex sa = pure_state(a, x, k), sb = pure_state(b, x, k);
        mult = std::max(mult, std::abs(pure_state(ab, x, k) - sa * sb));
        eigen = std::max(eigen, std::abs(diag(p - 1 - k, p - 1 - k) - sa));
      }
    }
  }
  c.metrics = {{"trials", trials}, {"multiplicativity", mult}, {"diagonalization", eigen}};
  c.pass = mult <= 1e-10 && eigen <= tol.algebraic;
  c.detail = "multiplicativity " + sci(mult) + ", eigenvalue match " + sci(eigen);
  return c;
}

Check essential_check(const SpacePtr& space, int trials, std::mt19937_64& rng) {
  Check c = make_check("essential_ideal", "essential ideal over the non-fixed points");
  const int samples = std::max(1, std::min(trials, 10));
  int witnessed = 0;
  std::size_t products = 0;
  for (int t = 0; t < samples; ++t) {
    EssentialReport r = essential_ideal_check(space, random_element(space, rng), 20, rng);
    products += r.products_checked;
    if (r.witness_point) ++witnessed;
  }

  // Candidate annihilator: the unit at fixed points without non-fixed neighbours.
  std::vector<PointId> isolated;
  for (PointId x : space->fixed_ids()) {
    bool touches = false;
    for (PointId y : space->neighbors()[x]) touches = touches || !space->is_fixed(y);
    if (!touches) isolated.push_back(x);
  }
  bool essential = true;
  std::string note;
  if (!isolated.empty()) {
    ScalarField f(space->size(), Complex(0.0));
    for (PointId x : isolated) f[x] = 1.0;
    EssentialReport r = essential_ideal_check(space, CrossedElement::single(space, 0, f), trials, rng);
    essential = r.essential_ok;
    note = r.note;
  }
  c.metrics = {{"random_elements", samples}, {"witnessed", witnessed}, {"products", products},
               {"isolated_fixed_points", isolated.size()}, {"essential", essential}};
  c.pass = witnessed == samples && essential;
  c.detail = essential ? std::to_string(witnessed) + "/" + std::to_string(samples) + " random elements act nontrivially"
                       : "DensityViolation: " + note;
  return c;
}

}  // namespace

bool Report::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json to_json(const Report& report) {
  Json checks = Json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"anchor", c.anchor}, {"pass", c.pass}, {"detail", c.detail}, {"metrics", c.metrics}});
  return {{"command", report.command}, {"pass", report.pass()}, {"checks", checks}, {"data", report.data}};
}

std::string to_markdown(const Report& report) {
  const Json j = to_json(report);
  std::ostringstream out;
  out << "# xprod " << report.command << "\n\n";
  out << "Result: **" << (report.pass() ? "PASS" : "FAIL") << "**\n\n";
  out << "| Check | Anchor | Result | Detail |\n|---|---|---|---|\n";
  for (const auto& c : report.checks)
    out << "| " << c.name << " | " << c.anchor << " | " << (c.pass ? "PASS" : "FAIL") << " | " << c.detail << " |\n";
  for (const auto& c : j["checks"]) {
    if (c["metrics"].empty()) continue;
    out << "\n## " << c["name"].get<std::string>() << "\n\n";
    for (const auto& [k, v] : c["metrics"].items()) out << "- " << k << ": `" << v.dump() << "`\n";
  }
  if (!report.data.empty()) {
    out << "\n## data\n\n```json\n" << report.data.dump(2) << "\n```\n";
  }
  return out.str();
}

Report run_verify(const SampledSystem& system, const RunConfig& config) {
  Report report;
  report.command = "verify";
  SpacePtr space = validated(system, report);
  if (!space) return report;
  std::mt19937_64 rng(config.seed);
  const int trials = config.trials;
  report.checks.push_back(fourier_check(space->period(), config.tol));
  auto guarded = [&](const char* name, const char* anchor, auto fn) {
    try {
      report.checks.push_back(fn());
    } catch (const Error& e) {
      report.checks.push_back(failed_check(name, anchor, e));
    }
  };
  guarded("algebra_laws", "twisted circulant realization of the crossed product",
          [&] { return algebra_check(space, trials, rng, config.tol); });
  guarded("boundary_sequence", "exact sequence through the boundary map",
          [&] { return boundary_check(space, trials, rng); });
  guarded("representations", "irreducible representations at non-fixed points",
          [&] { return representation_check(space, trials, rng, config.tol); });
  guarded("pure_states", "characters at fixed points", [&] { return pure_state_check(space, trials, rng, config.tol); });
  guarded("essential_ideal", "essential ideal over the non-fixed points",
          [&] { return essential_check(space, trials, rng); });
  return report;
}

Report run_isomorphism(const SampledSystem& system, const RunConfig& config) {
  Report report;
  report.command = "isomorphism";
  SpacePtr space = validated(system, report);
  if (!space) return report;

  IsoOptions opt;
  opt.tol = config.tol;
  opt.trials = config.trials;
  opt.frontier_radius = config.frontier_radius;
  opt.trivialization_tol = config.trivialization_tol;
  opt.seed = config.seed;
  StructureResult result = structure_isomorphism(space, opt);
  const IsoCertificate& cert = result.certificate;
  report.data["certificate"] = to_json(cert);

  Check triv = make_check("trivialization", "triviality of the matrix bundle over the free orbits");
  triv.pass = cert.trivialization_ok;
  triv.metrics = {{"max_tree_defect", cert.max_tree_defect}, {"max_edge_defect", cert.max_edge_defect},
                  {"tolerance", cert.trivialization_tol}, {"holonomy_spread", cert.holonomy_spread}};
  triv.detail = "largest frame jump " + sci(cert.max_edge_defect);
  report.checks.push_back(triv);

  Check hom = make_check("structure_map", "isomorphism onto matrix functions diagonal at fixed classes");
  hom.metrics = {{"homomorphism", cert.defects.homomorphism},
                 {"adjoint", cert.defects.adjoint},
                 {"injectivity_margin", cert.defects.injectivity_margin},
                 {"surjectivity_residual", cert.defects.surjectivity_residual},
                 {"diagonality", cert.diagonality_defect},
                 {"well_definedness", cert.well_definedness_defect}};
  hom.pass = cert.defects.homomorphism <= config.tol.acceptance && cert.defects.adjoint <= config.tol.acceptance &&
             cert.defects.injectivity_margin > 0.0 && cert.defects.surjectivity_residual <= config.tol.acceptance &&
             cert.diagonality_defect <= config.tol.algebraic && cert.well_definedness_defect <= config.tol.acceptance;
  hom.detail = "homomorphism " + sci(cert.defects.homomorphism) + ", diagonality " + sci(cert.diagonality_defect) +
               ", margin " + sci(cert.defects.injectivity_margin);
  report.checks.push_back(hom);

  Check front = make_check("frontier_coherence", "structure theorem frontier coherence");
  front.metrics = {{"radius", cert.frontier_radius},
                   {"band_classes", cert.frontier_classes.size()},
                   {"frame_coherence", cert.frontier_frame_coherence},
                   {"mating_defect", cert.frontier_mating_defect},
                   {"raw_variation", cert.frontier_raw_variation},
                   {"factor", cert.frontier_factor}};
  front.pass = cert.frontier_mating_defect <= cert.frontier_factor * cert.frontier_raw_variation + config.tol.algebraic;
  front.detail = "mating defect " + sci(cert.frontier_mating_defect) + " against raw variation " +
                 sci(cert.frontier_raw_variation);
  report.checks.push_back(front);

  Check exact = make_check("sequence_exactness", "ideal of functions vanishing at fixed classes");
  std::mt19937_64 rng(config.seed + 1);
  ExactnessReport ex = sequence_exactness(result.map, std::max(1, std::min(config.trials, 50)), rng);
  exact.metrics = {{"kernel_to_vanishing", ex.kernel_to_vanishing}, {"vanishing_to_kernel", ex.vanishing_to_kernel}};
  exact.pass = ex.kernel_to_vanishing <= 1e-10 && ex.vanishing_to_kernel <= 1e-10;
  exact.detail = "inclusions " + sci(ex.kernel_to_vanishing) + " / " + sci(ex.vanishing_to_kernel);
  report.checks.push_back(exact);

  if (!cert.density_ok) {
    Check dens = make_check("density", "non-fixed points dense near the fixed set");
    dens.pass = true;
    dens.detail = "DensityViolation: certificate downgraded, the structure claim is not covered";
    report.checks.push_back(dens);
  }
  return report;
}

Report run_classify(const SampledSystem& a, const SampledSystem& b, const std::optional<std::vector<ClassId>>& forward,
                    bool recover, const RunConfig& config) {
  Report report;
  report.command = "classify";
  SpacePtr sa = validated(a, report);
  SpacePtr sb = validated(b, report);
  if (!sa || !sb) return report;
  report.data["classes"] = Json::array({sa->class_count(), sb->class_count()});
  report.data["fixed_points"] = Json::array({sa->fixed_ids().size(), sb->fixed_ids().size()});

  if (forward) {
    Check homeo = make_check("quotient_homeomorphism", "quotient homeomorphism carrying fixed set onto fixed set");
    try {
      QuotientMap map = verify_quotient_homeo(*sa, *sb, *forward);
      report.data["quotient_map"] = to_json(map);
      homeo.metrics = {{"bijective", map.bijective},
                       {"preserves_edges", map.preserves_edges},
                       {"preserves_fixed", map.preserves_fixed}};
      homeo.pass = map.bijective && map.preserves_edges && map.preserves_fixed;
      homeo.detail = homeo.pass ? "fixed-set-preserving homeomorphism of quotients" : "flags not all satisfied";
      report.checks.push_back(homeo);

      Check induced = make_check("induced_isomorphism", "composition with the quotient map");
      if (map.bijective) {
        InducedOptions relaxed{false, false};
        std::mt19937_64 rng(config.seed);
        double mult = 0.0, star = 0.0, diag = 0.0;
        for (int t = 0; t < config.trials; ++t) {
          AElement x = random_a_element(sb, rng), y = random_a_element(sb, rng);
          AElement px = induced_isomorphism(map, sa, x, relaxed);
          mult = std::max(mult, distance(induced_isomorphism(map, sa, x * y, relaxed), px * induced_isomorphism(map, sa, y, relaxed)));
          star = std::max(star, distance(induced_isomorphism(map, sa, x.adjoint(), relaxed), px.adjoint()));
          diag = std::max(diag, px.diagonality_defect());
        }
        double unit = distance(induced_isomorphism(map, sa, AElement::identity(sb), relaxed), AElement::identity(sa));
        induced.metrics = {{"trials", config.trials}, {"multiplicativity", mult}, {"adjoint", star},
                           {"unit", unit}, {"diagonality", diag}};
        induced.pass = mult == 0.0 && star == 0.0 && unit == 0.0 && diag == 0.0;
        induced.detail = "multiplicativity " + sci(mult) + ", diagonality " + sci(diag);
      } else {
        induced.detail = "NotHomeo: class map is not a bijection";
      }
      report.checks.push_back(induced);
    } catch (const Error& e) {
      report.checks.push_back(failed_check("quotient_homeomorphism",
                                           "quotient homeomorphism carrying fixed set onto fixed set", e));
    }
  }

  if (recover) {
    const char* anchor = "quotient map recovered from the algebra isomorphism";
    Check rec = make_check("recovery", anchor);
    if (sa->fixed_ids().size() != sb->fixed_ids().size() || sa->class_count() != sb->class_count() ||
        sa->period() != sb->period() || sa->size() != sb->size()) {
      rec.pass = false;
      rec.detail = sa->fixed_ids().size() != sb->fixed_ids().size()
                       ? "fixed-set cardinality mismatch (" + std::to_string(sa->fixed_ids().size()) + " vs " +
                             std::to_string(sb->fixed_ids().size()) + ")"
                       : "SizeMismatch: systems differ in size, period or class count";
      report.checks.push_back(rec);
      return report;
    }
    try {
      IsoOptions opt;
      opt.tol = config.tol;
      opt.trials = 0;
      opt.trivialization_tol = config.trivialization_tol;
      StructureMap phi_a = structure_isomorphism(sa, opt).map;
      StructureMap phi_b = structure_isomorphism(sb, opt).map;
      AlgebraBasis basis_a(sa), basis_b(sb);
      // theta = phi_a o (identity on point ids) o phi_b^{-1}
      CMatrix theta(static_cast<Eigen::Index>(basis_a.dimension()), static_cast<Eigen::Index>(basis_b.dimension()));
      for (std::size_t k = 0; k < basis_b.dimension(); ++k) {
        CrossedElement pre = phi_b.inverse(basis_b.element(k));
        CrossedElement moved(sa, pre.components());
        theta.col(static_cast<Eigen::Index>(k)) = basis_a.coordinates(phi_a.apply(moved));
      }
      Recovery r = recover_quotient_map(sb, sa, theta, std::max(1e-9, config.tol.acceptance));
      rec.metrics = {{"center_dimension", r.center_domain},
                     {"homomorphism", r.homomorphism_defect},
                     {"adjoint", r.adjoint_defect},
                     {"issues", r.issues}};
      if (r.map.forward.size() == sa->class_count()) report.data["recovered_map"] = to_json(r.map);
      rec.pass = r.ok;
      rec.detail = r.ok ? "recovered a fixed-set-preserving class bijection" : r.issues.front();
    } catch (const Error& e) {
      rec = failed_check("recovery", anchor, e);
    }
    report.checks.push_back(rec);
  }
  return report;
}

}  // namespace xprod
