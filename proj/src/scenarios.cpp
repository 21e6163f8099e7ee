#include "xprod/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace xprod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-9;

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0 ? a + 2.0 * kPi : a;
}

void require_unit(Complex z, const char* name) {
  require(std::abs(std::abs(z) - 1.0) <= kTol, ErrorCode::OutOfDomain, std::string(name) + " must lie on the unit circle");
}

/// Distinct values sorted from largest to smallest, merged within kTol.
std::vector<double> levels_descending(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  std::vector<double> out;
  for (double v : values)
    if (out.empty() || out.back() - v > kTol) out.push_back(v);
  return out;
}

std::size_t level_of(const std::vector<double>& levels, double v) {
  for (std::size_t r = 0; r < levels.size(); ++r)
    if (std::abs(levels[r] - v) <= kTol) return r;
  throw Error(ErrorCode::OutOfDomain, "value outside the sampled levels");
}

}  // namespace

SampledSystem circle_conjugation(int n) {
  require(n % 2 == 0, ErrorCode::OddResolution, "circle resolution must be even, got " + std::to_string(n));
  require(n >= 4, ErrorCode::InvalidParams, "circle resolution must be at least 4");
  SampledSystem s;
  s.period = 2;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    s.points.push_back({static_cast<PointId>(k), {std::cos(a), std::sin(a)}});
    s.edges.push_back({static_cast<PointId>(k), static_cast<PointId>((k + 1) % n)});
    s.theta.push_back(static_cast<PointId>((n - k) % n));
  }
  return s;
}

SampledSystem torus_swap(int n) {
  require(n >= 3, ErrorCode::InvalidParams, "torus resolution must be at least 3");
  SampledSystem s;
  s.period = 2;
  auto id = [n](int i, int j) { return static_cast<PointId>(i * n + j); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * kPi * i / n, b = 2.0 * kPi * j / n;
      s.points.push_back({id(i, j), {std::cos(a), std::sin(a), std::cos(b), std::sin(b)}});
      s.edges.push_back({id(i, j), id((i + 1) % n, j)});
      s.edges.push_back({id(i, j), id(i, (j + 1) % n)});
      s.theta.push_back(id(j, i));
    }
  return s;
}

SampledSystem cylinder_reflection(int nt, int nz) {
  require(nt % 2 == 1, ErrorCode::EvenTResolution, "t resolution must be odd, got " + std::to_string(nt));
  require(nt >= 3 && nz >= 3, ErrorCode::InvalidParams, "cylinder needs at least 3 samples in each direction");
  SampledSystem s;
  s.period = 2;
  auto id = [nz](int a, int b) { return static_cast<PointId>(a * nz + b); };
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nz; ++b) {
      const double t = 2.0 * a / (nt - 1);
      const double ang = 2.0 * kPi * b / nz;
      s.points.push_back({id(a, b), {t, std::cos(ang), std::sin(ang)}});
      if (a + 1 < nt) s.edges.push_back({id(a, b), id(a + 1, b)});
      s.edges.push_back({id(a, b), id(a, (b + 1) % nz)});
      s.theta.push_back(id(nt - 1 - a, b));
    }
  return s;
}

SampledSystem disk_rotation(int nr, int na, int p) {
  require(is_prime(p), ErrorCode::NonPrimePeriod, "period " + std::to_string(p) + " is not prime");
  require(na % p == 0, ErrorCode::IndivisibleAngles,
          std::to_string(na) + " angle samples are not divisible by " + std::to_string(p));
  require(nr >= 1 && na >= 3, ErrorCode::InvalidParams, "disk needs at least one ring of 3 samples");
  SampledSystem s;
  s.period = p;
  auto id = [na](int r, int k) { return static_cast<PointId>(1 + (r - 1) * na + k); };
  s.points.push_back({0, {0.0, 0.0}});
  s.theta.push_back(0);
  const int step = na / p;
  for (int r = 1; r <= nr; ++r)
    for (int k = 0; k < na; ++k) {
      const double rad = static_cast<double>(r) / nr, ang = 2.0 * kPi * k / na;
      s.points.push_back({id(r, k), {rad * std::cos(ang), rad * std::sin(ang)}});
      s.theta.push_back(id(r, (k + step) % na));
      s.edges.push_back({id(r, k), id(r, (k + 1) % na)});
      if (r == 1)
        s.edges.push_back({0, id(r, k)});
      else
        s.edges.push_back({id(r - 1, k), id(r, k)});
    }
  return s;
}

double gamma_map(Complex z) {
  require_unit(z, "z");
  return (z.real() + 1.0) / 2.0;
}

std::pair<Complex, Complex> xi_map(Complex z1, Complex z2) {
  require_unit(z1, "z1");
  require_unit(z2, "z2");
  return {z1 + z2, z1 * z2};
}

std::pair<Complex, Complex> beta_map(double t, Complex z) {
  require(t >= -kTol && t <= 1.0 + kTol, ErrorCode::OutOfDomain, "t must lie in [0, 1]");
  require_unit(z, "z");
  return {2.0 * z * t, z * z};
}

std::pair<double, Complex> beta_inverse(Complex u, Complex w, std::optional<Complex> hint) {
  require_unit(w, "w");
  const Complex r = std::sqrt(w);
  if (std::abs(u) <= kTol) {
    if (!hint) throw Error(ErrorCode::InverseAmbiguity, "both square roots qualify at t = 0");
    Complex z = std::abs(r - *hint) <= std::abs(-r - *hint) ? r : -r;
    return {0.0, z};
  }
  for (Complex z : {r, -r}) {
    Complex t = u / (2.0 * z);
    if (std::abs(t.imag()) <= kTol && t.real() >= -kTol && t.real() <= 1.0 + kTol)
      return {std::clamp(t.real(), 0.0, 1.0), z};
  }
  throw Error(ErrorCode::OutOfDomain, "(u, w) is not in the image of beta");
}

std::pair<double, Complex> delta_map(Complex z1, Complex z2, std::optional<Complex> hint) {
  auto [u, w] = xi_map(z1, z2);
  return beta_inverse(u, w, hint);
}

std::pair<double, Complex> delta_prime_map(double t, Complex z) {
  require(t >= -kTol && t <= 2.0 + kTol, ErrorCode::OutOfDomain, "t must lie in [0, 2]");
  require_unit(z, "z");
  return {1.0 - std::abs(1.0 - t), z};
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "gamma") return MapKind::Gamma;
  if (name == "xi") return MapKind::Xi;
  if (name == "beta") return MapKind::Beta;
  if (name == "delta") return MapKind::Delta;
  if (name == "delta_prime" || name == "delta-prime") return MapKind::DeltaPrime;
  throw Error(ErrorCode::InvalidParams, "unknown map '" + name + "'");
}

std::vector<Complex> example_map(MapKind kind, const std::vector<Complex>& input) {
  const std::size_t arity = kind == MapKind::Gamma ? 1 : 2;
  require(input.size() == arity, ErrorCode::OutOfDomain, "wrong number of arguments");
  auto real_arg = [](Complex c) {
    require(std::abs(c.imag()) <= kTol, ErrorCode::OutOfDomain, "t must be real");
    return c.real();
  };
  switch (kind) {
    case MapKind::Gamma:
      return {gamma_map(input[0])};
    case MapKind::Xi: {
      auto [u, w] = xi_map(input[0], input[1]);
      return {u, w};
    }
    case MapKind::Beta: {
      auto [u, w] = beta_map(real_arg(input[0]), input[1]);
      return {u, w};
    }
    case MapKind::Delta: {
      auto [t, z] = delta_map(input[0], input[1]);
      return {t, z};
    }
    case MapKind::DeltaPrime: {
      auto [t, z] = delta_prime_map(real_arg(input[0]), input[1]);
      return {t, z};
    }
  }
  throw Error(ErrorCode::InvalidParams, "unknown map");
}

std::vector<std::pair<double, Complex>> delta_on_classes(const PeriodicSpace& torus) {
  const std::size_t n = torus.class_count();
  std::vector<std::pair<double, Complex>> out(n);
  std::vector<bool> done(n, false);
  auto eval = [&](ClassId q, std::optional<Complex> hint) {
    const auto& c = torus.system().points[torus.representative(q)].coords;
    require(c.size() == 4, ErrorCode::OutOfDomain, "torus samples carry four coordinates");
    out[q] = delta_map({c[0], c[1]}, {c[2], c[3]}, hint);
    done[q] = true;
  };
  for (ClassId start = 0; start < n; ++start) {
    if (done[start]) continue;
    eval(start, std::nullopt);
    std::deque<ClassId> queue{start};
    while (!queue.empty()) {
      ClassId q = queue.front();
      queue.pop_front();
      for (ClassId r : torus.class_neighbors()[q])
        if (!done[r]) {
          eval(r, out[q].second);
          queue.push_back(r);
        }
    }
  }
  return out;
}

std::vector<ClassId> delta_sample_map(const PeriodicSpace& torus, const PeriodicSpace& cylinder) {
  require(torus.class_count() == cylinder.class_count(), ErrorCode::SizeMismatch,
          "quotients have " + std::to_string(torus.class_count()) + " and " +
              std::to_string(cylinder.class_count()) + " classes");
  const auto image = delta_on_classes(torus);

  struct Sample {
    double t;
    double angle;
  };
  std::vector<Sample> cyl(cylinder.class_count());
  for (ClassId q = 0; q < cyl.size(); ++q) {
    const auto& c = cylinder.system().points[cylinder.representative(q)].coords;
    require(c.size() == 3, ErrorCode::OutOfDomain, "cylinder samples carry three coordinates");
    auto [t, z] = delta_prime_map(c[0], {c[1], c[2]});
    cyl[q] = {t, wrap_angle(std::arg(z))};
  }

  std::vector<double> tv, cv;
  for (const auto& [t, z] : image) tv.push_back(t);
  for (const auto& s : cyl) cv.push_back(s.t);
  const auto torus_levels = levels_descending(tv);
  const auto cyl_levels = levels_descending(cv);
  require(torus_levels.size() == cyl_levels.size(), ErrorCode::SizeMismatch,
          "quotients have " + std::to_string(torus_levels.size()) + " and " + std::to_string(cyl_levels.size()) +
              " t-levels");

  std::vector<ClassId> forward(torus.class_count());
  for (ClassId q = 0; q < forward.size(); ++q) {
    const std::size_t level = level_of(torus_levels, image[q].first);
    const double alpha = wrap_angle(std::arg(image[q].second));
    double best = std::numeric_limits<double>::infinity();
    bool best_below = false;
    ClassId choice = 0;
    for (ClassId c = 0; c < cyl.size(); ++c) {
      if (level_of(cyl_levels, cyl[c].t) != level) continue;
      double diff = std::remainder(cyl[c].angle - alpha, 2.0 * kPi);
      double dist = std::abs(diff);
      bool below = diff < 0;
      if (dist < best - kTol || (std::abs(dist - best) <= kTol && below && !best_below)) {
        best = dist;
        best_below = below;
        choice = c;
      }
    }
    forward[q] = choice;
  }
  return forward;
}

std::vector<PointId> cylinder_rotation(int nt, int nz, int shift) {
  std::vector<PointId> out(static_cast<std::size_t>(nt) * nz);
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nz; ++b)
      out[static_cast<std::size_t>(a * nz + b)] = static_cast<PointId>(a * nz + ((b + shift) % nz + nz) % nz);
  return out;
}

}  // namespace xprod
