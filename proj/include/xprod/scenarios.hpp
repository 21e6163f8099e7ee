#pragma once

// Generators for the worked examples and extra stress systems, and the
// explicit maps between their orbit spaces.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xprod/matalg.hpp"
#include "xprod/space.hpp"

namespace xprod {

/// N samples of the unit circle, theta = complex conjugation (k -> -k).
/// Fixed ids are 0 (z = 1) and N/2 (z = -1).
SampledSystem circle_conjugation(int n);

/// N x N grid on the torus, id = i * N + j, theta swaps the two angles.
/// coords = (cos a_i, sin a_i, cos a_j, sin a_j).
SampledSystem torus_swap(int n);

/// [0,2] x S^1 with Nt t-samples (odd, so t = 1 is sampled) and Nz angles.
/// id = a * Nz + b, coords = (t, cos, sin), theta(t, z) = (2 - t, z).
SampledSystem cylinder_reflection(int nt, int nz);

/// Polar grid of the unit disk with a center point (id 0); ring r in
/// 1..Nr holds ids 1 + (r-1) Na + k. theta rotates by 2 pi / p.
SampledSystem disk_rotation(int nr, int na, int p);

// Explicit maps on orbit-space coordinates.

/// <z> -> (Re z + 1) / 2 on the conjugation quotient of the circle.
double gamma_map(Complex z);
/// <z1, z2> -> (z1 + z2, z1 z2).
std::pair<Complex, Complex> xi_map(Complex z1, Complex z2);
/// (t, z) -> (2 z t, z^2) for t in [0, 1], |z| = 1.
std::pair<Complex, Complex> beta_map(double t, Complex z);
/// Inverse of beta. At u = 0 both square roots of w qualify; `hint`
/// picks the nearer one, otherwise InverseAmbiguity.
std::pair<double, Complex> beta_inverse(Complex u, Complex w, std::optional<Complex> hint = std::nullopt);
/// beta^{-1} o xi.
std::pair<double, Complex> delta_map(Complex z1, Complex z2, std::optional<Complex> hint = std::nullopt);
/// (t, z) -> (1 - |1 - t|, z) for t in [0, 2].
std::pair<double, Complex> delta_prime_map(double t, Complex z);

enum class MapKind { Gamma, Xi, Beta, Delta, DeltaPrime };

MapKind parse_map_kind(const std::string& name);

/// Generic entry point. Inputs: gamma (z); xi (z1, z2); beta (t, z);
/// delta (z1, z2); delta_prime (t, z). Real parameters are passed as the
/// real part and must have zero imaginary part.
std::vector<Complex> example_map(MapKind kind, const std::vector<Complex>& input);

/// delta on every class of a torus_swap system, with the square-root
/// choice at t = 0 carried along a breadth-first walk of the quotient
/// from a diagonal class.
std::vector<std::pair<double, Complex>> delta_on_classes(const PeriodicSpace& torus);

/// Sample-level delta'^{-1} o delta from the classes of a torus_swap
/// system to the classes of a cylinder_reflection system: t-levels are
/// matched by rank from t = 1 downwards, angles snap to the nearest
/// cylinder sample of that level (ties to the lower angle).
std::vector<ClassId> delta_sample_map(const PeriodicSpace& torus, const PeriodicSpace& cylinder);

/// Rotation (a, b) -> (a, b + shift) of a cylinder_reflection grid, which
/// commutes with theta.
std::vector<PointId> cylinder_rotation(int nt, int nz, int shift);

}  // namespace xprod
