#pragma once

#include "srlab/domain.hpp"
#include "srlab/sampling.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace srlab {

// `k m2` header, then `i j l value` lines with 1-based indices; (j, i, l)
// is completed by skew symmetry. '#' starts a comment.
CarnotSpec parse_carnot_spec(std::istream& is);
CarnotSpec parse_carnot_spec_string(const std::string& text);
void write_carnot_spec(std::ostream& os, const CarnotSpec& spec);

// skew symmetry and table size; throws DomainError
void validate_carnot_spec(const CarnotSpec& spec);
// the brackets [X_i, X_j] span the second layer
bool is_bracket_generating(const CarnotSpec& spec);

// (x + x', z + z' + 1/2 sum x_i c_ij^l x'_j)
Vec group_multiply(const CarnotSpec& spec, const Vec& a, const Vec& b);
Vec group_inverse(const CarnotSpec& spec, const Vec& a);
// q * (u t, 0)
Vec reduced_geodesic(const CarnotSpec& spec, const Vec& q, const Vec& u, double t);

using LevelFunction = std::function<double(const Vec&)>;

struct Chord {
  double forward = 0.0;
  double backward = 0.0;
  double length() const { return forward + backward; }
  bool capped = false;
};

// component through q of {t : U(q * (u t, 0)) >= 0}; scan step h, bisection refine
Chord line_chord(const CarnotSpec& spec, const LevelFunction& U, const Vec& q, const Vec& u, double scale);
Chord line_chord(const CarnotSpec& spec, const Domain& domain, const Vec& q, const Vec& u);

struct HorizontalDiameter {
  double sampled = 0.0;  // best MC chord
  double lower = 0.0;    // after pattern-search refinement
  double upper = 0.0;    // lower plus the late refinement gain and final mesh: heuristic
  std::size_t samples = 0;
  int iterations = 0;
  Vec q_best;
  Vec u_best;
};

HorizontalDiameter horizontal_diameter(const CarnotSpec& spec, const Domain& domain, std::size_t n_samples,
                                       std::uint64_t seed = 1, int iterations = 200,
                                       Execution exec = Execution::Parallel);

struct CarnotBounds {
  HorizontalDiameter diameter;
  int k = 0;
  double lambda1_bound = 0.0;     // k pi^2 / diam^2 with the upper bracket
  double perimeter_bound = 0.0;   // 2 pi |S^{k-1}| / (|S^k| diam)
  Estimate sigma_over_omega;
  bool perimeter_holds = false;
  std::optional<double> lambda1_analytic_bound;  // with a known diameter
};

CarnotBounds carnot_bounds(const CarnotSpec& spec, const Domain& domain, std::size_t n_samples,
                           std::size_t n_boundary, std::uint64_t seed = 1, Execution exec = Execution::Parallel);

}  // namespace srlab
