// Finite-support ultrameans: weighted products of structures quotiented by
// the kernel of the averaged pseudometric.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alqe/semantics.hpp"

namespace alqe {

struct WeightedStructure {
  Rational weight;
  FiniteStructure structure;
};

/// Members share one signature; weights are nonnegative and sum to exactly 1.
using WeightedFamily = std::vector<WeightedStructure>;

struct UltrameanOptions {
  /// Largest product universe accepted before the kernel quotient.
  std::size_t max_universe = 4096;
};

/// The mean structure together with the map from product tuples to classes.
struct Ultramean {
  FiniteStructure structure;
  /// Component universe sizes; product tuples are mixed-radix indices with
  /// the first component most significant.
  std::vector<std::size_t> radix;
  std::vector<std::size_t> class_of;

  std::size_t element_of(std::span<const std::size_t> coordinates) const;
};

/// Builds the product, merges tuples at averaged distance zero (union-find),
/// and interprets symbols on lexicographically least representatives.
/// Well-definedness of every function and relation on classes is verified;
/// a failure throws Error since it would mean an input structure is not a
/// metric structure.
Ultramean construct_ultramean(const WeightedFamily& family, const UltrameanOptions& options = {});
FiniteStructure ultramean(const WeightedFamily& family, const UltrameanOptions& options = {});

/// ultramean({(lambda, m1), (1 - lambda, m2)}).
Ultramean construct_mixture(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                            const UltrameanOptions& options = {});
FiniteStructure mixture(const FiniteStructure& m1, const FiniteStructure& m2, const Rational& lambda,
                        const UltrameanOptions& options = {});

struct LosCheck {
  bool equal;
  Rational mean_value;      // value in the ultramean
  Rational weighted_value;  // sum of weight * value in each member
};

/// Compares a closed affine sentence in the ultramean against the weighted
/// average of its member values. Lattice formulas are rejected with
/// FragmentError: the law does not hold for them.
LosCheck verify_los(const WeightedFamily& family, const Formula& sentence, const UltrameanOptions& options = {});

}  // namespace alqe
