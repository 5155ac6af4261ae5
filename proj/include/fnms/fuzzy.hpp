// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fnms/box.hpp"
#include "fnms/clustering.hpp"

namespace fnms::fuzzy {

// Triangle with feet a, c and peak b (a <= b <= c). Degenerate flat sides
// (a == b or b == c) evaluate to 1 at the shared point.
struct TriangularMf {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Piecewise-linear membership: (x-a)/(b-a) on [a,b], (c-x)/(c-b) on [b,c],
// 0 outside. Exactly 1 at the peak and exactly 0 at non-degenerate feet.
double mf_eval(const TriangularMf& mf, double x);

struct FuzzySet {
  std::string name;
  TriangularMf mf;
};

struct FuzzyVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<FuzzySet> sets;
};

// One IF-THEN rule: antecedent set per input, consequent output set.
struct Rule {
  int density_set = 0;
  int volume_set = 0;
  int output_set = 0;
};

enum class BoxClass { kLD = 0, kSVHD = 1, kLVHD = 2 };

const char* to_string(BoxClass cls);

struct BoxCategory {
  BoxClass cls = BoxClass::kLD;
  double v_o = 0.0;      // crisp defuzzified value
  bool degenerate = false;  // no rule fired; v_o is the domain midpoint
};

struct FuzzySystemConfig {
  FuzzyVariable density;
  FuzzyVariable volume;
  FuzzyVariable output;  // exactly three sets, ordered LD, SVHD, LVHD
  std::vector<Rule> rules;  // complete: one rule per antecedent pair
  int resolution = 1001;    // output discretization samples
};

// Mamdani engine: min firing strength, min implication (clipping), pointwise
// SUM aggregation over a uniform output discretization, centroid
// defuzzification. Immutable after construction; infer is pure and safe to
// call concurrently.
//
// Inputs are clamped to their variable domains, and the outermost set of
// each input saturates at 1 beyond its peak, so an oversized box keeps full
// membership in the top volume set instead of falling off the triangle's
// far foot. mf_eval itself stays the literal triangle.
class FuzzySystem {
 public:
  // Validates the configuration; throws std::invalid_argument with a
  // description of the first problem (bad MF ordering, incomplete rule
  // table, support outside the domain, ...).
  explicit FuzzySystem(FuzzySystemConfig config);

  struct Inference {
    double v_o = 0.0;
    bool degenerate = false;
  };

  // Throws std::invalid_argument on non-finite inputs. When no rule fires
  // (aggregated mass < 1e-12) returns the output midpoint with the
  // degenerate flag set.
  Inference infer(double density, double volume) const;

  // Decodes a crisp value: argmax of the output memberships, ties broken by
  // distance to the peak, then by set order.
  BoxCategory classify_value(double v_o) const;

  // infer followed by classify_value.
  BoxCategory classify(double density, double volume) const;

  // Per-box volume + cluster density -> category. The assignment must be
  // aligned with the frame's boxes. Repeated (density, volume) pairs are
  // memoized within the call.
  std::vector<BoxCategory> classify_boxes(
      std::span<const Box3D> boxes,
      const cluster::ClusterAssignment& assignment) const;
  std::vector<BoxCategory> classify_boxes(
      const Frame& frame, const cluster::ClusterAssignment& assignment) const;

  struct RuleFiring {
    int rule = 0;
    double strength = 0.0;
  };
  // Nonzero firing strengths for diagnostics.
  std::vector<RuleFiring> rule_firings(double density, double volume) const;

  // Input membership with domain clamping and boundary saturation applied.
  double fuzzify_density(int set, double x) const;
  double fuzzify_volume(int set, double x) const;

  const FuzzySystemConfig& config() const { return config_; }

 private:
  void validate() const;
  double fuzzify(const FuzzyVariable& var, int outer_low, int outer_high,
                 int set, double x) const;

  FuzzySystemConfig config_;
  int density_outer_low_ = 0;   // set with the lowest peak
  int density_outer_high_ = 0;  // set with the highest peak
  int volume_outer_low_ = 0;
  int volume_outer_high_ = 0;
  std::vector<double> grid_;                       // output sample positions
  std::vector<std::vector<double>> output_curves_;  // per set, per sample
};

}  // namespace fnms::fuzzy
