// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/fuzzy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "fnms/geometry.hpp"
#include "fnms/simd/kernels.hpp"

namespace fnms::fuzzy {
namespace {

constexpr double kMassEps = 1e-12;

thread_local std::vector<double> t_aggregate;

int peak_argmin(const FuzzyVariable& var) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(var.sets.size()); ++i) {
    if (var.sets[i].mf.b < var.sets[best].mf.b) best = i;
  }
  return best;
}

int peak_argmax(const FuzzyVariable& var) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(var.sets.size()); ++i) {
    if (var.sets[i].mf.b >= var.sets[best].mf.b) best = i;
  }
  return best;
}

void validate_variable(const FuzzyVariable& var) {
  if (!std::isfinite(var.lo) || !std::isfinite(var.hi) || var.lo >= var.hi) {
    throw std::invalid_argument("variable '" + var.name +
                                "': domain must be a finite interval");
  }
  if (var.sets.empty()) {
    throw std::invalid_argument("variable '" + var.name + "': no sets");
  }
  for (const FuzzySet& set : var.sets) {
    const TriangularMf& mf = set.mf;
    if (!(std::isfinite(mf.a) && std::isfinite(mf.b) && std::isfinite(mf.c))) {
      throw std::invalid_argument("set '" + var.name + "." + set.name +
                                  "': non-finite parameters");
    }
    if (mf.a > mf.b || mf.b > mf.c) {
      throw std::invalid_argument("set '" + var.name + "." + set.name +
                                  "': requires a <= b <= c");
    }
    if (mf.a < var.lo || mf.c > var.hi) {
      throw std::invalid_argument("set '" + var.name + "." + set.name +
                                  "': support outside the variable domain");
    }
  }
  for (std::size_t i = 0; i < var.sets.size(); ++i) {
    for (std::size_t j = i + 1; j < var.sets.size(); ++j) {
      if (var.sets[i].name == var.sets[j].name) {
        throw std::invalid_argument("variable '" + var.name +
                                    "': duplicate set name '" +
                                    var.sets[i].name + "'");
      }
    }
  }
}

}  // namespace

double mf_eval(const TriangularMf& mf, double x) {
  if (!std::isfinite(x)) return 0.0;
  if (x == mf.b) return 1.0;
  if (x <= mf.a || x >= mf.c) return 0.0;
  if (x < mf.b) return (x - mf.a) / (mf.b - mf.a);
  return (mf.c - x) / (mf.c - mf.b);
}

const char* to_string(BoxClass cls) {
  switch (cls) {
    case BoxClass::kLD:
      return "LD";
    case BoxClass::kSVHD:
      return "SVHD";
    case BoxClass::kLVHD:
      return "LVHD";
  }
  return "?";
}

FuzzySystem::FuzzySystem(FuzzySystemConfig config)
    : config_(std::move(config)) {
  validate();
  density_outer_low_ = peak_argmin(config_.density);
  density_outer_high_ = peak_argmax(config_.density);
  volume_outer_low_ = peak_argmin(config_.volume);
  volume_outer_high_ = peak_argmax(config_.volume);

  const int res = config_.resolution;
  grid_.resize(res);
  const double lo = config_.output.lo;
  const double step = (config_.output.hi - lo) / (res - 1);
  for (int i = 0; i < res; ++i) grid_[i] = lo + step * i;
  grid_.back() = config_.output.hi;

  output_curves_.resize(config_.output.sets.size());
  for (std::size_t k = 0; k < config_.output.sets.size(); ++k) {
    output_curves_[k].resize(res);
    for (int i = 0; i < res; ++i) {
      output_curves_[k][i] = mf_eval(config_.output.sets[k].mf, grid_[i]);
    }
  }

  // Load-time coverage sweep: every grid point interior to some support on
  // both axes must fire at least one rule (guaranteed by completeness; kept
  // as a guard against future rule-dispatch regressions).
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double density =
          config_.density.lo +
          (config_.density.hi - config_.density.lo) * i / 99.0;
      const double volume =
          config_.volume.lo + (config_.volume.hi - config_.volume.lo) * j / 99.0;
      double best_d = 0.0;
      double best_v = 0.0;
      for (int s = 0; s < static_cast<int>(config_.density.sets.size()); ++s) {
        best_d = std::max(best_d, fuzzify_density(s, density));
      }
      for (int s = 0; s < static_cast<int>(config_.volume.sets.size()); ++s) {
        best_v = std::max(best_v, fuzzify_volume(s, volume));
      }
      if (best_d <= 0.0 || best_v <= 0.0) continue;  // not interior
      double fired = 0.0;
      for (const Rule& rule : config_.rules) {
        fired = std::max(fired,
                         std::min(fuzzify_density(rule.density_set, density),
                                  fuzzify_volume(rule.volume_set, volume)));
      }
      if (fired <= 0.0) {
        throw std::invalid_argument(
            "rule base leaves a covered input without a firing rule");
      }
    }
  }
}

void FuzzySystem::validate() const {
  validate_variable(config_.density);
  validate_variable(config_.volume);
  validate_variable(config_.output);
  if (config_.output.sets.size() != 3) {
    throw std::invalid_argument("output variable must have exactly 3 sets");
  }
  if (config_.density.sets.size() > 16 || config_.volume.sets.size() > 16) {
    throw std::invalid_argument("input variables support at most 16 sets");
  }
  if (config_.resolution < 2) {
    throw std::invalid_argument("resolution must be at least 2");
  }
  const int nd = static_cast<int>(config_.density.sets.size());
  const int nv = static_cast<int>(config_.volume.sets.size());
  const int no = static_cast<int>(config_.output.sets.size());
  if (config_.rules.size() != static_cast<std::size_t>(nd) * nv) {
    throw std::invalid_argument(
        "rule table incomplete: expected " + std::to_string(nd * nv) +
        " rules, got " + std::to_string(config_.rules.size()));
  }
  std::vector<bool> seen(static_cast<std::size_t>(nd) * nv, false);
  for (const Rule& rule : config_.rules) {
    if (rule.density_set < 0 || rule.density_set >= nd ||
        rule.volume_set < 0 || rule.volume_set >= nv || rule.output_set < 0 ||
        rule.output_set >= no) {
      throw std::invalid_argument("rule references an unknown set");
    }
    const std::size_t slot =
        static_cast<std::size_t>(rule.density_set) * nv + rule.volume_set;
    if (seen[slot]) {
      throw std::invalid_argument(
          "duplicate rule antecedent (" +
          config_.density.sets[rule.density_set].name + ", " +
          config_.volume.sets[rule.volume_set].name + ")");
    }
    seen[slot] = true;
  }
}

double FuzzySystem::fuzzify(const FuzzyVariable& var, int outer_low,
                            int outer_high, int set, double x) const {
  const double clamped = std::clamp(x, var.lo, var.hi);
  const TriangularMf& mf = var.sets[set].mf;
  if (set == outer_high && clamped >= mf.b) return 1.0;
  if (set == outer_low && clamped <= mf.b) return 1.0;
  return mf_eval(mf, clamped);
}

double FuzzySystem::fuzzify_density(int set, double x) const {
  return fuzzify(config_.density, density_outer_low_, density_outer_high_, set,
                 x);
}

double FuzzySystem::fuzzify_volume(int set, double x) const {
  return fuzzify(config_.volume, volume_outer_low_, volume_outer_high_, set,
                 x);
}

FuzzySystem::Inference FuzzySystem::infer(double density,
                                          double volume) const {
  if (!std::isfinite(density) || !std::isfinite(volume)) {
    throw std::invalid_argument("infer: non-finite input");
  }
  const int nd = static_cast<int>(config_.density.sets.size());
  const int nv = static_cast<int>(config_.volume.sets.size());
  double mu_d[16];
  double mu_v[16];
  for (int i = 0; i < nd; ++i) mu_d[i] = fuzzify_density(i, density);
  for (int i = 0; i < nv; ++i) mu_v[i] = fuzzify_volume(i, volume);

  const std::size_t res = grid_.size();
  t_aggregate.assign(res, 0.0);
  bool fired = false;
  for (const Rule& rule : config_.rules) {
    const double strength =
        std::min(mu_d[rule.density_set], mu_v[rule.volume_set]);
    if (strength <= 0.0) continue;
    fired = true;
    simd::clip_accumulate(t_aggregate.data(),
                          output_curves_[rule.output_set].data(), strength,
                          res);
  }
  if (!fired) {
    return {0.5 * (config_.output.lo + config_.output.hi), true};
  }
  double m0 = 0.0;
  double m1 = 0.0;
  simd::weighted_moments(t_aggregate.data(), grid_.data(), res, m0, m1);
  if (m0 < kMassEps) {
    return {0.5 * (config_.output.lo + config_.output.hi), true};
  }
  const double v_o = std::clamp(m1 / m0, config_.output.lo, config_.output.hi);
  return {v_o, false};
}

BoxCategory FuzzySystem::classify_value(double v_o) const {
  const auto& sets = config_.output.sets;
  int best = 0;
  double best_mu = mf_eval(sets[0].mf, v_o);
  double best_dist = std::abs(v_o - sets[0].mf.b);
  for (int i = 1; i < static_cast<int>(sets.size()); ++i) {
    const double mu = mf_eval(sets[i].mf, v_o);
    const double dist = std::abs(v_o - sets[i].mf.b);
    if (mu > best_mu || (mu == best_mu && dist < best_dist)) {
      best = i;
      best_mu = mu;
      best_dist = dist;
    }
  }
  return {static_cast<BoxClass>(best), v_o, false};
}

BoxCategory FuzzySystem::classify(double density, double volume) const {
  const Inference inf = infer(density, volume);
  BoxCategory cat = classify_value(inf.v_o);
  cat.degenerate = inf.degenerate;
  return cat;
}

std::vector<BoxCategory> FuzzySystem::classify_boxes(
    std::span<const Box3D> boxes,
    const cluster::ClusterAssignment& assignment) const {
  if (assignment.density.size() != boxes.size()) {
    throw std::invalid_argument(
        "classify_boxes: assignment not aligned with boxes");
  }
  struct KeyHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k)
        const {
      return std::hash<std::uint64_t>{}(k.first * 1099511628211ull ^ k.second);
    }
  };
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, BoxCategory,
                     KeyHash>
      memo;
  memo.reserve(boxes.size());
  std::vector<BoxCategory> out(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double density = assignment.density[i];
    const double volume = geom::volume(boxes[i]);
    const std::pair<std::uint64_t, std::uint64_t> key{
        std::bit_cast<std::uint64_t>(density),
        std::bit_cast<std::uint64_t>(volume)};
    const auto it = memo.find(key);
    if (it != memo.end()) {
      out[i] = it->second;
      continue;
    }
    const BoxCategory cat = classify(density, volume);
    memo.emplace(key, cat);
    out[i] = cat;
  }
  return out;
}

std::vector<BoxCategory> FuzzySystem::classify_boxes(
    const Frame& frame, const cluster::ClusterAssignment& assignment) const {
  return classify_boxes(std::span<const Box3D>(frame.boxes), assignment);
}

std::vector<FuzzySystem::RuleFiring> FuzzySystem::rule_firings(
    double density, double volume) const {
  std::vector<RuleFiring> out;
  for (int r = 0; r < static_cast<int>(config_.rules.size()); ++r) {
    const Rule& rule = config_.rules[r];
    const double strength = std::min(fuzzify_density(rule.density_set, density),
                                     fuzzify_volume(rule.volume_set, volume));
    if (strength > 0.0) out.push_back({r, strength});
  }
  return out;
}

}  // namespace fnms::fuzzy
