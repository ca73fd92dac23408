// Copyright 2026 The iceval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iceval/scheme.hpp"

#include <cmath>

namespace iceval {
namespace {

void check_clip(double clip) {
  if (std::isnan(clip) || clip <= 0.0) {
    throw InvalidScheme("clip threshold must lie in (0, +inf], got " +
                        std::to_string(clip));
  }
}

void check_blend(double blend) {
  if (std::isnan(blend) || blend < 0.0 || blend > 1.0) {
    throw InvalidScheme("blend coefficient must lie in [0, 1], got " +
                        std::to_string(blend));
  }
}

}  // namespace

WeightScheme WeightScheme::direct() { return {SchemeKind::kDirect}; }
WeightScheme WeightScheme::ips() { return {SchemeKind::kIps}; }

WeightScheme WeightScheme::clipped_ips(double clip) {
  check_clip(clip);
  WeightScheme s{SchemeKind::kClippedIps};
  s.clip = clip;
  return s;
}

WeightScheme WeightScheme::doubly_robust() { return {SchemeKind::kDoublyRobust}; }

WeightScheme WeightScheme::static_blend(double blend) {
  check_blend(blend);
  WeightScheme s{SchemeKind::kStaticBlend};
  s.blend = blend;
  return s;
}

WeightScheme WeightScheme::hard_switch(double clip) {
  check_clip(clip);
  WeightScheme s{SchemeKind::kSwitch};
  s.clip = clip;
  return s;
}

WeightScheme WeightScheme::cab(double clip) {
  check_clip(clip);
  WeightScheme s{SchemeKind::kCab};
  s.clip = clip;
  return s;
}

WeightScheme WeightScheme::cab_dr(double clip) {
  check_clip(clip);
  WeightScheme s{SchemeKind::kCabDr};
  s.clip = clip;
  return s;
}

WeightScheme WeightScheme::from_label(const std::string& label,
                                      std::optional<double> param) {
  const auto need = [&](const char* what) -> double {
    if (!param) throw InvalidScheme(label + " requires a " + what + " parameter");
    return *param;
  };
  const auto reject_param = [&]() {
    if (param) throw InvalidScheme(label + " takes no hyperparameter");
  };
  if (label == "DM") { reject_param(); return direct(); }
  if (label == "IPS") { reject_param(); return ips(); }
  if (label == "cIPS") return clipped_ips(need("clip"));
  if (label == "DR") { reject_param(); return doubly_robust(); }
  if (label == "SB") return static_blend(need("blend"));
  if (label == "SWITCH") return hard_switch(need("clip"));
  if (label == "CAB") return cab(need("clip"));
  if (label == "CAB-DR") return cab_dr(need("clip"));
  throw InvalidScheme("unknown estimator label: " + label);
}

std::string WeightScheme::label() const {
  switch (kind) {
    case SchemeKind::kDirect: return "DM";
    case SchemeKind::kIps: return "IPS";
    case SchemeKind::kClippedIps: return "cIPS";
    case SchemeKind::kDoublyRobust: return "DR";
    case SchemeKind::kStaticBlend: return "SB";
    case SchemeKind::kSwitch: return "SWITCH";
    case SchemeKind::kCab: return "CAB";
    case SchemeKind::kCabDr: return "CAB-DR";
  }
  return "?";
}

std::optional<double> WeightScheme::param() const {
  switch (kind) {
    case SchemeKind::kDirect:
    case SchemeKind::kIps:
    case SchemeKind::kDoublyRobust:
      return std::nullopt;
    case SchemeKind::kStaticBlend:
      return blend;
    default:
      return clip;
  }
}

double clipped_ratio(double clip, double logging_prob, double target_prob) {
  if (target_prob <= 0.0) return 1.0;
  if (logging_prob <= 0.0) return 0.0;
  const double r = clip * (logging_prob / target_prob);
  return r < 1.0 ? r : 1.0;
}

WeightTriplet scheme_weights(const WeightScheme& scheme, double target_prob,
                             double logging_prob) {
  switch (scheme.kind) {
    case SchemeKind::kDirect:
      return {1.0, 0.0, 0.0};
    case SchemeKind::kIps:
      return {0.0, 1.0, 0.0};
    case SchemeKind::kClippedIps:
      return {0.0, clipped_ratio(scheme.clip, logging_prob, target_prob), 0.0};
    case SchemeKind::kDoublyRobust:
      return {1.0, 1.0, -1.0};
    case SchemeKind::kStaticBlend:
      return {1.0 - scheme.blend, scheme.blend, 0.0};
    case SchemeKind::kSwitch: {
      double ratio;
      if (target_prob <= 0.0) {
        ratio = 0.0;
      } else if (logging_prob <= 0.0) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        ratio = target_prob / logging_prob;
      }
      // The boundary ratio == clip belongs to the inverse-propensity side.
      const bool use_model = ratio > scheme.clip;
      return {use_model ? 1.0 : 0.0, use_model ? 0.0 : 1.0, 0.0};
    }
    case SchemeKind::kCab: {
      const double m = clipped_ratio(scheme.clip, logging_prob, target_prob);
      return {1.0 - m, m, 0.0};
    }
    case SchemeKind::kCabDr: {
      const double m = clipped_ratio(scheme.clip, logging_prob, target_prob);
      return {1.0, m, -m};
    }
  }
  throw InvalidScheme("unhandled scheme kind");
}

}  // namespace iceval
