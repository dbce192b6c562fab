#include "pot/vvmt.hpp"

#include <cmath>
#include <limits>

#include "pot/error.hpp"

namespace pot {

std::string_view to_string(VvmtForm form) {
  switch (form) {
    case VvmtForm::kVanillaLinear: return "vanilla_linear";
    case VvmtForm::kVanillaLogistic: return "vanilla_logistic";
    case VvmtForm::kResilientLinear: return "resilient_linear";
    case VvmtForm::kResilientLogistic: return "resilient_logistic";
  }
  return "unknown";
}

VvmtForm vvmt_form_from_string(std::string_view name) {
  for (auto f : {VvmtForm::kVanillaLinear, VvmtForm::kVanillaLogistic, VvmtForm::kResilientLinear,
                 VvmtForm::kResilientLogistic}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown VVMT form '" + std::string(name) + "'");
}

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::kEuclidean ? "euclidean" : "path_cumulative";
}

DistanceKind distance_kind_from_string(std::string_view name) {
  if (name == "euclidean") return DistanceKind::kEuclidean;
  if (name == "path_cumulative") return DistanceKind::kPathCumulative;
  throw Error(ErrorCode::kInvalidArgument, "unknown distance metric '" + std::string(name) + "'");
}

void VvmtParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); };
  if (!(big_m > 0.0)) fail("vvmt.big_m must be > 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("vvmt.alpha must be in [0, 1]");
  if (n_max < 1) fail("vvmt.n_max must be >= 1");
  if (!(k > 0.0)) fail("vvmt.k must be > 0");
  if (!(gamma >= 0.0)) fail("vvmt.gamma must be >= 0");
  if (!std::isfinite(m_mid)) fail("vvmt.m_mid must be finite");
}

double distance(const LocationSignature& a, const LocationSignature& b, DistanceMetric metric,
                const RsuRegistry* registry) {
  if (metric.kind == DistanceKind::kEuclidean) {
    if (!a.rsu_position || !b.rsu_position) {
      throw Error(ErrorCode::kMissingPosition, "signature carries no rsu_position");
    }
    return meters_to_miles(distance_m(*a.rsu_position, *b.rsu_position));
  }
  const RsuInfo* ia = registry ? registry->find(a.rsu_public_key) : nullptr;
  const RsuInfo* ib = registry ? registry->find(b.rsu_public_key) : nullptr;
  if (!ia || !ib) throw Error(ErrorCode::kMissingPosition, "no milepost for issuing RSU");
  return meters_to_miles(std::abs(ia->milepost_m - ib->milepost_m));
}

double total_distance(const ProofChain& chain, DistanceMetric metric, bool bridge_gaps,
                      const RsuRegistry* registry) {
  double sum = 0.0;
  const LocationSignature* prev = nullptr;
  bool gap_since_prev = false;
  for (const auto& entry : chain.entries) {
    const auto* sig = std::get_if<LocationSignature>(&entry);
    if (!sig) {
      gap_since_prev = true;
      continue;
    }
    if (prev && (bridge_gaps || !gap_since_prev)) sum += distance(*prev, *sig, metric, registry);
    prev = sig;
    gap_since_prev = false;
  }
  return sum;
}

double linear_score(double miles, double gamma) { return gamma * miles; }

double logistic_score(double miles, double big_m, double k, double m_mid) {
  double s = big_m / (1.0 + std::exp(-k * (miles - m_mid)));
  if (s >= big_m) return std::nextafter(big_m, 0.0);
  if (s <= 0.0) return std::numeric_limits<double>::denorm_min();
  return s;
}

namespace {

bool is_logistic(VvmtForm f) {
  return f == VvmtForm::kVanillaLogistic || f == VvmtForm::kResilientLogistic;
}

double distance_term(double miles, const VvmtParams& p) {
  return is_logistic(p.form) ? logistic_score(miles, p.big_m, p.k, p.m_mid)
                             : linear_score(miles, p.gamma);
}

Reputation make(const ProofChain& chain, double miles, double score) {
  return {score, chain.signature_count(), miles};
}

}  // namespace

double score_from_distance(double miles, std::size_t n_collected, const VvmtParams& params) {
  if (params.form == VvmtForm::kVanillaLinear || params.form == VvmtForm::kVanillaLogistic) {
    return distance_term(miles, params);
  }
  if (n_collected > params.n_max) {
    throw Error(ErrorCode::kInvalidCount, "n_collected " + std::to_string(n_collected) +
                                              " exceeds n_max " + std::to_string(params.n_max));
  }
  double fraction = static_cast<double>(n_collected) / static_cast<double>(params.n_max);
  return params.alpha * distance_term(miles, params) + (1.0 - params.alpha) * fraction * params.big_m;
}

Reputation vanilla_linear(const ProofChain& chain, const VvmtParams& params, DistanceMetric metric,
                          const RsuRegistry* registry) {
  double miles = total_distance(chain, metric, params.bridge_gaps, registry);
  return make(chain, miles, linear_score(miles, params.gamma));
}

Reputation vanilla_logistic(const ProofChain& chain, const VvmtParams& params,
                            DistanceMetric metric, const RsuRegistry* registry) {
  double miles = total_distance(chain, metric, params.bridge_gaps, registry);
  return make(chain, miles, logistic_score(miles, params.big_m, params.k, params.m_mid));
}

Reputation resilient(const ProofChain& chain, const VvmtParams& params, DistanceMetric metric,
                     std::size_t n_collected, const RsuRegistry* registry) {
  VvmtParams p = params;
  if (p.form == VvmtForm::kVanillaLinear) p.form = VvmtForm::kResilientLinear;
  if (p.form == VvmtForm::kVanillaLogistic) p.form = VvmtForm::kResilientLogistic;
  double miles = total_distance(chain, metric, params.bridge_gaps, registry);
  return make(chain, miles, score_from_distance(miles, n_collected, p));
}

Reputation reputation_of(const ProofChain& chain, const VerificationReport& report,
                         const VvmtParams& params, DistanceMetric metric,
                         const RsuRegistry& registry) {
  if (!report.accepted) throw Error(ErrorCode::kUnverifiedChain, "chain was not accepted");
  switch (params.form) {
    case VvmtForm::kVanillaLinear: return vanilla_linear(chain, params, metric, &registry);
    case VvmtForm::kVanillaLogistic: return vanilla_logistic(chain, params, metric, &registry);
    case VvmtForm::kResilientLinear:
    case VvmtForm::kResilientLogistic:
      return resilient(chain, params, metric, report.valid_count, &registry);
  }
  return {};
}

}  // namespace pot
