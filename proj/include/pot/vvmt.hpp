#pragma once

// Verifiable vehicle miles traveled: reputation scores computed from a
// verified proof chain. Distances are in miles.

#include <cstddef>
#include <string_view>

#include "pot/proof_chain.hpp"

namespace pot {

enum class VvmtForm {
  kVanillaLinear,
  kVanillaLogistic,
  kResilientLinear,
  kResilientLogistic,
};

std::string_view to_string(VvmtForm form);
VvmtForm vvmt_form_from_string(std::string_view name);

struct VvmtParams {
  VvmtForm form = VvmtForm::kVanillaLinear;
  double gamma = 1.0;       // reputation per mile (linear forms)
  double big_m = 500.0;     // maximum reputation
  double k = 0.025;         // logistic steepness per mile
  double m_mid = 200.0;     // logistic midpoint, miles
  double alpha = 0.5;       // weight of the distance term in resilient forms
  std::size_t n_max = 75;   // RSU count on the segment
  /// When set, a gap contributes the distance between the retained
  /// signatures on either side of it. Otherwise those segments are dropped.
  bool bridge_gaps = true;

  void validate() const;
};

enum class DistanceKind {
  kEuclidean,
  /// |milepost(a) - milepost(b)| from the registry.
  kPathCumulative,
};

std::string_view to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(std::string_view name);

struct DistanceMetric {
  DistanceKind kind = DistanceKind::kEuclidean;
};

struct Reputation {
  double score = 0.0;
  std::size_t chain_length = 0;
  double total_distance = 0.0;  // miles
};

/// Miles between the RSUs that issued `a` and `b`. Throws MissingPosition when
/// a position (or, for path distance, a registry entry) is unavailable.
double distance(const LocationSignature& a, const LocationSignature& b, DistanceMetric metric,
                const RsuRegistry* registry = nullptr);

/// Sum of distances between consecutive retained signatures.
double total_distance(const ProofChain& chain, DistanceMetric metric, bool bridge_gaps,
                      const RsuRegistry* registry = nullptr);

double linear_score(double miles, double gamma);
/// M / (1 + exp(-k (miles - m))), kept inside the open interval (0, M) even
/// where double rounding would land on an endpoint.
double logistic_score(double miles, double big_m, double k, double m_mid);

/// The score params.form assigns to `miles` of travel over `n_collected`
/// signatures. Throws InvalidCount for resilient forms when n_collected > n_max.
double score_from_distance(double miles, std::size_t n_collected, const VvmtParams& params);

Reputation vanilla_linear(const ProofChain& chain, const VvmtParams& params, DistanceMetric metric,
                          const RsuRegistry* registry = nullptr);
Reputation vanilla_logistic(const ProofChain& chain, const VvmtParams& params,
                            DistanceMetric metric, const RsuRegistry* registry = nullptr);
/// alpha * (linear or logistic term per params.form) + (1 - alpha) * n/n_max * M.
/// Throws InvalidCount when n_collected > n_max.
Reputation resilient(const ProofChain& chain, const VvmtParams& params, DistanceMetric metric,
                     std::size_t n_collected, const RsuRegistry* registry = nullptr);

/// Dispatches on params.form with n_collected = report.valid_count. Throws
/// UnverifiedChain unless `report` accepted the chain.
Reputation reputation_of(const ProofChain& chain, const VerificationReport& report,
                         const VvmtParams& params, DistanceMetric metric,
                         const RsuRegistry& registry);

}  // namespace pot
