#include "prodg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "prodg/error.hpp"

namespace prodg {

void MetricConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("epsilon must be positive");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw Error("alpha and beta must be non-negative");
  if (!(alpha + beta > 0.0)) throw Error("alpha + beta must be positive");
  if (histogram_bins < 2) throw Error("histogram_bins must be at least 2");
}

nlohmann::json MetricConfig::to_json() const {
  return {{"epsilon", epsilon}, {"alpha", alpha}, {"beta", beta},
          {"histogram_bins", histogram_bins}};
}

MetricConfig MetricConfig::from_json(const nlohmann::json& j) {
  MetricConfig c;
  try {
    c.epsilon = j.value("epsilon", c.epsilon);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed metric config: ") + e.what());
  }
  c.validate();
  return c;
}

double structural_complexity(const RegionMatrix& a, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  return complexity(singular_values(a), epsilon).value();
}

double svd_distance(const RegionMatrix& a, const RegionMatrix& b, double epsilon) {
  return std::abs(structural_complexity(a, epsilon) - structural_complexity(b, epsilon));
}

std::vector<std::uint64_t> intensity_histogram(const RegionMatrix& a, int bins) {
  if (bins < 2) throw Error("histogram needs at least 2 bins");
  std::vector<std::uint64_t> h(static_cast<std::size_t>(bins), 0);
  for (double v : a.values) {
    const int b = static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * bins));
    ++h[static_cast<std::size_t>(std::min(b, bins - 1))];
  }
  return h;
}

double hellinger_from_counts(const std::vector<std::uint64_t>& a, std::uint64_t total_a,
                             const std::vector<std::uint64_t>& b, std::uint64_t total_b) {
  if (a.size() != b.size()) throw Error("histograms differ in bin count");
  if (total_a == 0 || total_b == 0) throw Error("empty histogram");
  // integer products keep identical histograms at exactly zero distance
  double bc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    bc += std::sqrt(static_cast<double>(a[i]) * static_cast<double>(b[i]));
  bc /= std::sqrt(static_cast<double>(total_a) * static_cast<double>(total_b));
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

double hellinger_distance(const RegionMatrix& a, const RegionMatrix& b, int bins) {
  return hellinger_from_counts(intensity_histogram(a, bins), a.size(),
                               intensity_histogram(b, bins), b.size());
}

RegionSignature region_signature(const RegionMatrix& a, const MetricConfig& cfg) {
  return {structural_complexity(a, cfg.epsilon), intensity_histogram(a, cfg.histogram_bins),
          static_cast<std::uint64_t>(a.size())};
}

DistanceBreakdown signature_distance(const RegionSignature& a, const RegionSignature& b,
                                     const MetricConfig& cfg) {
  DistanceBreakdown d;
  d.svd = std::abs(a.complexity - b.complexity);
  d.hellinger = hellinger_from_counts(a.histogram, a.pixel_count, b.histogram, b.pixel_count);
  d.combined = cfg.alpha * d.svd + cfg.beta * d.hellinger;
  return d;
}

double combined_distance(const RegionMatrix& a, const RegionMatrix& b, const MetricConfig& cfg) {
  cfg.validate();
  return signature_distance(region_signature(a, cfg), region_signature(b, cfg), cfg).combined;
}

}  // namespace prodg
