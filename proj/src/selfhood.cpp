#include "aif/selfhood.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aif {

EvidenceWindow::EvidenceWindow(int capacity, double threshold)
    : capacity_(capacity), threshold_(threshold) {
  if (capacity < 1)
    throw std::invalid_argument("EvidenceWindow: capacity must be >= 1");
}

void EvidenceWindow::push(double vfe_value) {
  if (!std::isfinite(vfe_value))
    throw std::invalid_argument("EvidenceWindow: non-finite evidence value");
  values_.push_back(vfe_value);
  while (values_.size() > static_cast<size_t>(capacity_)) values_.pop_front();
}

double EvidenceWindow::mean() const {
  if (values_.empty())
    throw std::logic_error("EvidenceWindow: empty window");
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

EvidenceWindow::Verdict EvidenceWindow::classify() const {
  const double m = mean();
  return {m < threshold_, m};
}

double calibrate_threshold(std::span<const double> self_evidence,
                           std::span<const double> other_evidence) {
  if (self_evidence.empty() || other_evidence.empty())
    throw std::invalid_argument("calibrate_threshold: empty calibration set");
  const auto mean = [](std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
  };
  return 0.5 * (mean(self_evidence) + mean(other_evidence));
}

}  // namespace aif
