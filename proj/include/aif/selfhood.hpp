// Model-evidence self-recognition: the windowed free energy bounds how well
// the observation stream fits the internal model, so a low windowed mean
// marks the stream as self-generated.
#ifndef AIF_SELFHOOD_HPP
#define AIF_SELFHOOD_HPP

#include <deque>
#include <span>

#include "aif/free_energy.hpp"

namespace aif {

class EvidenceWindow {
 public:
  explicit EvidenceWindow(int capacity = 50,
                          double threshold = std::numeric_limits<double>::infinity());

  // Pushes a free-energy value; evicts the oldest beyond capacity.
  void push(double vfe_value);
  void push(const FreeEnergyReport& report) { push(report.value); }

  struct Verdict {
    bool is_self;
    double mean_evidence;
  };
  // is_self = (mean of stored values < threshold). Throws std::logic_error
  // on an empty window.
  Verdict classify() const;

  double mean() const;
  size_t size() const { return values_.size(); }
  int capacity() const { return capacity_; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }

 private:
  int capacity_;
  double threshold_;
  std::deque<double> values_;
};

// Midpoint between the average windowed evidence of self- and
// other-labeled calibration runs.
double calibrate_threshold(std::span<const double> self_evidence,
                           std::span<const double> other_evidence);

}  // namespace aif

#endif  // AIF_SELFHOOD_HPP
