#ifndef GEMS_REPORT_HPP
#define GEMS_REPORT_HPP

#include <string>

#include "gems/config.hpp"
#include "gems/simulation.hpp"

namespace gems {

// 17-significant-digit decimal, round-trip exact for doubles
std::string format_double(double v);

// Deterministic renderings of a batch: no timestamps, fixed key order,
// config hash + seed carried in a header block.
std::string batch_report_json(const BatchReport& rep,
                              const ExperimentConfig& cfg);
std::string batch_report_csv(const BatchReport& rep,
                             const ExperimentConfig& cfg);

// JSON-lines event log across all trials: iteration, recommendation and
// validation events with their pull counters.
std::string batch_trace_lines(const BatchReport& rep);

}  // namespace gems

#endif
