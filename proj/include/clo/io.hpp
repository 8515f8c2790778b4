#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "clo/harness.hpp"

namespace clo {

/// "%.17g"; NaN and missing values print as an empty field.
std::string format_double(double value);

void write_slots_csv(std::ostream& out, const RunMetrics& metrics);
void write_frames_csv(std::ostream& out, const RunMetrics& metrics);
void write_decisions_csv(std::ostream& out, const RunMetrics& metrics);
void write_table_csv(std::ostream& out, const LossTable& table, const std::vector<std::string>& node_ids);
void write_tradeoff_csv(std::ostream& out, std::span<const TradeoffRow> rows,
                        const std::vector<std::string>& node_ids);

/// Rebuilds per-user histories from a frames CSV written by write_frames_csv.
/// Throws std::runtime_error on malformed input.
std::vector<UserHistory> read_frames_csv(std::istream& in);

/// `<scenario>_<policy>_seed<k>`.
std::string run_prefix(const RunMetrics& metrics);

/// Writes the slots, frames and decisions CSVs into `dir`; returns the paths.
std::vector<std::string> write_run(const std::string& dir, const RunMetrics& metrics);

nlohmann::json run_summary(const RunMetrics& metrics, int window);
nlohmann::json batch_summary(const ScenarioConfig& config, std::span<const RunMetrics> runs);

}  // namespace clo
