#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "dterm/ft.hpp"
#include "dterm/types.hpp"

namespace dterm {

/// State of one agent at the end of one iteration.
struct TraceRecord {
  Iteration iteration = 0;
  AgentId agent = 0;
  bool b = false;
  bool computed = false;  // ran the optimisation step this iteration
  StatusBits v;
  Iteration t_scalar = 0;
  std::vector<Iteration> u;  // fault-tolerant method only
  std::vector<Iteration> c;  // countdown form
  bool terminated = false;
  std::vector<FaultReport> reports;
};

enum class TraceFormat { csv, jsonl };

TraceFormat trace_format_from_string(const std::string& s);

void write_trace_header(std::ostream& os, TraceFormat fmt);
void write_trace_record(std::ostream& os, const TraceRecord& rec, TraceFormat fmt);
std::string serialize_trace(const std::vector<TraceRecord>& records, TraceFormat fmt);

/// Keeps records in memory up to `memory_cap`. When the cap is hit and a spill stream
/// is attached, everything retained so far is flushed to it and later records stream
/// straight through; without a spill stream, records beyond the cap are counted and
/// dropped.
class TraceRecorder {
 public:
  explicit TraceRecorder(std::size_t memory_cap = std::numeric_limits<std::size_t>::max(),
                         std::ostream* spill = nullptr, TraceFormat fmt = TraceFormat::csv)
      : cap_(memory_cap), spill_(spill), fmt_(fmt) {}

  void add(TraceRecord rec);

  /// Writes retained records to the spill stream if they have not been written yet.
  void flush();

  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  bool complete() const noexcept { return !spilled_ && dropped_ == 0; }
  std::size_t total() const noexcept { return total_; }

 private:
  std::size_t cap_;
  std::ostream* spill_;
  TraceFormat fmt_;
  std::vector<TraceRecord> records_;
  bool spilled_ = false;
  bool header_written_ = false;
  std::size_t dropped_ = 0;
  std::size_t total_ = 0;
};

}  // namespace dterm
