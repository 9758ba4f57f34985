#include "dterm/trace.hpp"

#include <ostream>
#include <sstream>

#include "json.hpp"

namespace dterm {

namespace {

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(xs[i]);
  }
  return s;
}

std::string reports_field(const std::vector<FaultReport>& reports) {
  std::string s;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(reports[i].accused) + ">" + std::to_string(reports[i].subject);
  }
  return s;
}

}  // namespace

TraceFormat trace_format_from_string(const std::string& s) {
  if (s == "csv") return TraceFormat::csv;
  if (s == "jsonl") return TraceFormat::jsonl;
  throw ContractError("unknown trace format '" + s + "' (expected csv or jsonl)");
}

void write_trace_header(std::ostream& os, TraceFormat fmt) {
  if (fmt == TraceFormat::csv) os << "iteration,agent,b,computed,v,T,u,c,terminated,reports\n";
}

void write_trace_record(std::ostream& os, const TraceRecord& r, TraceFormat fmt) {
  if (fmt == TraceFormat::csv) {
    os << r.iteration << ',' << r.agent << ',' << int(r.b) << ',' << int(r.computed) << ','
       << to_bit_string(r.v) << ',' << r.t_scalar << ',' << join(r.u) << ',' << join(r.c) << ','
       << int(r.terminated) << ',' << reports_field(r.reports) << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["iteration"] = r.iteration;
  j["agent"] = r.agent;
  j["b"] = r.b;
  j["computed"] = r.computed;
  j["v"] = to_bit_string(r.v);
  j["T"] = r.t_scalar;
  j["u"] = r.u;
  j["c"] = r.c;
  j["terminated"] = r.terminated;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& rep : r.reports) {
    j["reports"].push_back({{"accused", rep.accused}, {"subject", rep.subject},
                            {"iteration", rep.iteration}});
  }
  os << j.dump() << '\n';
}

std::string serialize_trace(const std::vector<TraceRecord>& records, TraceFormat fmt) {
  std::ostringstream os;
  write_trace_header(os, fmt);
  for (const auto& r : records) write_trace_record(os, r, fmt);
  return os.str();
}

void TraceRecorder::add(TraceRecord rec) {
  ++total_;
  if (spilled_) {
    write_trace_record(*spill_, rec, fmt_);
    return;
  }
  if (records_.size() < cap_) {
    records_.push_back(std::move(rec));
    return;
  }
  if (!spill_) {
    ++dropped_;
    return;
  }
  flush();
  spilled_ = true;
  write_trace_record(*spill_, rec, fmt_);
}

void TraceRecorder::flush() {
  if (!spill_ || spilled_ || header_written_) return;
  write_trace_header(*spill_, fmt_);
  header_written_ = true;
  for (const auto& r : records_) write_trace_record(*spill_, r, fmt_);
}

}  // namespace dterm
