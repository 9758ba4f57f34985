#include "dterm/sim.hpp"

#include <algorithm>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>

#include "dterm/basic.hpp"

namespace dterm {

bool RunReport::all_terminated() const {
  return !termination.empty() &&
         std::all_of(termination.begin(), termination.end(), [](const auto& t) { return t.has_value(); });
}

std::optional<Iteration> RunReport::common_termination() const {
  if (!all_terminated()) return std::nullopt;
  Iteration first = *termination.front();
  for (const auto& t : termination) {
    if (*t != first) return std::nullopt;
  }
  return first;
}

bool RunReport::any_early_termination() const {
  for (const auto& t : termination) {
    if (t && (!global_satisfied || *t < *global_satisfied)) return true;
  }
  return false;
}

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  threads = std::min(threads, count);
  const std::size_t chunk = (count + threads - 1) / threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct StepResult {
  bool terminate = false;
  std::size_t clamped = 0;
  std::vector<FaultReport> reports;
};

struct BasicProtocol {
  using State = BasicTermState;
  using Message = BasicMessage;

  BasicOptions options;

  State init(std::size_t n) const { return init_basic(n); }
  static const StatusBits& bits(const State& s) { return s.v; }
  Message message(AgentId i, const State& s, Iteration t) const { return make_message(i, s, t); }

  void corrupt(Message& msg, const Message& /*last_sent*/, std::span<const AgentId> subjects,
               Iteration /*t*/) const {
    for (AgentId k : subjects) msg.v[k] = 1;
  }

  State step(AgentId i, const State& s, bool b, std::span<const Message> inbox,
             std::span<const AgentId> nbrs, Iteration t, std::size_t d, StepResult& res,
             FaultDetector*) const {
    auto out = step_basic(i, s, b, inbox, nbrs, t, d, options);
    res.terminate = out.terminate;
    return std::move(out.state);
  }

  static void fill_trace(TraceRecord&, const State&, Iteration) {}
};

struct FtProtocol {
  using State = FtTermState;
  using Message = FtMessage;

  FtOptions options;

  State init(std::size_t n) const { return init_ft(n); }
  static const StatusBits& bits(const State& s) { return s.v_now; }
  Message message(AgentId i, const State& s, Iteration t) const { return make_message(i, s, t); }

  void corrupt(Message& msg, const Message& last_sent, std::span<const AgentId> subjects,
               Iteration t) const {
    for (AgentId k : subjects) {
      msg.u[k] = last_sent.v[k] ? last_sent.u[k] : t;
      msg.v[k] = 1;
    }
    msg.t_scalar = *std::max_element(msg.u.begin(), msg.u.end());
  }

  State step(AgentId i, const State& s, bool b, std::span<const Message> inbox,
             std::span<const AgentId> nbrs, Iteration t, std::size_t d, StepResult& res,
             FaultDetector* detector) const {
    res.reports = detector->observe(i, s, inbox, t);
    auto out = step_ft(i, s, b, inbox, nbrs, t, d, options);
    res.terminate = out.terminate;
    res.clamped = out.clamped_corrections;
    return std::move(out.state);
  }

  static void fill_trace(TraceRecord& rec, const State& s, Iteration t) {
    rec.u = s.u;
    rec.c = correction_countdown(s, t);
  }
};

struct AdmmRuntime {
  AdmmSystem system;
  bool latch;
  std::vector<AdmmAgentState> states;
  std::vector<std::deque<std::pair<Iteration, Eigen::VectorXd>>> history;
  std::size_t window;
};

template <class Protocol>
RunReport run_impl(const Scenario& sc, const Protocol& proto, const RunOptions& opts) {
  using State = typename Protocol::State;
  using Message = typename Protocol::Message;

  const CommGraph& g = sc.graph;
  const std::size_t n = g.agent_count();
  const std::size_t d = g.diameter();

  RunReport rep;
  rep.method = sc.method;
  rep.agent_count = n;
  rep.diameter = d;
  rep.termination.assign(n, std::nullopt);
  rep.faulty_agents = sc.faulty_agents();
  rep.computation_rounds.assign(n, 0);
  rep.skipped_after_global.assign(n, 0);

  std::vector<std::vector<std::pair<const FaultScript*, std::vector<AgentId>>>> scripts(n);
  for (const auto& f : sc.faults) scripts[f.faulty_agent].emplace_back(&f, f.resolved_subjects(n));

  std::vector<State> states(n, proto.init(n));
  std::vector<Message> outbox;
  outbox.reserve(n);
  for (AgentId i = 0; i < n; ++i) outbox.push_back(proto.message(i, states[i], 0));
  std::vector<Message> last_sent = outbox;
  std::vector<FaultDetector> detectors;
  for (AgentId i = 0; i < n; ++i) detectors.emplace_back(g.neighbors(i).size());

  const Schedule* schedule = std::get_if<Schedule>(&sc.criterion);
  std::optional<AdmmRuntime> admm;
  if (const auto* crit = std::get_if<AdmmCriterion>(&sc.criterion)) {
    AdmmSystem system(crit->problem, g);
    auto init = system.initial_states();
    admm.emplace(AdmmRuntime{std::move(system), crit->latch, std::move(init), {}, 2 * d + n + 2});
    admm->history.resize(n);
  }

  TraceRecorder recorder(opts.record_trace ? sc.trace_memory_cap : 0, opts.trace_spill,
                         opts.trace_format);

  StatusBits bits_prev(n, 0);
  std::vector<StatusBits> computed_rows;
  std::vector<std::size_t> single_run(n * n, 0);
  std::vector<std::size_t> global_run(n, 0);
  std::vector<StepResult> results(n);
  std::vector<State> next_states(n);
  std::vector<std::vector<Message>> inboxes(n);

  for (Iteration t = 1; t <= sc.max_iterations; ++t) {
    if (std::all_of(rep.termination.begin(), rep.termination.end(),
                    [](const auto& x) { return x.has_value(); })) {
      break;
    }
    rep.iterations_run = t;
    std::vector<std::uint8_t> running(n), computing(n);
    for (AgentId i = 0; i < n; ++i) {
      running[i] = !rep.termination[i].has_value();
      computing[i] =
          running[i] && !(sc.flags.reduced_computation && all_set(Protocol::bits(states[i])));
      rep.computation_rounds[i] += computing[i];
    }
    computed_rows.push_back(computing);

    // 1. Local criteria.
    StatusBits bits(n, 0);
    if (schedule) {
      for (AgentId i = 0; i < n; ++i) bits[i] = running[i] ? schedule_bit(*schedule, i, t) : bits_prev[i];
    } else {
      auto mismatch = admm->system.step(admm->states, computing);
      for (AgentId i = 0; i < n; ++i) {
        bits[i] = computing[i] ? admm_criterion(mismatch[i], admm->system.problem().tolerance,
                                                admm->latch, bits_prev[i])
                               : bits_prev[i];
        auto& h = admm->history[i];
        h.emplace_back(t, admm->states[i].x);
        if (h.size() > admm->window) h.pop_front();
      }
    }

    // 2. Inboxes: neighbor messages from t - 1. Terminated neighbors keep serving
    // their final message.
    for (AgentId i = 0; i < n; ++i) {
      if (!running[i]) continue;
      auto nbrs = g.neighbors(i);
      auto& inbox = inboxes[i];
      inbox.clear();
      for (AgentId j : nbrs) {
        inbox.push_back(outbox[j]);
        if (!running[j]) {
          inbox.back().stamped = t - 1;
          ++rep.post_termination_reads;
        }
      }
    }

    // 3. Protocol step; each agent only touches its own slots.
    parallel_for(n, sc.threads, [&](std::size_t i) {
      if (!running[i]) return;
      results[i] = StepResult{};
      next_states[i] = proto.step(i, states[i], bits[i], inboxes[i], g.neighbors(i), t, d,
                                  results[i], &detectors[i]);
    });

    for (AgentId i = 0; i < n; ++i) {
      if (!running[i]) continue;
      states[i] = std::move(next_states[i]);
      if (results[i].terminate) rep.termination[i] = t;
      rep.clamped_corrections += results[i].clamped;
      rep.fault_reports.insert(rep.fault_reports.end(), results[i].reports.begin(),
                               results[i].reports.end());
      if (opts.record_trace) {
        TraceRecord rec;
        rec.iteration = t;
        rec.agent = i;
        rec.b = bits[i];
        rec.computed = computing[i];
        rec.v = Protocol::bits(states[i]);
        rec.t_scalar = states[i].t_scalar;
        Protocol::fill_trace(rec, states[i], t);
        rec.terminated = results[i].terminate;
        rec.reports = std::move(results[i].reports);
        recorder.add(std::move(rec));
      }
    }

    // 4. Outboxes for t + 1, with fault scripts rewriting what faulty agents send.
    for (AgentId i = 0; i < n; ++i) {
      if (!running[i]) continue;
      Message msg = proto.message(i, states[i], t);
      for (const auto& [script, subjects] : scripts[i]) {
        if (script->active_at(t)) proto.corrupt(msg, last_sent[i], subjects, t);
      }
      last_sent[i] = msg;
      outbox[i] = std::move(msg);
    }

    // Per-iteration metrics.
    IterationCounts counts{t, count_set(bits), 0, 0};
    const bool global_now = all_set(bits);
    for (AgentId i = 0; i < n; ++i) {
      const auto& v = Protocol::bits(states[i]);
      const bool full = all_set(v);
      counts.full_vector += full;
      counts.terminated += rep.termination[i].has_value();
      if (rep.faulty_agents.count(i)) continue;
      for (AgentId k = 0; k < n; ++k) {
        auto& run = single_run[i * n + k];
        run = (v[k] && !bits[k]) ? run + 1 : 0;
        rep.max_single_persistence = std::max(rep.max_single_persistence, run);
      }
      global_run[i] = (full && !global_now) ? global_run[i] + 1 : 0;
      rep.max_global_persistence = std::max(rep.max_global_persistence, global_run[i]);
    }
    rep.series.push_back(counts);
    rep.bits.push_back(bits);
    bits_prev = std::move(bits);
  }

  rep.global_satisfied = global_criterion_oracle(rep.bits);
  if (rep.global_satisfied) {
    const Iteration tg = *rep.global_satisfied;
    for (AgentId i = 0; i < n; ++i) {
      if (!rep.termination[i]) continue;
      for (Iteration t = tg + 1; t <= *rep.termination[i]; ++t) {
        rep.skipped_after_global[i] += !computed_rows[static_cast<std::size_t>(t - 1)][i];
      }
    }
  }

  if (admm) {
    for (AgentId i = 0; i < n; ++i) {
      const auto& h = admm->history[i];
      rep.final_iterate.push_back(admm->states[i].x);
      if (h.empty()) {
        rep.solution.push_back(admm->states[i].x);
        continue;
      }
      const Iteration want = states[i].t_scalar;
      auto it = std::find_if(h.begin(), h.end(), [want](const auto& e) { return e.first == want; });
      rep.solution.push_back(it != h.end() ? it->second : h.back().second);
    }
  }

  recorder.flush();
  rep.trace = recorder.records();
  rep.trace_complete = opts.record_trace && recorder.complete();
  return rep;
}

}  // namespace

RunReport run(const Scenario& scenario, const RunOptions& options) {
  validate(scenario);
  if (scenario.method == Method::basic) {
    BasicProtocol proto{BasicOptions{scenario.flags.strict_verbatim_t}};
    return run_impl(scenario, proto, options);
  }
  FtProtocol proto{FtOptions{scenario.flags.prose_correction_constant ? 1 : 2}};
  return run_impl(scenario, proto, options);
}

}  // namespace dterm
