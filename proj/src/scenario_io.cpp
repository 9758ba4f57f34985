#include "dterm/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace dterm {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg,
                         const std::string& assumption = "") const {
    std::string where = origin_;
    if (at.IsDefined() && !at.Mark().is_null()) where += ":" + std::to_string(at.Mark().line + 1);
    throw ValidationError(assumption, where + ": " + msg);
  }

  void keys(const YAML::Node& map, std::initializer_list<const char*> allowed) const {
    if (!map.IsMap()) fail(map, "expected a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(kv.first, "unknown field '" + key + "'");
    }
  }

  YAML::Node need(const YAML::Node& map, const char* key) const {
    auto n = map[key];
    if (!n) fail(map, std::string("missing field '") + key + "'");
    return n;
  }

  template <class T>
  T as(const YAML::Node& n, const char* what) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("bad value for ") + what);
    }
  }

  template <class T>
  T get(const YAML::Node& map, const char* key, T fallback) const {
    auto n = map[key];
    return n ? as<T>(n, key) : fallback;
  }

  std::size_t index(const YAML::Node& n, const char* what) const {
    auto v = as<long long>(n, what);
    if (v < 0) fail(n, std::string(what) + " must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::vector<AgentId> ids(const YAML::Node& n, const char* what) const {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list");
    std::vector<AgentId> out;
    for (const auto& e : n) out.push_back(index(e, what));
    return out;
  }

 private:
  std::string origin_;
};

CommGraph read_graph(const Reader& r, const YAML::Node& node, std::uint64_t seed) {
  try {
    if (node["topology"]) {
      r.keys(node, {"topology"});
      auto t = node["topology"];
      r.keys(t, {"kind", "n", "seed", "edge_prob", "diameter", "edge_count"});
      TopologySpec spec;
      spec.kind = r.as<std::string>(r.need(t, "kind"), "kind");
      spec.n = r.index(r.need(t, "n"), "n");
      spec.seed = r.get<std::uint64_t>(t, "seed", seed);
      spec.edge_prob = r.get<double>(t, "edge_prob", 0.2);
      spec.diameter = r.get<std::size_t>(t, "diameter", 0);
      spec.edge_count = r.get<std::size_t>(t, "edge_count", 0);
      try {
        return make_topology(spec);
      } catch (const ContractError& e) {
        r.fail(t, e.what());
      }
    }
    r.keys(node, {"agent_count", "edges"});
    const std::size_t n = r.index(r.need(node, "agent_count"), "agent_count");
    std::vector<Edge> edges;
    if (auto es = node["edges"]) {
      if (!es.IsSequence()) r.fail(es, "edges must be a list of pairs");
      for (const auto& e : es) {
        if (!e.IsSequence() || e.size() != 2) r.fail(e, "edge must be a pair [i, j]");
        edges.emplace_back(r.index(e[0], "edge endpoint"), r.index(e[1], "edge endpoint"));
      }
    }
    return CommGraph(n, std::move(edges));
  } catch (const ValidationError& e) {
    if (!e.assumption().empty()) r.fail(node, std::string(e.what()).substr(e.assumption().size() + 2), e.assumption());
    throw;
  } catch (const ContractError& e) {
    r.fail(node, e.what());
  }
}

Schedule read_schedule(const Reader& r, const YAML::Node& node) {
  r.keys(node, {"satisfy_at", "overrides"});
  Schedule s;
  auto sat = r.need(node, "satisfy_at");
  if (!sat.IsSequence()) r.fail(sat, "satisfy_at must be a list");
  for (const auto& e : sat) {
    if (e.IsNull()) s.satisfy_at.emplace_back(std::nullopt);
    else s.satisfy_at.emplace_back(r.as<Iteration>(e, "satisfy_at"));
  }
  if (auto ov = node["overrides"]) {
    if (!ov.IsSequence()) r.fail(ov, "overrides must be a list");
    for (const auto& e : ov) {
      if (!e.IsSequence() || e.size() != 3) r.fail(e, "override must be [agent, iteration, bit]");
      s.overrides.push_back({r.index(e[0], "override agent"), r.as<Iteration>(e[1], "override iteration"),
                             r.as<int>(e[2], "override bit") != 0});
    }
  }
  return s;
}

AdmmCriterion read_admm(const Reader& r, const YAML::Node& node, const CommGraph& g, Method method,
                        std::uint64_t seed) {
  r.keys(node, {"rho", "tolerance", "latch", "agents", "shared", "random"});
  AdmmCriterion crit;
  crit.latch = r.get<bool>(node, "latch", method == Method::basic);
  const double rho = r.get<double>(node, "rho", 1.0);
  const double tol = r.get<double>(node, "tolerance", 1e-2);
  if (auto rnd = node["random"]) {
    r.keys(rnd, {"seed", "private_vars"});
    if (node["agents"] || node["shared"]) r.fail(rnd, "random cannot be combined with agents/shared");
    crit.problem = make_random_consensus(g, r.get<std::uint64_t>(rnd, "seed", seed),
                                         r.get<std::size_t>(rnd, "private_vars", 1), rho, tol);
    return crit;
  }
  crit.problem.rho = rho;
  crit.problem.tolerance = tol;
  auto agents = r.need(node, "agents");
  if (!agents.IsSequence()) r.fail(agents, "agents must be a list");
  for (const auto& a : agents) {
    r.keys(a, {"q", "c"});
    auto q = r.need(a, "q");
    auto c = r.need(a, "c");
    if (!q.IsSequence() || !c.IsSequence()) r.fail(a, "q must be a matrix and c a vector");
    const auto dim = static_cast<Eigen::Index>(c.size());
    QuadraticObjective obj{Eigen::MatrixXd(dim, dim), Eigen::VectorXd(dim)};
    if (static_cast<Eigen::Index>(q.size()) != dim) r.fail(q, "q must be square and match c");
    for (Eigen::Index i = 0; i < dim; ++i) {
      obj.c(i) = r.as<double>(c[i], "c entry");
      auto row = q[i];
      if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != dim) r.fail(row, "q row length must match c");
      for (Eigen::Index j = 0; j < dim; ++j) obj.q(i, j) = r.as<double>(row[j], "q entry");
    }
    crit.problem.agents.push_back(std::move(obj));
  }
  if (auto sh = node["shared"]) {
    if (!sh.IsSequence()) r.fail(sh, "shared must be a list");
    for (const auto& e : sh) {
      if (!e.IsSequence() || e.size() != 4) r.fail(e, "shared entry must be [a, a_index, b, b_index]");
      crit.problem.shared.push_back({r.index(e[0], "agent"), r.index(e[1], "index"), r.index(e[2], "agent"),
                                     r.index(e[3], "index")});
    }
  }
  try {
    AdmmSystem check(crit.problem, g);
  } catch (const std::exception& e) {
    r.fail(node, e.what());
  }
  return crit;
}

FaultScript read_fault(const Reader& r, const YAML::Node& node) {
  r.keys(node, {"agent", "subjects", "active", "periodic"});
  FaultScript f;
  f.faulty_agent = r.index(r.need(node, "agent"), "agent");
  if (auto s = node["subjects"]) f.subjects = r.ids(s, "subjects");
  if (auto p = node["periodic"]) {
    r.keys(p, {"start", "period", "length", "until"});
    try {
      auto g = FaultScript::periodic(f.faulty_agent, r.as<Iteration>(r.need(p, "start"), "start"),
                                     r.as<Iteration>(r.need(p, "period"), "period"),
                                     r.as<Iteration>(r.need(p, "length"), "length"),
                                     r.as<Iteration>(r.need(p, "until"), "until"));
      f.active = g.active;
    } catch (const ContractError& e) {
      r.fail(p, e.what());
    }
  }
  if (auto a = node["active"]) {
    if (!a.IsSequence()) r.fail(a, "active must be a list of [begin, end) pairs");
    for (const auto& e : a) {
      if (!e.IsSequence() || e.size() != 2) r.fail(e, "active range must be [begin, end]");
      Iteration b = r.as<Iteration>(e[0], "range begin"), end = r.as<Iteration>(e[1], "range end");
      if (b < 1 || end <= b) r.fail(e, "active range needs 1 <= begin < end");
      f.active.emplace_back(b, end);
    }
  }
  if (f.active.empty()) r.fail(node, "fault needs 'active' ranges or 'periodic'");
  return f;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin,
                        std::optional<std::uint64_t> seed_override) {
  Reader r(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError("", origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ValidationError("", origin + ": scenario must be a mapping");
  r.keys(root, {"version", "method", "max_iterations", "seed", "threads", "trace_memory_cap", "graph",
                "criterion", "faults", "flags"});
  const int version = r.as<int>(r.need(root, "version"), "version");
  if (version != kScenarioVersion) r.fail(root["version"], "unsupported version " + std::to_string(version));

  Method method;
  try {
    method = method_from_string(r.as<std::string>(r.need(root, "method"), "method"));
  } catch (const ValidationError& e) {
    r.fail(root["method"], e.what());
  }
  const std::uint64_t seed = seed_override.value_or(r.get<std::uint64_t>(root, "seed", 0));
  CommGraph g = read_graph(r, r.need(root, "graph"), seed);

  auto cn = r.need(root, "criterion");
  r.keys(cn, {"schedule", "admm"});
  CriterionSource crit;
  if (cn["schedule"] && cn["admm"]) r.fail(cn, "criterion takes either schedule or admm");
  if (cn["schedule"]) crit = read_schedule(r, cn["schedule"]);
  else if (cn["admm"]) crit = read_admm(r, cn["admm"], g, method, seed);
  else r.fail(cn, "criterion needs schedule or admm");

  Scenario sc(std::move(g), method, std::move(crit));
  sc.seed = seed;
  sc.max_iterations = r.get<Iteration>(root, "max_iterations", 1000);
  sc.threads = r.get<std::size_t>(root, "threads", 1);
  sc.trace_memory_cap = r.get<std::size_t>(root, "trace_memory_cap", sc.trace_memory_cap);
  if (auto fs = root["faults"]) {
    if (!fs.IsSequence()) r.fail(fs, "faults must be a list");
    for (const auto& f : fs) sc.faults.push_back(read_fault(r, f));
  }
  if (auto fl = root["flags"]) {
    r.keys(fl, {"reduced_computation", "strict_verbatim_t", "prose_correction_constant"});
    sc.flags.reduced_computation = r.get<bool>(fl, "reduced_computation", false);
    sc.flags.strict_verbatim_t = r.get<bool>(fl, "strict_verbatim_t", false);
    sc.flags.prose_correction_constant = r.get<bool>(fl, "prose_correction_constant", false);
  }
  try {
    validate(sc);
  } catch (const ValidationError& e) {
    throw ValidationError(e.assumption(),
                          origin + ": " + (e.assumption().empty()
                                               ? std::string(e.what())
                                               : std::string(e.what()).substr(e.assumption().size() + 2)));
  }
  return sc;
}

Scenario load_scenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path, seed_override);
}

namespace {

void emit_graph(YAML::Emitter& out, const CommGraph& g) {
  out << YAML::BeginMap << YAML::Key << "agent_count" << YAML::Value << g.agent_count();
  out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const auto& [a, b] : g.edges()) out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
  out << YAML::EndSeq << YAML::EndMap;
}

}  // namespace

std::string dump_graph(const CommGraph& g) {
  YAML::Emitter out;
  emit_graph(out, g);
  return std::string(out.c_str()) + "\n";
}

std::string dump_scenario(const Scenario& sc) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << kScenarioVersion;
  out << YAML::Key << "method" << YAML::Value << to_string(sc.method);
  out << YAML::Key << "max_iterations" << YAML::Value << sc.max_iterations;
  out << YAML::Key << "seed" << YAML::Value << sc.seed;
  out << YAML::Key << "threads" << YAML::Value << sc.threads;
  out << YAML::Key << "graph" << YAML::Value;
  emit_graph(out, sc.graph);

  out << YAML::Key << "criterion" << YAML::Value << YAML::BeginMap;
  if (const auto* s = std::get_if<Schedule>(&sc.criterion)) {
    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "satisfy_at" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& t : s->satisfy_at) {
      if (t) out << *t;
      else out << YAML::Null;
    }
    out << YAML::EndSeq;
    if (!s->overrides.empty()) {
      out << YAML::Key << "overrides" << YAML::Value << YAML::BeginSeq;
      for (const auto& o : s->overrides) {
        out << YAML::Flow << YAML::BeginSeq << o.agent << o.iteration << int(o.bit) << YAML::EndSeq;
      }
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
  } else {
    const auto& a = std::get<AdmmCriterion>(sc.criterion);
    out << YAML::Key << "admm" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rho" << YAML::Value << a.problem.rho;
    out << YAML::Key << "tolerance" << YAML::Value << a.problem.tolerance;
    out << YAML::Key << "latch" << YAML::Value << a.latch;
    out << YAML::Key << "agents" << YAML::Value << YAML::BeginSeq;
    for (const auto& obj : a.problem.agents) {
      out << YAML::BeginMap << YAML::Key << "q" << YAML::Value << YAML::BeginSeq;
      for (Eigen::Index i = 0; i < obj.q.rows(); ++i) {
        out << YAML::Flow << YAML::BeginSeq;
        for (Eigen::Index j = 0; j < obj.q.cols(); ++j) out << obj.q(i, j);
        out << YAML::EndSeq;
      }
      out << YAML::EndSeq << YAML::Key << "c" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (Eigen::Index i = 0; i < obj.c.size(); ++i) out << obj.c(i);
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::Key << "shared" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : a.problem.shared) {
      out << YAML::Flow << YAML::BeginSeq << s.a << s.a_index << s.b << s.b_index << YAML::EndSeq;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndMap;

  if (!sc.faults.empty()) {
    out << YAML::Key << "faults" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : sc.faults) {
      out << YAML::BeginMap << YAML::Key << "agent" << YAML::Value << f.faulty_agent;
      if (!f.subjects.empty()) {
        out << YAML::Key << "subjects" << YAML::Value << YAML::Flow << f.subjects;
      }
      out << YAML::Key << "active" << YAML::Value << YAML::BeginSeq;
      for (const auto& [b, e] : f.active) out << YAML::Flow << YAML::BeginSeq << b << e << YAML::EndSeq;
      out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "flags" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "reduced_computation" << YAML::Value << sc.flags.reduced_computation;
  out << YAML::Key << "strict_verbatim_t" << YAML::Value << sc.flags.strict_verbatim_t;
  out << YAML::Key << "prose_correction_constant" << YAML::Value << sc.flags.prose_correction_constant;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string report_json(const RunReport& rep, const ValidationReport& val,
                        const std::vector<PropositionCheck>& checks) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["method"] = to_string(rep.method);
  j["agent_count"] = rep.agent_count;
  j["diameter"] = rep.diameter;
  j["iterations_run"] = rep.iterations_run;
  j["global_satisfied"] = rep.global_satisfied ? ordered_json(*rep.global_satisfied) : ordered_json(nullptr);
  auto common = rep.common_termination();
  j["termination"] = common ? ordered_json(*common) : ordered_json(nullptr);
  j["termination_per_agent"] = ordered_json::array();
  for (const auto& t : rep.termination) j["termination_per_agent"].push_back(t ? ordered_json(*t) : ordered_json(nullptr));
  j["faulty_agents"] = rep.faulty_agents;
  j["max_single_persistence"] = rep.max_single_persistence;
  j["max_global_persistence"] = rep.max_global_persistence;
  j["fault_reports"] = ordered_json::array();
  for (const auto& r : rep.fault_reports) {
    j["fault_reports"].push_back(
        {{"accuser", r.accuser}, {"accused", r.accused}, {"subject", r.subject}, {"iteration", r.iteration}});
  }
  j["computation_rounds"] = rep.computation_rounds;
  j["skipped_after_global"] = rep.skipped_after_global;
  if (rep.all_terminated() && rep.global_satisfied) j["savings_fraction"] = savings_fraction(rep);
  j["clamped_corrections"] = rep.clamped_corrections;
  j["post_termination_reads"] = rep.post_termination_reads;
  if (!rep.solution.empty()) {
    j["solution"] = ordered_json::array();
    for (const auto& x : rep.solution) j["solution"].push_back(std::vector<double>(x.data(), x.data() + x.size()));
  }
  j["warnings"] = val.warnings;
  j["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"id", c.id}, {"verdict", to_string(c.verdict)}, {"evidence", c.evidence}});
  }
  return j.dump(2) + "\n";
}

std::string series_csv(const RunReport& rep) {
  std::string s = "iteration,local,full,terminated\n";
  for (const auto& c : rep.series) {
    s += std::to_string(c.iteration) + ',' + std::to_string(c.locally_satisfied) + ',' +
         std::to_string(c.full_vector) + ',' + std::to_string(c.terminated) + '\n';
  }
  return s;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace dterm
