#include "dterm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dterm/campaign.hpp"
#include "dterm/scenario_io.hpp"
#include "dterm/tight.hpp"

namespace dterm {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  bool verbose = false;
};

std::string resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DTERM_OUTPUT_DIR"); env && *env) return env;
  return "dterm-out";
}

fs::path prepare_dir(const std::string& flag) {
  fs::path dir = resolve_output_dir(flag);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string fmt_iter(const std::optional<Iteration>& t) { return t ? std::to_string(*t) : "none"; }

int cmd_run(const Common& c, const std::string& path, bool reduced, bool strict, bool prose,
            std::optional<std::size_t> threads, std::ostream& out, std::ostream& err) {
  Scenario sc = load_scenario(path, c.seed);
  sc.flags.reduced_computation |= reduced;
  sc.flags.strict_verbatim_t |= strict;
  sc.flags.prose_correction_constant |= prose;
  if (threads) sc.threads = *threads;
  auto val = validate(sc);
  for (const auto& w : val.warnings) err << "warning: " << w << '\n';

  const auto fmt = trace_format_from_string(c.format);
  const fs::path dir = prepare_dir(c.output_dir);
  const fs::path trace_path = dir / (fmt == TraceFormat::csv ? "trace.csv" : "trace.jsonl");
  std::ofstream trace(trace_path, std::ios::binary);
  if (!trace) throw IoError("cannot write " + trace_path.string());

  RunOptions opts;
  opts.trace_spill = &trace;
  opts.trace_format = fmt;
  auto rep = run(sc, opts);
  trace.close();
  if (!trace) throw IoError("write failed for " + trace_path.string());
  auto checks = assert_propositions(rep, sc, val);
  write_file((dir / "report.json").string(), report_json(rep, val, checks));
  write_file((dir / "series.csv").string(), series_csv(rep));

  out << "method " << to_string(sc.method) << ", agents " << rep.agent_count << ", D " << rep.diameter
      << ", T_G " << fmt_iter(rep.global_satisfied) << ", termination "
      << fmt_iter(rep.common_termination()) << '\n';
  if (!rep.faulty_agents.empty()) {
    out << "max single persistence " << rep.max_single_persistence << ", max global persistence "
        << rep.max_global_persistence << ", fault reports " << rep.fault_reports.size() << '\n';
  }
  for (const auto& chk : checks) {
    if (c.verbose || chk.verdict != Verdict::pass) {
      out << chk.id << ": " << to_string(chk.verdict) << " (" << chk.evidence << ")\n";
    }
  }
  if (c.verbose) out << "outputs in " << dir.string() << '\n';

  if (any_failed(checks)) return kExitCheckFailed;
  if (!rep.all_terminated()) return kExitExhausted;
  return kExitOk;
}

int cmd_validate(const Common& c, const std::string& path, std::ostream& out, std::ostream& err) {
  Scenario sc = load_scenario(path, c.seed);
  auto val = validate(sc);
  for (const auto& w : val.warnings) err << "warning: " << w << '\n';
  out << path << ": ok (" << sc.graph.agent_count() << " agents, D " << sc.graph.diameter() << ")\n";
  return kExitOk;
}

std::string campaign_csv(const CampaignSummary& s) {
  std::string csv = "index,seed,agents,diameter,faulty,T_G,termination,max_single,max_global,reports,savings";
  std::vector<std::string> ids;
  for (const auto& [id, t] : s.tally) ids.push_back(id);
  for (const auto& id : ids) csv += "," + id;
  csv += '\n';
  for (const auto& r : s.runs) {
    std::ostringstream row;
    row << r.index << ',' << r.seed << ',' << r.agent_count << ',' << r.diameter << ',' << r.faulty_count << ','
        << fmt_iter(r.global_satisfied) << ',' << fmt_iter(r.termination) << ',' << r.max_single_persistence
        << ',' << r.max_global_persistence << ',' << r.fault_reports << ',';
    if (r.savings) row << *r.savings;
    for (const auto& id : ids) {
      row << ',';
      for (const auto& chk : r.checks) {
        if (chk.id == id) row << to_string(chk.verdict);
      }
    }
    csv += row.str() + '\n';
  }
  return csv;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed termination simulator"};
  app.require_subcommand(1);
  Common c;
  auto common = [&c](CLI::App* sub) {
    sub->add_option("-o,--output-dir", c.output_dir, "output directory (default $DTERM_OUTPUT_DIR or dterm-out)");
    sub->add_option("--seed", c.seed, "seed override");
    sub->add_option("--format", c.format, "trace format")->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_flag("-v,--verbose", c.verbose, "print every check and the output location");
  };

  std::string scenario_path;
  bool reduced = false, strict = false, prose = false;
  std::optional<std::size_t> threads;
  auto* run_cmd = app.add_subcommand("run", "run a scenario file");
  run_cmd->add_option("scenario", scenario_path, "scenario YAML")->required();
  run_cmd->add_flag("--reduced-computation", reduced, "skip optimisation steps once the vector is full");
  run_cmd->add_flag("--strict-verbatim-t", strict, "exclude the agent's own T from the basic max");
  run_cmd->add_flag("--prose-correction-constant", prose, "use D instead of 2D in the correction window");
  run_cmd->add_option("--threads", threads, "in-round worker threads")->check(CLI::PositiveNumber);
  common(run_cmd);

  auto* val_cmd = app.add_subcommand("validate", "check a scenario file");
  val_cmd->add_option("scenario", scenario_path, "scenario YAML")->required();
  common(val_cmd);

  CampaignSpec spec;
  std::string method = "basic", faults = "none";
  auto* camp = app.add_subcommand("campaign", "randomised property campaign");
  camp->add_option("--method", method)->check(CLI::IsMember({"basic", "fault_tolerant", "ft"}));
  camp->add_option("--n-min", spec.n_min);
  camp->add_option("--n-max", spec.n_max);
  camp->add_option("--kinds", spec.kinds, "topology kinds")->delimiter(',');
  camp->add_option("--runs", spec.runs);
  camp->add_option("--faults", faults)->check(CLI::IsMember({"none", "random", "persistent"}));
  camp->add_option("--fault-density", spec.fault_density);
  camp->add_flag("--reduced-computation", spec.reduced_computation);
  camp->add_flag("--peripheral-last", spec.peripheral_last, "last satisfier at eccentricity D");
  camp->add_option("--threads", spec.threads)->check(CLI::PositiveNumber);
  common(camp);

  std::size_t tn = 7, td = 3, budget = 20000;
  auto* tight = app.add_subcommand("find-tight", "search for a run reaching the persistence bound");
  tight->add_option("--n", tn);
  tight->add_option("--diameter", td);
  tight->add_option("--budget", budget);
  common(tight);

  TopologySpec topo{"random_connected", 10, 0, 0.2, 0, 0};
  auto* gen = app.add_subcommand("gen-topology", "write a generated graph literal");
  gen->add_option("--kind", topo.kind)
      ->check(CLI::IsMember({"path", "ring", "star", "complete", "random_connected", "with_diameter"}));
  gen->add_option("--n", topo.n);
  gen->add_option("--edge-prob", topo.edge_prob);
  gen->add_option("--diameter", topo.diameter);
  gen->add_option("--edge-count", topo.edge_count);
  common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(c, scenario_path, reduced, strict, prose, threads, out, err);
    if (*val_cmd) return cmd_validate(c, scenario_path, out, err);
    if (*camp) {
      spec.method = method_from_string(method);
      spec.faults = fault_mode_from_string(faults);
      if (c.seed) spec.seed = *c.seed;
      if (spec.n_min < 1 || spec.n_min > spec.n_max) {
        throw ValidationError("", "campaign needs 1 <= n-min <= n-max");
      }
      auto summary = run_campaign(spec);
      const fs::path dir = prepare_dir(c.output_dir);
      write_file((dir / "campaign.csv").string(), campaign_csv(summary));
      out << format_summary(summary);
      return summary.ok() ? kExitOk : kExitCheckFailed;
    }
    if (*tight) {
      auto found = find_tight_instance(tn, td, budget, c.seed.value_or(1));
      if (!found) {
        out << "no instance with persistence " << (tn + td >= 2 ? tn + td - 2 : 0) << " within budget\n";
        return kExitNotFound;
      }
      const fs::path dir = prepare_dir(c.output_dir);
      const auto fmt = trace_format_from_string(c.format);
      auto rep = run(found->scenario);
      write_file((dir / "tight_scenario.yaml").string(), dump_scenario(found->scenario));
      write_file((dir / (fmt == TraceFormat::csv ? "tight_trace.csv" : "tight_trace.jsonl")).string(),
                 serialize_trace(rep.trace, fmt));
      out << "persistence " << found->persistence << " (faulty " << found->faulty << ", subject "
          << found->subject << ", edges " << found->scenario.graph.edges().size() << ")\n";
      return kExitOk;
    }
    if (*gen) {
      topo.seed = c.seed.value_or(0);
      CommGraph g = [&] {
        try {
          return make_topology(topo);
        } catch (const ContractError& e) {
          throw ValidationError("", e.what());
        }
      }();
      const fs::path dir = prepare_dir(c.output_dir);
      write_file((dir / "topology.yaml").string(), dump_graph(g));
      out << topo.kind << ": " << g.agent_count() << " agents, " << g.edges().size() << " edges, D "
          << g.diameter() << '\n';
      return kExitOk;
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace dterm
