#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

#include "cli_internal.hpp"
#include "flatfifo/counters.hpp"
#include "flatfifo/explorer.hpp"
#include "flatfifo/lossy.hpp"
#include "flatfifo/reductions.hpp"

namespace flatfifo {

using nlohmann::json;

namespace {

struct Globals {
  std::string format = "json";
  Budgets budgets;
  std::uint64_t seed = 1;
};

void print(std::ostream& out, const Globals& g, const json& body) {
  if (g.format == "json") {
    out << body.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : body.items()) out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write '" + p.string() + "'");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Several process files are composed into their product.
FifoMachine load_system(const std::vector<std::string>& files) {
  if (files.size() == 1) return load_machine(files[0]);
  std::vector<FifoMachine> ps;
  for (const auto& f : files) ps.push_back(load_machine(f));
  return product(ps);
}

std::string machine_text(const Globals& g, const FifoMachine& m) {
  return g.format == "json" ? machine_to_json(m).dump(2) + "\n" : render_machine(m);
}

// Output of a gadget: stdout, or a file when --out is given.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) out << text;
  else write_file(path, text);
}

struct QueryOpts {
  std::vector<std::string> tokens;
  std::string target, state, channel, letter;
  QueryText text() const {
    QueryText q{tokens, {}, {}, {}, {}};
    if (!target.empty()) q.target = target;
    if (!state.empty()) q.state = state;
    if (!channel.empty()) q.channel = channel;
    if (!letter.empty()) q.letter = letter;
    return q;
  }
};

void add_query_options(CLI::App* sub, QueryOpts& q) {
  sub->add_option("--query", q.tokens, "query name and arguments, e.g. letter-bounded c a")
      ->required()
      ->expected(1, 3);
  sub->add_option("--target", q.target, "target configuration (state,w1,...)");
  sub->add_option("--state", q.state, "control state");
  sub->add_option("--channel", q.channel, "channel");
  sub->add_option("--letter", q.letter, "letter");
}

int bench(std::ostream& out, const Globals& g, int count) {
  CorpusParams p;
  p.count = count;
  auto corpus = gen_corpus(g.seed, p);
  struct Row {
    std::size_t compared = 0, agree = 0, disagree = 0, oracle_unknown = 0, budget = 0;
  };
  std::map<std::string, Row> rows;
  json disagreements = json::array();
  auto compare = [&](const std::string& prop, const std::string& name, const std::string& oracle, const Report& r) {
    Row& row = rows[prop];
    if (r.exit_code == kExitInconclusive) {
      ++row.budget;
      return;
    }
    if (oracle == "unknown") {
      ++row.oracle_unknown;
      return;
    }
    ++row.compared;
    bool symbolic = r.exit_code == kExitHolds;
    if (symbolic == (oracle == "yes")) ++row.agree;
    else {
      ++row.disagree;
      disagreements.push_back({{"machine", name}, {"property", prop}, {"explorer", oracle}});
    }
  };
  for (const auto& e : corpus) {
    const auto& m = e.machine;
    for (int q = 0; q < (int)m.states.size(); ++q) {
      Query query{QueryKind::Csr, std::nullopt, q, -1, -1};
      compare("csr", e.name, e.annotations["csr"][m.states[q]], cmd_check(m, query, Semantics::Perfect, g.budgets));
    }
    compare("terminate", e.name, e.annotations["terminating"],
            cmd_check(m, Query{QueryKind::Terminate, std::nullopt, -1, -1, -1}, Semantics::Perfect, g.budgets));
    compare("bounded", e.name, e.annotations["bounded"],
            cmd_check(m, Query{QueryKind::Bounded, std::nullopt, -1, -1, -1}, Semantics::Perfect, g.budgets));
  }
  bool ok = true;
  json table = json::array();
  for (const auto& [prop, r] : rows) {
    ok = ok && r.disagree == 0;
    table.push_back({{"property", prop},
                     {"compared", r.compared},
                     {"agree", r.agree},
                     {"disagree", r.disagree},
                     {"explorer_unknown", r.oracle_unknown},
                     {"budget", r.budget}});
  }
  json body = {{"seed", g.seed}, {"machines", corpus.size()}, {"table", table}, {"disagreements", disagreements}};
  if (g.format == "json") {
    out << body.dump(2) << "\n";
  } else {
    out << "property    compared  agree  disagree  explorer-unknown  budget\n";
    for (const auto& [prop, r] : rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%-10s  %8zu  %5zu  %8zu  %16zu  %6zu\n", prop.c_str(), r.compared, r.agree,
                    r.disagree, r.oracle_unknown, r.budget);
      out << line;
    }
  }
  return ok ? kExitHolds : kExitFails;
}

int translate(std::ostream& out, const std::string& path, bool modified, bool flatten, const std::string& format,
              const std::string& dir, const Budgets& b) {
  auto m = load_machine(path);
  SyncOptions opt;
  auto sys = modified ? build_modified_sync(m, opt) : build_sync(m, opt);
  std::optional<FlatteningMap> fm;
  if (flatten) fm = trace_flatten(sys, counter_initial(sys.product), b.flatten);
  if (dir.empty()) {
    out << (fm ? export_flattening(*fm, format) : export_counter_system(sys, format));
    return kExitHolds;
  }
  std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  std::string ext = "." + format;
  write_file(d / ("count" + ext), export_counter_machine(sys.count, format));
  for (std::size_t c = 0; c < sys.orders.size(); ++c)
    write_file(d / ("order_" + m.channels[c] + ext), export_counter_machine(sys.orders[c], format));
  write_file(d / ((modified ? "modified_sync" : "sync") + ext), export_counter_system(sys, format));
  if (fm) write_file(d / ("flat" + ext), export_flattening(*fm, format));
  return kExitHolds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification of flat FIFO machines"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--budget-acceleration", g.budgets.acceleration, "loop unrollings before acceleration gives up");
  app.add_option("--budget-fixpoint", g.budgets.fixpoint, "lossy fixpoint rounds");
  app.add_option("--budget-tape", g.budgets.tape, "front-lossy tape length");
  app.add_option("--budget-configs", g.budgets.configs, "explorer configurations");
  app.add_option("--budget-channel", g.budgets.channel_len, "explorer channel length");
  app.add_option("--budget-flatten", g.budgets.flatten, "trace-flattening states");
  app.add_option("--budget-submachines", g.budgets.submachines, "flat sub-machines tried by verify-general");
  app.add_option("--seed", g.seed, "corpus seed");

  std::string machine, semantics = "perfect";
  std::vector<std::string> processes;
  QueryOpts qopts;
  auto* check = app.add_subcommand("check", "decide a query on a flat machine");
  check->add_option("machine", processes, "machine file (DSL or JSON), or several processes")->required();
  add_query_options(check, qopts);
  check->add_option("--semantics", semantics)->check(CLI::IsMember({"perfect", "lossy", "front-lossy"}));

  auto* general = app.add_subcommand("verify-general", "semi-decision through flat sub-machines");
  general->add_option("machine", processes, "machine file, or several processes")->required();
  add_query_options(general, qopts);

  bool modified = false, flatten = false;
  std::string tformat = "json", out_path;
  auto* trans = app.add_subcommand("translate", "compile to counter systems");
  trans->add_option("machine", machine)->required();
  trans->add_flag("--modified", modified, "silent-free order machines");
  trans->add_flag("--flatten", flatten, "trace-flatten the synchronized system");
  trans->add_option("--format", tformat)->check(CLI::IsMember({"json", "fast"}));
  trans->add_option("--out", out_path, "directory for one file per machine");

  auto* gadget = app.add_subcommand("gadget", "hardness gadgets and reductions");
  gadget->require_subcommand(1);
  std::string cnf_file, variant = "reach", target, state;
  int choice = 0, count = 100;
  auto* g_sat = gadget->add_subcommand("sat3", "3SAT formula (DIMACS) to flat machine");
  g_sat->add_option("cnf", cnf_file)->required();
  g_sat->add_option("--variant", variant)->check(CLI::IsMember({"reach", "unbounded", "nonterm", "repeated-csr"}));
  g_sat->add_option("--out", out_path);
  auto* g_rc = gadget->add_subcommand("reach-to-csr", "reachability to control-state reachability");
  g_rc->add_option("machine", machine)->required();
  g_rc->add_option("--target", target)->required();
  g_rc->add_option("--out", out_path);
  auto* g_cr = gadget->add_subcommand("csr-to-reach", "control-state reachability to reachability");
  g_cr->add_option("machine", machine)->required();
  g_cr->add_option("--state", state)->required();
  g_cr->add_option("--out", out_path);
  auto* g_lr = gadget->add_subcommand("lossy-reach-to-csr", "lossy reachability to control-state reachability");
  g_lr->add_option("machine", machine)->required();
  g_lr->add_option("--target", target)->required();
  g_lr->add_option("--out", out_path);
  auto* g_rcsr = gadget->add_subcommand("rcsr", "repeated control-state reachability gadget");
  g_rcsr->add_option("machine", machine)->required();
  g_rcsr->add_option("--state", state)->required();
  g_rcsr->add_option("--choice", choice, "index into the witness choices");
  g_rcsr->add_option("--out", out_path);
  auto* g_corpus = gadget->add_subcommand("corpus", "random flat machines with explorer annotations");
  g_corpus->add_option("--count", count);
  g_corpus->add_option("--out", out_path)->required();

  std::size_t depth = 1u << 30;
  auto* explore_cmd = app.add_subcommand("explore", "bounded explicit reach graph");
  explore_cmd->add_option("machine", processes, "machine file, or several processes")->required();
  explore_cmd->add_option("--depth", depth);
  explore_cmd->add_option("--semantics", semantics)->check(CLI::IsMember({"perfect", "lossy", "front-lossy"}));

  auto* bench_cmd = app.add_subcommand("bench", "symbolic deciders against the explorer on a corpus");
  bench_cmd->add_option("--count", count);

  // global flags may follow the subcommand
  for (auto* s : {check, general, trans, gadget, explore_cmd, bench_cmd}) s->fallthrough();
  for (auto* s : {g_sat, g_rc, g_cr, g_lr, g_rcsr, g_corpus}) s->fallthrough();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitHolds;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (check->parsed() || general->parsed()) {
      auto m = load_system(processes);
      auto q = resolve_query(m, qopts.text());
      Report r = check->parsed() ? cmd_check(m, q, semantics_from_string(semantics), g.budgets)
                                 : cmd_verify_general(m, q, g.budgets);
      print(out, g, r.body);
      if (r.exit_code == kExitInputError) err << "error: " << r.body.value("error", "input error") << "\n";
      return r.exit_code;
    }
    if (trans->parsed()) return translate(out, machine, modified, flatten, tformat, out_path, g.budgets);
    if (g_sat->parsed()) {
      auto inst = sat3_to_flat_fifo(parse_dimacs(read_file(cnf_file)), sat3_variant_from_string(variant));
      emit(out, out_path, machine_text(g, inst.machine));
      return kExitHolds;
    }
    if (g_rc->parsed() || g_lr->parsed()) {
      auto m = load_machine(machine);
      auto t = parse_config(m, target);
      if (g_rc->parsed()) emit(out, out_path, machine_text(g, reach_to_csr(m, t).machine));
      else emit(out, out_path, machine_text(g, lossy_reach_to_csr(m, t).first));
      return kExitHolds;
    }
    if (g_cr->parsed() || g_rcsr->parsed()) {
      auto m = load_machine(machine);
      int q = m.state_index(state);
      if (q < 0) throw ValidationError("unknown state '" + state + "'");
      if (g_cr->parsed()) {
        emit(out, out_path, machine_text(g, csr_to_reach(m, q).machine));
        return kExitHolds;
      }
      auto choices = rcsr_witness_choices(m, q);
      if (choice < 0 || choice >= (int)choices.size())
        throw ValidationError("choice " + std::to_string(choice) + " out of " + std::to_string(choices.size()));
      emit(out, out_path, machine_text(g, rcsr_gadget(m, q, choices[choice]).machine));
      return kExitHolds;
    }
    if (g_corpus->parsed()) {
      CorpusParams p;
      p.count = count;
      std::filesystem::path d(out_path);
      std::filesystem::create_directories(d);
      json index = json::array();
      for (const auto& e : gen_corpus(g.seed, p)) {
        write_file(d / (e.name + ".ff"), render_machine(e.machine));
        index.push_back({{"name", e.name}, {"annotations", e.annotations}, {"conclusive", e.conclusive}});
      }
      write_file(d / "corpus.json", index.dump(2) + "\n");
      print(out, g, {{"machines", index.size()}, {"directory", out_path}});
      return kExitHolds;
    }
    if (explore_cmd->parsed()) {
      auto m = load_system(processes);
      ExploreBounds b{g.budgets.configs, g.budgets.channel_len, depth};
      auto graph = explore(m, m.initial_config(), semantics_from_string(semantics), b);
      if (g.format == "json") out << graph_to_json(m, graph).dump(2) << "\n";
      else out << "configs: " << graph.size() << "\nedges: " << graph.edges.size()
               << "\ntruncated: " << (graph.truncated ? "yes" : "no") << "\n";
      return kExitHolds;
    }
    if (bench_cmd->parsed()) return bench(out, g, count);
  } catch (const Error& e) {
    Report r = cli::error_report(e);
    err << "error: " << e.what() << "\n";
    return r.exit_code;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace flatfifo
