#include <fstream>
#include <iostream>
#include <map>
#include <queue>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "syncpat/congruence.hpp"
#include "syncpat/oracle.hpp"
#include "syncpat/parser.hpp"
#include "syncpat/reachability.hpp"

using json = nlohmann::ordered_json;
using namespace syncpat;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Term load_term(const std::string& path) { return parse_file(slurp(path)); }

json consumed_json(const Consumed& c) {
  return json{{"label", c.label.str()}, {"kind", cap_kind_id(c.kind)}, {"recurrent", c.recurrent}};
}

json step_json(const Step& s, Calculus cal) {
  json cons = json::array();
  for (const Consumed& c : s.consumed) cons.push_back(consumed_json(c));
  return json{{"id", s.id},
              {"axiom", axiom_id(s.axiom)},
              {"consumed", std::move(cons)},
              {"residual", render(s.residual.root, cal)}};
}

std::string consumed_text(const Step& s) {
  std::string out;
  for (const Consumed& c : s.consumed) {
    if (!out.empty()) out += " ";
    out += c.label.str();
    out += ":";
    out += cap_kind_id(c.kind);
    out += c.recurrent ? "(rec)" : "(nonrec)";
  }
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

// Bounded breadth-first transition system in Graphviz form. Steps whose
// consumed set matches one of `mark` (root steps only) are highlighted.
void write_dot(const Term& t, const std::vector<Step>& mark, const std::string& path) {
  Limits lim = default_limits();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "digraph steps {\n  node [shape=box fontname=\"monospace\"];\n";
  std::map<std::string, int> ids;
  std::queue<std::pair<Term, int>> work;
  auto intern = [&](const Term& s) {
    auto key = state_key(canonicalize(s));
    auto it = ids.find(key);
    if (it != ids.end()) return std::pair{it->second, false};
    int id = int(ids.size());
    ids.emplace(key, id);
    return std::pair{id, true};
  };
  auto [rid, fresh] = intern(t);
  out << "  s" << rid << " [label=\"" << render(canonicalize(t)) << "\"];\n";
  work.push({t, rid});
  while (!work.empty() && ids.size() < lim.states) {
    auto [cur, cid] = work.front();
    work.pop();
    for (const Step& s : enumerate_steps(cur, lim.unfold_depth).steps) {
      auto [nid, is_new] = intern(s.residual);
      if (is_new) {
        out << "  s" << nid << " [label=\"" << render(canonicalize(s.residual)) << "\"];\n";
        work.push({s.residual, nid});
      }
      bool hl = false;
      if (cid == rid)
        for (const Step& m : mark) hl = hl || same_consumed(s, m);
      out << "  s" << cid << " -> s" << nid << " [label=\"" << s.id << " " << axiom_id(s.axiom)
          << "\"" << (hl ? " color=red penwidth=2" : "") << "];\n";
    }
  }
  out << "}\n";
}

int cmd_parse(const std::string& file, bool as_json) {
  Term t = canonicalize(load_term(file));
  if (as_json)
    emit(json{{"schema", 1}, {"calculus", calculus_id(t.cal)}, {"canonical", render(t)}});
  else
    std::cout << render(t) << "\n";
  return 0;
}

int cmd_steps(const std::string& file, bool as_json, int unfold) {
  Term t = load_term(file);
  StepSet ss = enumerate_steps(t, unfold);
  if (as_json) {
    json steps = json::array();
    for (const Step& s : ss.steps) steps.push_back(step_json(s, t.cal));
    emit(json{{"schema", 1}, {"calculus", calculus_id(t.cal)}, {"steps", std::move(steps)}});
    return 0;
  }
  if (ss.steps.empty()) {
    std::cout << "no steps\n";
    return 0;
  }
  for (const Step& s : ss.steps)
    std::cout << "step " << s.id << " " << axiom_id(s.axiom) << "\n  consumed: "
              << consumed_text(s) << "\n  residual: " << render(s.residual.root, t.cal) << "\n";
  return 0;
}

int cmd_pairs(const std::string& file, bool as_json) {
  Term t = load_term(file);
  StepSet ss = enumerate_steps(t);
  json rows = json::array();
  for (size_t i = 0; i < ss.steps.size(); ++i)
    for (size_t j = i + 1; j < ss.steps.size(); ++j) {
      PairRelation r = classify_pair(t, ss.steps[i], ss.steps[j]);
      json shared = json::array();
      for (const SharedLabel& s : r.shared)
        shared.push_back(json{{"label", s.label.str()},
                              {"kind", cap_kind_id(s.kind)},
                              {"rec-in-first", s.rec_in_first},
                              {"rec-in-second", s.rec_in_second}});
      json row{{"first", ss.steps[i].id},
               {"second", ss.steps[j].id},
               {"kind", pair_kind_id(r.kind)},
               {"shared", std::move(shared)}};
      if (r.kind == PairKind::ConflictAsymmetric) row["disabler"] = r.disabler;
      if (!as_json)
        std::cout << ss.steps[i].id << " " << ss.steps[j].id << " " << pair_kind_id(r.kind)
                  << (r.kind == PairKind::ConflictAsymmetric
                          ? " disabler=" + std::to_string(r.disabler)
                          : "")
                  << "\n";
      rows.push_back(std::move(row));
    }
  if (as_json) emit(json{{"schema", 1}, {"pairs", std::move(rows)}});
  return 0;
}

int cmd_decompose(const std::string& file, bool as_json, int unfold) {
  Term t = load_term(file);
  Distribution d = decompose(t, unfold);
  Degree deg = degree_of_distributability(t);
  json comps = json::array();
  for (const Term& c : d.components) comps.push_back(render(c));
  json out{{"schema", 1},
           {"components", std::move(comps)},
           {"witness", render(d.witness)},
           {"degree", deg.unbounded ? json("unbounded") : json(deg.value)}};
  if (as_json) {
    emit(out);
  } else {
    for (const Term& c : d.components) std::cout << render(c) << "\n";
    std::cout << "degree: " << (deg.unbounded ? "unbounded" : std::to_string(deg.value)) << "\n";
  }
  return 0;
}

int cmd_success(const std::string& file, const std::string& mode, Limits lim) {
  Term t = load_term(file);
  if (mode == "has") {
    bool h = has_success(t);
    std::cout << (h ? "true" : "false") << "\n";
    return h ? 0 : 1;
  }
  Verdict v = mode == "reach" ? reach_success(t, lim) : must_reach_success_finite(t, lim);
  std::cout << verdict_id(v) << "\n";
  return v == Verdict::True ? 0 : 1;
}

int cmd_patterns(const std::string& file, bool great, bool allow_asym, bool nonlocal_only,
                 const std::string& dot, bool as_json) {
  Term t = load_term(file);
  json ws = json::array();
  std::vector<Step> mark;
  size_t count = 0;
  if (!great) {
    for (const MWitness& w : find_m(t, allow_asym, nonlocal_only)) {
      ++count;
      for (const Step* s : {&w.a, &w.b, &w.c}) mark.push_back(*s);
      ws.push_back(json{{"a", step_json(w.a, t.cal)},
                        {"b", step_json(w.b, t.cal)},
                        {"c", step_json(w.c, t.cal)},
                        {"non-local", w.non_local},
                        {"conflict-ba-symmetric", w.conflict_ba_symmetric},
                        {"conflict-bc-symmetric", w.conflict_bc_symmetric},
                        {"b-uses-open", w.b_uses_open}});
    }
  } else {
    for (const GreatMWitness& w : find_great_m(t, allow_asym, nonlocal_only)) {
      ++count;
      json cyc = json::array(), sym = json::array();
      for (const Step& s : w.cycle) {
        mark.push_back(s);
        cyc.push_back(step_json(s, t.cal));
      }
      for (bool b : w.edge_symmetric) sym.push_back(b);
      ws.push_back(json{{"cycle", std::move(cyc)},
                        {"edge-symmetric", std::move(sym)},
                        {"non-local", w.non_local}});
    }
  }
  json out{{"schema", 1},
           {"pattern", great ? "great-m" : "m"},
           {"witnesses", std::move(ws)}};
  if (as_json)
    emit(out);
  else
    std::cout << (great ? "great-m" : "m") << " witnesses: " << count << "\n";
  if (!dot.empty()) write_dot(t, mark, dot);
  return count > 0 ? 0 : 1;
}

json report_json(const LemmaReport& r) {
  json viols = json::array();
  for (const Violation& v : r.violations)
    viols.push_back(json{{"term", v.term}, {"detail", v.detail}});
  return json{{"schema", 1},
              {"terms-checked", r.terms_checked},
              {"witnesses-found", r.witnesses_found},
              {"violations", std::move(viols)},
              {"note", r.note}};
}

int cmd_oracle(const std::string& which, const EnumSpec& spec, int jobs,
               const std::vector<std::string>& files) {
  LemmaReport rep;
  if (which == "lemma3") {
    rep = check_lemma3(spec, jobs);
  } else if (which == "corollary5") {
    rep = check_corollary_unique_names(spec, jobs);
  } else {
    std::vector<Term> corpus;
    for (const std::string& f : files) corpus.push_back(load_term(f));
    rep = check_join_locality(corpus);
  }
  emit(report_json(rep));
  std::cerr << "wall time: " << rep.seconds << "s\n";
  return rep.violations.empty() ? 0 : 1;
}

json measure(const Term& t, const std::string& key) {
  if (key == "steps") return enumerate_steps(t).steps.size();
  if (key == "m-witnesses") return find_m(t, false).size();
  if (key == "m-witnesses-asym") return find_m(t, true).size();
  if (key == "great-m-witnesses") return find_great_m(t, false).size();
  if (key == "great-m-witnesses-asym") return find_great_m(t, true).size();
  if (key == "reach") return verdict_id(reach_success(t));
  if (key == "must-reach") return verdict_id(must_reach_success_finite(t));
  if (key == "degree") {
    Degree d = degree_of_distributability(t);
    return d.unbounded ? json("unbounded") : json(d.value);
  }
  throw std::runtime_error("unknown manifest key '" + key + "'");
}

int cmd_corpus(const std::string& dir, bool regen) {
  std::string mpath = dir + "/manifest.json";
  json manifest;
  try {
    manifest = json::parse(slurp(mpath));
  } catch (const std::exception& e) {
    std::cerr << "error: cannot read manifest: " << e.what() << "\n";
    return 2;
  }
  if (!manifest.contains("files") || manifest["files"].empty()) {
    std::cout << "warning: empty corpus, nothing to check\n";
    return 0;
  }
  int failures = 0, checks = 0;
  for (auto& [name, expect] : manifest["files"].items()) {
    Term t;
    try {
      t = load_term(dir + "/" + name);
    } catch (const std::exception& e) {
      std::cerr << "error: " << name << ": " << e.what() << "\n";
      return 2;
    }
    for (auto& [key, want] : expect.items()) {
      if (!key.empty() && key[0] == '_') continue;
      json got = measure(t, key);
      ++checks;
      if (regen) {
        expect[key] = got;
      } else if (got != want) {
        ++failures;
        std::cout << "FAIL " << name << " " << key << ": expected " << want.dump() << " got "
                  << got.dump() << "\n";
      }
    }
  }
  if (regen) {
    std::ofstream out(mpath);
    out << manifest.dump(2) << "\n";
    std::cout << "regenerated " << mpath << "\n";
    return 0;
  }
  std::cout << checks << " checks, " << failures << " failures\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for synchronisation patterns in process calculi"};
  app.require_subcommand(1);

  std::string file, dot, dir, oracle_kind;
  std::vector<std::string> files;
  bool as_json = false, great = false, m_flag = false, allow_asym = false, nonlocal = false;
  bool regen = false;
  int unfold = 2, unfold0 = 0, jobs = 1;
  std::string mode;
  Limits lim = default_limits();
  EnumSpec spec;
  spec.max_operators = 8;

  auto* parse_cmd = app.add_subcommand("parse", "echo the canonical form");
  parse_cmd->add_option("file", file)->required();
  parse_cmd->add_flag("--json", as_json);

  auto* steps_cmd = app.add_subcommand("steps", "enumerate reduction steps");
  steps_cmd->add_option("file", file)->required();
  steps_cmd->add_flag("--json", as_json);
  steps_cmd->add_option("--unfold", unfold, "replication unfolding depth");

  auto* pairs_cmd = app.add_subcommand("pairs", "pairwise step relations");
  pairs_cmd->add_option("file", file)->required();
  pairs_cmd->add_flag("--json", as_json);

  auto* dec_cmd = app.add_subcommand("decompose", "distributability components and degree");
  dec_cmd->add_option("file", file)->required();
  dec_cmd->add_flag("--json", as_json);
  dec_cmd->add_option("--unfold", unfold0, "textual replication unfoldings first");

  auto* suc_cmd = app.add_subcommand("success", "success reachability checks");
  suc_cmd->add_option("file", file)->required();
  suc_cmd->add_flag("--reach{reach},--must{must},--has{has}", mode, "check to run")->required();
  suc_cmd->add_option("--states", lim.states);
  suc_cmd->add_option("--depth", lim.depth);

  auto* pat_cmd = app.add_subcommand("patterns", "synchronisation pattern detection");
  pat_cmd->add_option("file", file)->required();
  pat_cmd->add_flag("--m", m_flag, "three-step pattern");
  pat_cmd->add_flag("--great-m", great, "five-step cyclic pattern");
  pat_cmd->add_flag("--allow-asymmetric", allow_asym);
  pat_cmd->add_flag("--nonlocal-only", nonlocal);
  pat_cmd->add_option("--dot", dot, "write the step transition system as Graphviz");
  pat_cmd->add_flag("--json", as_json);

  auto* orc_cmd = app.add_subcommand("oracle", "bounded exhaustive verification");
  orc_cmd->add_option("check", oracle_kind)
      ->required()
      ->check(CLI::IsMember({"lemma3", "corollary5", "join-locality"}));
  orc_cmd->add_option("files", files, "join corpus term files");
  orc_cmd->add_option("--max-operators", spec.max_operators);
  orc_cmd->add_option("--name-pool", spec.name_pool);
  orc_cmd->add_flag("--allow-restriction", spec.allow_restriction);
  orc_cmd->add_flag("--allow-replication", spec.allow_replication);
  orc_cmd->add_option("--jobs", jobs);

  auto* cor_cmd = app.add_subcommand("corpus", "run a corpus against its manifest");
  cor_cmd->add_option("dir", dir)->required();
  cor_cmd->add_flag("--regen", regen, "rewrite manifest expectations from current results");

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) return cmd_parse(file, as_json);
    if (steps_cmd->parsed()) return cmd_steps(file, as_json, unfold);
    if (pairs_cmd->parsed()) return cmd_pairs(file, as_json);
    if (dec_cmd->parsed()) return cmd_decompose(file, as_json, unfold0);
    if (suc_cmd->parsed()) return cmd_success(file, mode, lim);
    if (pat_cmd->parsed()) {
      if (great == m_flag) {
        std::cerr << "error: pass exactly one of --m / --great-m\n";
        return 2;
      }
      return cmd_patterns(file, great, allow_asym, nonlocal, dot, as_json);
    }
    if (orc_cmd->parsed()) return cmd_oracle(oracle_kind, spec, jobs, files);
    if (cor_cmd->parsed()) return cmd_corpus(dir, regen);
  } catch (const ParseError& e) {
    std::cerr << "error: " << file << ":" << e.line << ":" << e.col << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
