#pragma once
// Proposal backends for condition sets and predicate concepts.
//
// Two kinds of request flow through one entry point. ConditionSets asks for
// plausible precondition subsets of a candidate atom list, given a process
// effect summary. PredicateConcepts asks for new predicate ideas given a
// rendered trajectory and whether it succeeded. The heuristic backend is
// deterministic and needs no network; the service backend renders a prompt
// template, posts it to a chat-completion endpoint, parses the tagged answer
// block, retries malformed replies, and falls back to the heuristic. Every
// live exchange can be recorded to a JSON-lines transcript and replayed
// later for bit-identical runs without network access.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "exo/structure.hpp"
#include "exo/symbols.hpp"

namespace exo {

enum class ProposerMode { kHeuristic, kLlm, kReplay };

// ---------------------------------------------------------------------------
// requests and responses

struct CandidateAtomInfo {
  std::string text;                  // rendered atom, e.g. "Holding(?x0:item)"
  std::vector<std::string> objects;  // argument tokens, for overlap ranking
};

// One clustered process the caller wants conditions for.
struct ProcessQuery {
  std::vector<std::string> add_effects;
  std::vector<std::string> del_effects;
  std::vector<std::string> effect_objects;  // argument tokens of the effects
  std::vector<CandidateAtomInfo> candidates;
};

struct ConditionSetsRequest {
  std::vector<std::string> predicate_listing;  // one line per predicate
  std::vector<ProcessQuery> processes;
  int budget = 8;  // max sets kept per process
};

// Doubles as a catalog entry (known resolvable concept) and a response item.
struct ConceptSpec {
  std::string name;
  std::vector<std::string> param_types;
  std::string assertion;
  std::string classifier_key;  // empty when no implementation is known
};

struct PredicateConceptsRequest {
  std::string types_in_env;
  std::string predicates_in_env;
  std::string goal_predicate;
  std::string experience;  // rendered state-action trajectory
  bool success = true;     // picks the success or failure template
  int budget = 8;
  std::vector<std::string> existing;  // predicate names already in play
  std::vector<ConceptSpec> catalog;   // concepts with known classifiers
};

struct ProposalRequest {
  enum class Kind { kConditionSets, kPredicateConcepts };
  Kind kind = Kind::kConditionSets;
  ConditionSetsRequest cond;
  PredicateConceptsRequest pred;
};

struct ProposalResponse {
  // Per process, a list of index sets into its candidate atoms, each sorted.
  std::vector<std::vector<std::vector<int>>> condition_sets;
  std::vector<ConceptSpec> concepts;
  bool from_fallback = false;  // service path failed, heuristic result
  std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------
// heuristic backend

namespace propdetail {

inline std::string lower(std::string s) {
  for (char& c : s) c = (char)std::tolower((unsigned char)c);
  return s;
}

// Emit subsets of {0..n-1} for one process in a fixed order: fewest
// non-sharing members first, then smaller sets, then combination order
// within the sharing and non-sharing pools. A candidate shares when one of
// its argument tokens appears in the effect arguments. Exhaustive below the
// budget, early-stopped above it.
inline std::vector<std::vector<int>> subsets_sharing_first(
    const ProcessQuery& q, int budget) {
  std::set<std::string> eff(q.effect_objects.begin(), q.effect_objects.end());
  std::vector<int> share, other;
  for (int i = 0; i < (int)q.candidates.size(); ++i) {
    bool hit = false;
    for (const std::string& o : q.candidates[i].objects)
      if (eff.count(o)) { hit = true; break; }
    (hit ? share : other).push_back(i);
  }

  std::vector<std::vector<int>> out;
  std::vector<int> pick_s, pick_o;
  // combos(pool, k, at, then): all k-subsets of pool[at..], position order
  std::function<void(const std::vector<int>&, int, int, std::vector<int>&,
                     const std::function<void()>&)>
      combos = [&](const std::vector<int>& pool, int k, int at,
                   std::vector<int>& pick, const std::function<void()>& then) {
        if ((int)out.size() >= budget) return;
        if (k == 0) { then(); return; }
        for (int i = at; i + k <= (int)pool.size(); ++i) {
          pick.push_back(pool[i]);
          combos(pool, k - 1, i + 1, pick, then);
          pick.pop_back();
          if ((int)out.size() >= budget) return;
        }
      };
  int n = (int)q.candidates.size();
  for (int miss = 0; miss <= (int)other.size(); ++miss) {
    for (int size = std::max(1, miss); size <= n; ++size) {
      if (size - miss > (int)share.size()) continue;
      combos(share, size - miss, 0, pick_s, [&] {
        combos(other, miss, 0, pick_o, [&] {
          std::vector<int> s = pick_s;
          s.insert(s.end(), pick_o.begin(), pick_o.end());
          std::sort(s.begin(), s.end());
          out.push_back(std::move(s));
        });
      });
      if ((int)out.size() >= budget) return out;
    }
  }
  return out;
}

}  // namespace propdetail

inline ProposalResponse heuristic_propose(const ProposalRequest& req) {
  ProposalResponse out;
  if (req.kind == ProposalRequest::Kind::kConditionSets) {
    for (const ProcessQuery& q : req.cond.processes)
      out.condition_sets.push_back(
          propdetail::subsets_sharing_first(q, req.cond.budget));
  } else {
    // Propose every cataloged concept not already in play, in name order.
    std::set<std::string> have;
    for (const std::string& p : req.pred.existing)
      have.insert(propdetail::lower(p));
    std::vector<ConceptSpec> cands;
    for (const ConceptSpec& c : req.pred.catalog)
      if (!have.count(propdetail::lower(c.name))) cands.push_back(c);
    std::sort(cands.begin(), cands.end(),
              [](const ConceptSpec& a, const ConceptSpec& b) {
                return a.name < b.name;
              });
    if ((int)cands.size() > req.pred.budget) cands.resize(req.pred.budget);
    out.concepts = std::move(cands);
  }
  return out;
}

// ---------------------------------------------------------------------------
// prompt rendering

namespace propdetail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string substitute(
    std::string text, const std::map<std::string, std::string>& slots) {
  for (const auto& [key, val] : slots) {
    const std::string tag = "{" + key + "}";
    size_t pos = 0;
    while ((pos = text.find(tag, pos)) != std::string::npos) {
      text.replace(pos, tag.size(), val);
      pos += val.size();
    }
  }
  return text;
}

inline std::string bracket_list(const std::vector<std::string>& xs) {
  std::string s = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += xs[i];
  }
  return s + "]";
}

inline std::string join_lines(const std::vector<std::string>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += "\n";
    s += xs[i];
  }
  return s;
}

}  // namespace propdetail

// Fills the condition proposal template. Process blocks list add and delete
// effects, then the candidate atoms with their indices.
inline std::string render_condition_prompt(const ConditionSetsRequest& req,
                                           const std::string& prompt_dir) {
  std::string tmpl =
      propdetail::read_text_file(prompt_dir + "/condition_proposal.txt");
  std::ostringstream blocks;
  for (size_t p = 0; p < req.processes.size(); ++p) {
    const ProcessQuery& q = req.processes[p];
    if (p) blocks << "\n\n";
    blocks << "Process " << p << ":\n";
    blocks << "- Add effects: " << propdetail::bracket_list(q.add_effects)
           << "\n";
    blocks << "- Delete effects: " << propdetail::bracket_list(q.del_effects)
           << "\n";
    blocks << "- Candidate atoms:";
    for (size_t i = 0; i < q.candidates.size(); ++i)
      blocks << "\n  " << i << ": " << q.candidates[i].text;
  }
  return propdetail::substitute(
      tmpl, {{"PREDICATE_LISTING", propdetail::join_lines(req.predicate_listing)},
             {"PROCESS_EFFECTS_AND_CANDIDATES", blocks.str()}});
}

inline std::string render_concepts_prompt(const PredicateConceptsRequest& req,
                                          const std::string& prompt_dir) {
  std::string tmpl = propdetail::read_text_file(
      prompt_dir + (req.success ? "/predicate_invention_success.txt"
                                : "/predicate_invention_failure.txt"));
  return propdetail::substitute(
      tmpl, {{"TYPES_IN_ENV", req.types_in_env},
             {"PREDICATES_IN_ENV", req.predicates_in_env},
             {"GOAL_PREDICATE", req.goal_predicate},
             {"EXPERIENCE_IN_ENV", req.experience}});
}

// The classifier implementation prompt. Rendered for completeness; in this
// codebase proposed concepts resolve to registered classifiers by catalog
// key instead of generated code.
inline std::string render_implementation_prompt(
    const std::string& struct_definition, const std::string& types_in_env,
    const std::string& predicates_in_env, const std::string& listed_states,
    const std::string& predicate_specs, const std::string& prompt_dir) {
  std::string tmpl = propdetail::read_text_file(
      prompt_dir + "/predicate_implementation.txt");
  return propdetail::substitute(
      tmpl, {{"STRUCT_DEFINITION", struct_definition},
             {"TYPES_IN_ENV", types_in_env},
             {"PREDICATES_IN_ENV", predicates_in_env},
             {"LISTED_STATES", listed_states},
             {"PREDICATE_SPECS", predicate_specs}});
}

// ---------------------------------------------------------------------------
// answer parsing

namespace propdetail {

inline bool extract_answer_block(const std::string& text, std::string* out) {
  size_t a = text.find("<answer>");
  if (a == std::string::npos) return false;
  a += std::string("<answer>").size();
  size_t b = text.find("</answer>", a);
  if (b == std::string::npos) return false;
  *out = text.substr(a, b - a);
  return true;
}

inline std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// "Set 1: [2, 0, 4]" -> {0, 2, 4}; range-checked against n_atoms
inline bool parse_index_set(const std::string& line, int n_atoms,
                            std::vector<int>* out, std::string* err) {
  size_t lb = line.find('[');
  size_t rb = line.find(']');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
    *err = "no [..] index list in: " + line;
    return false;
  }
  out->clear();
  std::string body = line.substr(lb + 1, rb - lb - 1);
  std::istringstream in(body);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = strip(tok);
    if (tok.empty()) continue;
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') {
      *err = "bad index '" + tok + "' in: " + line;
      return false;
    }
    if (v < 0 || v >= n_atoms) {
      *err = "index " + std::to_string(v) + " out of range in: " + line;
      return false;
    }
    out->push_back((int)v);
  }
  if (out->empty()) {
    *err = "empty index set in: " + line;
    return false;
  }
  std::sort(out->begin(), out->end());
  out->erase(std::unique(out->begin(), out->end()), out->end());
  return true;
}

inline bool parse_condition_answer(const std::string& raw,
                                   const ConditionSetsRequest& req,
                                   ProposalResponse* out, std::string* err) {
  std::string body;
  if (!extract_answer_block(raw, &body)) {
    *err = "missing <answer> block";
    return false;
  }
  out->condition_sets.assign(req.processes.size(), {});
  int cur = -1;
  int total = 0;
  for (const std::string& rawline : split_lines(body)) {
    std::string line = strip(rawline);
    if (line.rfind("Process", 0) == 0) {
      size_t colon = line.find(':');
      std::string num = strip(line.substr(7, colon == std::string::npos
                                                 ? std::string::npos
                                                 : colon - 7));
      char* end = nullptr;
      long v = std::strtol(num.c_str(), &end, 10);
      if (end == num.c_str() || v < 0 || v >= (long)req.processes.size()) {
        *err = "bad process header: " + line;
        return false;
      }
      cur = (int)v;
    } else if (line.rfind("Set", 0) == 0) {
      if (cur < 0) {
        *err = "Set line before any Process header: " + line;
        return false;
      }
      std::vector<int> s;
      if (!parse_index_set(line, (int)req.processes[cur].candidates.size(), &s,
                           err))
        return false;
      auto& sets = out->condition_sets[cur];
      if ((int)sets.size() < req.budget &&
          std::find(sets.begin(), sets.end(), s) == sets.end()) {
        sets.push_back(std::move(s));
        ++total;
      }
    }
    // anything else is free-form reasoning and is ignored
  }
  if (total == 0) {
    *err = "answer block contains no condition sets";
    return false;
  }
  return true;
}

// "* Name(?a:type1, ?b:type2): assertion text." -> ConceptSpec
inline bool parse_concept_line(const std::string& line, ConceptSpec* out,
                               std::string* err) {
  std::string s = strip(line.substr(1));  // past the '*'
  size_t lp = s.find('(');
  size_t rp = s.find(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp) {
    *err = "no parameter list in proposal: " + line;
    return false;
  }
  out->name = strip(s.substr(0, lp));
  if (out->name.empty()) {
    *err = "empty name in proposal: " + line;
    return false;
  }
  out->param_types.clear();
  std::istringstream in(s.substr(lp + 1, rp - lp - 1));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = strip(tok);
    if (tok.empty()) continue;
    size_t colon = tok.find(':');
    if (colon == std::string::npos) {
      *err = "parameter '" + tok + "' has no type in: " + line;
      return false;
    }
    out->param_types.push_back(strip(tok.substr(colon + 1)));
  }
  size_t colon = s.find(':', rp);
  if (colon == std::string::npos) {
    *err = "no assertion text in proposal: " + line;
    return false;
  }
  out->assertion = strip(s.substr(colon + 1));
  if (!out->assertion.empty() && out->assertion.back() == '.')
    out->assertion.pop_back();
  out->classifier_key.clear();
  return true;
}

inline bool parse_concepts_answer(const std::string& raw,
                                  const PredicateConceptsRequest& req,
                                  ProposalResponse* out, std::string* err) {
  std::set<std::string> have;
  for (const std::string& p : req.existing) have.insert(propdetail::lower(p));
  out->concepts.clear();
  for (const std::string& rawline : split_lines(raw)) {
    std::string line = strip(rawline);
    if (line.empty() || line[0] != '*') continue;
    ConceptSpec c;
    if (!parse_concept_line(line, &c, err)) return false;
    if (have.count(lower(c.name))) {
      out->warnings.push_back("proposal '" + c.name +
                              "' already exists, skipped");
      continue;
    }
    for (const ConceptSpec& k : req.catalog)
      if (lower(k.name) == lower(c.name)) {
        c.classifier_key = k.classifier_key;
        c.param_types = k.param_types;  // the implementation's signature
        break;
      }
    if ((int)out->concepts.size() < req.budget) {
      have.insert(lower(c.name));
      out->concepts.push_back(std::move(c));
    }
  }
  if (out->concepts.empty()) {
    *err = "answer contains no predicate proposals";
    return false;
  }
  return true;
}

}  // namespace propdetail

// ---------------------------------------------------------------------------
// transcripts

struct TranscriptStore {
  // prompt -> recorded responses, consumed front-first on replay
  std::map<std::string, std::deque<std::string>> by_prompt;

  std::optional<std::string> take(const std::string& prompt) {
    auto it = by_prompt.find(prompt);
    if (it == by_prompt.end() || it->second.empty()) return std::nullopt;
    std::string r = std::move(it->second.front());
    it->second.pop_front();
    return r;
  }
};

inline TranscriptStore load_transcript(const std::string& path) {
  TranscriptStore store;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transcript " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (propdetail::strip(line).empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("prompt") || !j.contains("response"))
      throw std::runtime_error("bad transcript line " +
                               std::to_string(lineno) + " in " + path);
    store.by_prompt[j["prompt"].get<std::string>()].push_back(
        j["response"].get<std::string>());
  }
  return store;
}

struct TranscriptWriter {
  std::ofstream out;
  std::mutex mu;

  explicit TranscriptWriter(const std::string& path)
      : out(path, std::ios::app) {
    if (!out) throw std::runtime_error("cannot open transcript " + path);
  }

  void append(const std::string& kind, const std::string& prompt,
              const std::string& response) {
    nlohmann::json j{{"kind", kind}, {"prompt", prompt}, {"response", response}};
    std::lock_guard<std::mutex> lock(mu);
    out << j.dump() << "\n";
    out.flush();
  }
};

// ---------------------------------------------------------------------------
// service backend

struct LlmConfig {
  std::string url;    // full endpoint URL, e.g. https://host/v1/chat/completions
  std::string model;
  std::string api_key;
  double temperature = 0.0;
  int max_retries = 2;  // re-asks after a malformed or unparseable reply
  int timeout_sec = 120;
};

inline LlmConfig llm_config_from_env() {
  LlmConfig cfg;
  if (const char* v = std::getenv("EXOPRED_LLM_URL")) cfg.url = v;
  if (const char* v = std::getenv("EXOPRED_LLM_MODEL")) cfg.model = v;
  if (const char* v = std::getenv("EXOPRED_LLM_KEY")) cfg.api_key = v;
  return cfg;
}

struct Proposer {
  ProposerMode mode = ProposerMode::kHeuristic;
  std::string prompt_dir = "data/fixtures/prompts";
  LlmConfig llm = llm_config_from_env();
  // Live transport and test seam: prompt -> raw reply, nullopt on transport
  // failure. The CLI wires the HTTP client from propose_http.hpp here; unit
  // tests inject canned functions. Unset means no service is reachable.
  std::function<std::optional<std::string>(const std::string&)> transport;
  TranscriptStore replay;                     // used in kReplay mode
  std::shared_ptr<TranscriptWriter> record;   // optional, live modes
};

inline ProposalResponse propose(const ProposalRequest& req, Proposer& prop) {
  const bool cond = req.kind == ProposalRequest::Kind::kConditionSets;
  if (cond && req.cond.budget < 1)
    throw std::invalid_argument("proposal budget must be >= 1");
  if (!cond && req.pred.budget < 1)
    throw std::invalid_argument("proposal budget must be >= 1");
  if (prop.mode == ProposerMode::kHeuristic) return heuristic_propose(req);

  const std::string kind = cond ? "condition_sets" : "predicate_concepts";
  const std::string prompt =
      cond ? render_condition_prompt(req.cond, prop.prompt_dir)
           : render_concepts_prompt(req.pred, prop.prompt_dir);

  std::vector<std::string> warnings;
  for (int attempt = 0; attempt <= prop.llm.max_retries; ++attempt) {
    std::optional<std::string> raw;
    if (prop.mode == ProposerMode::kReplay) {
      raw = prop.replay.take(prompt);
      if (!raw) {
        warnings.push_back("replay transcript has no response for this " +
                           kind + " prompt");
        break;  // nothing more will appear; fall back
      }
    } else {
      if (!prop.transport) {
        warnings.push_back("no transport configured for " + kind + " prompt");
        break;  // nothing to call; fall back
      }
      raw = prop.transport(prompt);
      if (!raw) {
        warnings.push_back("service call failed for " + kind + " prompt");
        break;  // transport-level failure; fall back
      }
      if (prop.record) prop.record->append(kind, prompt, *raw);
    }
    ProposalResponse out;
    std::string err;
    bool ok = cond ? propdetail::parse_condition_answer(*raw, req.cond, &out,
                                                        &err)
                   : propdetail::parse_concepts_answer(*raw, req.pred, &out,
                                                       &err);
    if (ok) {
      out.warnings.insert(out.warnings.begin(), warnings.begin(),
                          warnings.end());
      return out;
    }
    warnings.push_back("attempt " + std::to_string(attempt + 1) +
                       " unparseable: " + err);
  }

  ProposalResponse out = heuristic_propose(req);
  out.from_fallback = true;
  out.warnings = std::move(warnings);
  return out;
}

// ---------------------------------------------------------------------------
// structure-learning adapter

namespace propdetail {

inline std::string lifted_atom_text(const Symbols& sym,
                                    const std::vector<Variable>& vars,
                                    const LiftedAtom& la) {
  std::string s = sym.preds[la.pred].name + "(";
  for (size_t i = 0; i < la.args.size(); ++i) {
    if (i) s += ", ";
    const Variable& v = vars[la.args[i]];
    s += v.name + ":" + sym.types[v.type].name;
  }
  return s + ")";
}

inline std::string pred_signature(const Symbols& sym, PredId p) {
  std::string s = sym.preds[p].name + "(";
  for (size_t i = 0; i < sym.preds[p].param_types.size(); ++i) {
    if (i) s += ", ";
    s += sym.types[sym.preds[p].param_types[i]].name;
  }
  return s + ")";
}

}  // namespace propdetail

// Build the single-process request for one lifted cluster. Candidates are
// the cluster's surviving condition universe in its sorted order, so answer
// indices map straight back into lc.atoms.
inline ConditionSetsRequest cluster_request(const Symbols& sym,
                                            const LiftedCluster& lc,
                                            int budget) {
  ConditionSetsRequest req;
  req.budget = budget;
  ProcessQuery q;
  std::string eff = propdetail::lifted_atom_text(sym, lc.vars, lc.effect);
  (lc.cluster.add ? q.add_effects : q.del_effects).push_back(eff);
  for (int v : lc.effect.args) q.effect_objects.push_back(lc.vars[v].name);
  std::set<PredId> preds;
  for (const LiftedAtom& la : lc.atoms) {
    CandidateAtomInfo c;
    c.text = propdetail::lifted_atom_text(sym, lc.vars, la);
    for (int v : la.args) c.objects.push_back(lc.vars[v].name);
    q.candidates.push_back(std::move(c));
    preds.insert(la.pred);
  }
  for (PredId p : preds)
    req.predicate_listing.push_back("- " + propdetail::pred_signature(sym, p));
  req.processes.push_back(std::move(q));
  return req;
}

// Condition-set hook for StructureOptions::proposer. In heuristic mode the
// hook stays out of the way (empty result defers to the learner's built-in
// ranked generator); in service or replay mode it asks for sets and defers
// likewise when the call falls back.
inline std::function<std::vector<std::vector<int>>(
    const Symbols&, const LiftedCluster&, int)>
structure_proposer(Proposer& prop) {
  return [&prop](const Symbols& sym, const LiftedCluster& lc,
                 int max_candidates) -> std::vector<std::vector<int>> {
    if (prop.mode == ProposerMode::kHeuristic || lc.atoms.empty()) return {};
    ProposalRequest req;
    req.kind = ProposalRequest::Kind::kConditionSets;
    req.cond = cluster_request(sym, lc, max_candidates);
    ProposalResponse res = propose(req, prop);
    if (res.from_fallback || res.condition_sets.empty()) return {};
    return res.condition_sets[0];
  };
}

}  // namespace exo
