#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "exo/propose.hpp"

using namespace exo;

namespace {

// Three-candidate query: 0 and 1 touch the effect object, 2 does not.
ProcessQuery sample_query() {
  ProcessQuery q;
  q.add_effects = {"JugFilled(?x0:jug)"};
  q.effect_objects = {"?x0"};
  q.candidates = {
      {"JugInMachine(?x0:jug, ?x1:machine)", {"?x0", "?x1"}},
      {"JugWasPlaced(?x0:jug)", {"?x0"}},
      {"HandEmpty(?x2:robot)", {"?x2"}},
  };
  return q;
}

ProposalRequest sample_cond_request(int budget) {
  ProposalRequest req;
  req.kind = ProposalRequest::Kind::kConditionSets;
  req.cond.predicate_listing = {"- JugInMachine(jug, machine)",
                                "- JugWasPlaced(jug)", "- HandEmpty(robot)"};
  req.cond.processes = {sample_query()};
  req.cond.budget = budget;
  return req;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// independent single-slot replacement for the fidelity checks
std::string replace_all(std::string text, const std::string& tag,
                        const std::string& val) {
  size_t pos = 0;
  while ((pos = text.find(tag, pos)) != std::string::npos) {
    text.replace(pos, tag.size(), val);
    pos += val.size();
  }
  return text;
}

const char* kPromptDir = "data/fixtures/prompts";

}  // namespace

TEST_CASE("heuristic condition sets are exhaustive below the cap") {
  ProposalRequest req = sample_cond_request(8);
  Proposer prop;
  ProposalResponse res = propose(req, prop);
  REQUIRE(res.condition_sets.size() == 1);
  // effect-sharing members first, then size, then combination order
  std::vector<std::vector<int>> want = {{0},    {1},    {0, 1},    {2},
                                        {0, 2}, {1, 2}, {0, 1, 2}};
  CHECK(res.condition_sets[0] == want);
  CHECK_FALSE(res.from_fallback);
  CHECK(res.warnings.empty());

  ProposalResponse again = propose(req, prop);
  CHECK(again.condition_sets == res.condition_sets);
}

TEST_CASE("heuristic condition sets stop at the budget") {
  ProposalRequest req = sample_cond_request(3);
  Proposer prop;
  ProposalResponse res = propose(req, prop);
  std::vector<std::vector<int>> want = {{0}, {1}, {0, 1}};
  CHECK(res.condition_sets[0] == want);

  req.cond.budget = 0;
  CHECK_THROWS_AS(propose(req, prop), std::invalid_argument);
}

TEST_CASE("heuristic concepts come from the catalog minus existing") {
  ProposalRequest req;
  req.kind = ProposalRequest::Kind::kPredicateConcepts;
  req.pred.existing = {"Holding", "clearloc"};
  req.pred.catalog = {
      {"PosClear", {"loc"}, "no domino occupies the position", "pos_clear"},
      {"AdjacentTo", {"loc", "loc"}, "orthogonal neighbors", "adjacent"},
      {"ClearLoc", {"loc"}, "nothing sits at the location", "clear_loc"},
  };
  Proposer prop;
  ProposalResponse res = propose(req, prop);
  REQUIRE(res.concepts.size() == 2);
  CHECK(res.concepts[0].name == "AdjacentTo");
  CHECK(res.concepts[0].classifier_key == "adjacent");
  CHECK(res.concepts[1].name == "PosClear");

  req.pred.budget = 1;
  res = propose(req, prop);
  REQUIRE(res.concepts.size() == 1);
  CHECK(res.concepts[0].name == "AdjacentTo");
}

TEST_CASE("condition prompt is the template with slots filled") {
  ProposalRequest req = sample_cond_request(8);
  std::string tmpl =
      read_file(std::string(kPromptDir) + "/condition_proposal.txt");
  REQUIRE(tmpl.find("{PREDICATE_LISTING}") != std::string::npos);
  REQUIRE(tmpl.find("{PROCESS_EFFECTS_AND_CANDIDATES}") != std::string::npos);

  std::string listing =
      "- JugInMachine(jug, machine)\n- JugWasPlaced(jug)\n- HandEmpty(robot)";
  std::string block =
      "Process 0:\n"
      "- Add effects: [JugFilled(?x0:jug)]\n"
      "- Delete effects: []\n"
      "- Candidate atoms:\n"
      "  0: JugInMachine(?x0:jug, ?x1:machine)\n"
      "  1: JugWasPlaced(?x0:jug)\n"
      "  2: HandEmpty(?x2:robot)";
  std::string want = replace_all(tmpl, "{PREDICATE_LISTING}", listing);
  want = replace_all(want, "{PROCESS_EFFECTS_AND_CANDIDATES}", block);
  CHECK(render_condition_prompt(req.cond, kPromptDir) == want);
}

TEST_CASE("concept prompts pick the right template and fill slots") {
  PredicateConceptsRequest req;
  req.types_in_env = "loc: row, col";
  req.predicates_in_env = "* Holding(?x:item)";
  req.goal_predicate = "Toppled";
  req.experience = "state 0: ...";

  for (bool success : {true, false}) {
    req.success = success;
    std::string tmpl = read_file(
        std::string(kPromptDir) + (success ? "/predicate_invention_success.txt"
                                           : "/predicate_invention_failure.txt"));
    std::string want = replace_all(tmpl, "{TYPES_IN_ENV}", req.types_in_env);
    want = replace_all(want, "{PREDICATES_IN_ENV}", req.predicates_in_env);
    want = replace_all(want, "{GOAL_PREDICATE}", req.goal_predicate);
    want = replace_all(want, "{EXPERIENCE_IN_ENV}", req.experience);
    CHECK(render_concepts_prompt(req, kPromptDir) == want);
  }
}

TEST_CASE("implementation prompt fills all five slots") {
  std::string tmpl =
      read_file(std::string(kPromptDir) + "/predicate_implementation.txt");
  std::string want = replace_all(tmpl, "{STRUCT_DEFINITION}", "class State");
  want = replace_all(want, "{TYPES_IN_ENV}", "loc: row, col");
  want = replace_all(want, "{PREDICATES_IN_ENV}", "* Holding(?x:item)");
  want = replace_all(want, "{LISTED_STATES}", "state 0");
  want = replace_all(want, "{PREDICATE_SPECS}", "PosClear: ...");
  std::string got = render_implementation_prompt(
      "class State", "loc: row, col", "* Holding(?x:item)", "state 0",
      "PosClear: ...", kPromptDir);
  CHECK(got == want);
  CHECK(got.find('{') == std::string::npos);
}

TEST_CASE("condition answers parse sets per process") {
  ConditionSetsRequest req;
  req.processes = {sample_query(), sample_query()};
  req.processes[0].candidates.resize(3);
  req.budget = 8;

  ProposalResponse out;
  std::string err;
  std::string raw =
      "Let me think about which atoms matter here.\n"
      "<answer>\n"
      "Process 0:\n"
      "Set 1: [2, 0]\n"
      "Set 2: [1]\n"
      "Process 1:\n"
      "Set 1: [0, 1, 2]\n"
      "</answer>\n";
  REQUIRE(propdetail::parse_condition_answer(raw, req, &out, &err));
  REQUIRE(out.condition_sets.size() == 2);
  std::vector<std::vector<int>> p0 = {{0, 2}, {1}};
  std::vector<std::vector<int>> p1 = {{0, 1, 2}};
  CHECK(out.condition_sets[0] == p0);
  CHECK(out.condition_sets[1] == p1);

  // indices come back sorted and deduplicated
  raw = "<answer>\nProcess 0:\nSet 1: [2, 0, 2]\n</answer>";
  REQUIRE(propdetail::parse_condition_answer(raw, req, &out, &err));
  std::vector<std::vector<int>> dedup = {{0, 2}};
  CHECK(out.condition_sets[0] == dedup);
}

TEST_CASE("malformed condition answers are rejected with a reason") {
  ConditionSetsRequest req;
  req.processes = {sample_query()};
  ProposalResponse out;
  std::string err;

  CHECK_FALSE(propdetail::parse_condition_answer("no tags at all", req, &out,
                                                 &err));
  CHECK(err == "missing <answer> block");

  CHECK_FALSE(propdetail::parse_condition_answer(
      "<answer>\nProcess 0:\nSet 1: [7]\n</answer>", req, &out, &err));
  CHECK(err.find("out of range") != std::string::npos);

  CHECK_FALSE(propdetail::parse_condition_answer(
      "<answer>\nSet 1: [0]\n</answer>", req, &out, &err));
  CHECK(err.find("before any Process") != std::string::npos);

  CHECK_FALSE(propdetail::parse_condition_answer(
      "<answer>\nProcess 0:\nSet 1: nothing\n</answer>", req, &out, &err));
  CHECK(err.find("no [..] index list") != std::string::npos);

  CHECK_FALSE(propdetail::parse_condition_answer(
      "<answer>\nProcess 0:\n</answer>", req, &out, &err));
  CHECK(err.find("no condition sets") != std::string::npos);
}

TEST_CASE("concept answers parse names, params, and catalog keys") {
  PredicateConceptsRequest req;
  req.existing = {"Holding"};
  req.catalog = {
      {"AdjacentTo", {"loc", "loc"}, "orthogonal neighbors", "adjacent"}};

  std::string raw =
      "```plaintext\n"
      "# Predicate Proposals\n"
      "* adjacentto(?a:loc, ?b:loc): the two locations touch orthogonally.\n"
      "* Mystery(?x:item): something without an implementation.\n"
      "* Holding(?x:item): already known.\n"
      "```\n";
  ProposalResponse out;
  std::string err;
  REQUIRE(propdetail::parse_concepts_answer(raw, req, &out, &err));
  REQUIRE(out.concepts.size() == 2);
  CHECK(out.concepts[0].name == "adjacentto");
  CHECK(out.concepts[0].classifier_key == "adjacent");
  CHECK(out.concepts[0].param_types == std::vector<std::string>{"loc", "loc"});
  CHECK(out.concepts[0].assertion ==
        "the two locations touch orthogonally");
  CHECK(out.concepts[1].name == "Mystery");
  CHECK(out.concepts[1].classifier_key.empty());
  REQUIRE(out.warnings.size() == 1);
  CHECK(out.warnings[0].find("Holding") != std::string::npos);

  CHECK_FALSE(propdetail::parse_concepts_answer("* Broken no parens", req,
                                                &out, &err));
  CHECK(err.find("no parameter list") != std::string::npos);
  CHECK_FALSE(propdetail::parse_concepts_answer("nothing proposed", req, &out,
                                                &err));
  CHECK(err.find("no predicate proposals") != std::string::npos);
}

TEST_CASE("service backend retries malformed replies then succeeds") {
  ProposalRequest req = sample_cond_request(8);
  int calls = 0;
  Proposer prop;
  prop.mode = ProposerMode::kLlm;
  prop.transport = [&calls](const std::string&) -> std::optional<std::string> {
    ++calls;
    if (calls == 1) return std::string("garbled reply");
    return std::string("<answer>\nProcess 0:\nSet 1: [1, 0]\n</answer>");
  };
  ProposalResponse res = propose(req, prop);
  CHECK(calls == 2);
  CHECK_FALSE(res.from_fallback);
  std::vector<std::vector<int>> want = {{0, 1}};
  CHECK(res.condition_sets[0] == want);
  REQUIRE(res.warnings.size() == 1);
  CHECK(res.warnings[0].find("unparseable") != std::string::npos);
}

TEST_CASE("service backend falls back to the heuristic") {
  ProposalRequest req = sample_cond_request(8);
  Proposer heur;
  ProposalResponse want = propose(req, heur);

  SUBCASE("after exhausting retries on malformed replies") {
    int calls = 0;
    Proposer prop;
    prop.mode = ProposerMode::kLlm;
    prop.transport = [&calls](const std::string&) -> std::optional<std::string> {
      ++calls;
      return std::string("still garbled");
    };
    ProposalResponse res = propose(req, prop);
    CHECK(calls == 3);  // first ask plus two retries
    CHECK(res.from_fallback);
    CHECK(res.condition_sets == want.condition_sets);
    CHECK(res.warnings.size() == 3);
  }

  SUBCASE("immediately on transport failure") {
    int calls = 0;
    Proposer prop;
    prop.mode = ProposerMode::kLlm;
    prop.transport = [&calls](const std::string&) -> std::optional<std::string> {
      ++calls;
      return std::nullopt;
    };
    ProposalResponse res = propose(req, prop);
    CHECK(calls == 1);
    CHECK(res.from_fallback);
    CHECK(res.condition_sets == want.condition_sets);
    REQUIRE(res.warnings.size() == 1);
    CHECK(res.warnings[0].find("service call failed") != std::string::npos);
  }

  SUBCASE("when no transport is configured") {
    Proposer prop;
    prop.mode = ProposerMode::kLlm;
    ProposalResponse res = propose(req, prop);
    CHECK(res.from_fallback);
    CHECK(res.condition_sets == want.condition_sets);
    REQUIRE(res.warnings.size() == 1);
    CHECK(res.warnings[0].find("no transport") != std::string::npos);
  }
}

TEST_CASE("recorded exchanges replay bit-identically") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "exo_propose_transcript.jsonl";
  fs::remove(path);

  ProposalRequest req = sample_cond_request(8);
  ProposalResponse live;
  {
    Proposer prop;
    prop.mode = ProposerMode::kLlm;
    prop.transport = [](const std::string&) -> std::optional<std::string> {
      return std::string("<answer>\nProcess 0:\nSet 1: [0, 1]\n</answer>");
    };
    prop.record = std::make_shared<TranscriptWriter>(path.string());
    live = propose(req, prop);
    REQUIRE_FALSE(live.from_fallback);
  }

  // the transcript is one JSON object per line with the exchange fields
  {
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j["kind"] == "condition_sets");
    CHECK(j["prompt"].get<std::string>().find("Process 0:") !=
          std::string::npos);
    CHECK(j["response"].get<std::string>().find("<answer>") !=
          std::string::npos);
    CHECK_FALSE(std::getline(in, line));
  }

  Proposer replayer;
  replayer.mode = ProposerMode::kReplay;
  replayer.replay = load_transcript(path.string());
  ProposalResponse replayed = propose(req, replayer);
  CHECK_FALSE(replayed.from_fallback);
  CHECK(replayed.condition_sets == live.condition_sets);
  CHECK(replayed.warnings.empty());

  // a second ask finds the recorded response consumed and falls back
  ProposalResponse miss = propose(req, replayer);
  CHECK(miss.from_fallback);
  REQUIRE(miss.warnings.size() == 1);
  CHECK(miss.warnings[0].find("replay transcript") != std::string::npos);

  fs::remove(path);
}

TEST_CASE("structure hook defers in heuristic mode and maps replay answers") {
  Symbols sym;
  TypeId item = sym.add_type("item");
  PredId prim = sym.add_pred({"Prim", {item}, ""});
  PredId aux = sym.add_pred({"Aux", {item}, ""});
  PredId stat = sym.add_pred({"Stat", {item}, ""});

  LiftedCluster lc;
  lc.cluster.add = true;
  lc.vars = {{"?x0", item}, {"?x1", item}};
  lc.effect = {prim, {0}};
  lc.atoms = {{aux, {0}}, {stat, {1}}};

  Proposer heur;
  auto hook = structure_proposer(heur);
  CHECK(hook(sym, lc, 16).empty());

  ConditionSetsRequest creq = cluster_request(sym, lc, 16);
  REQUIRE(creq.processes.size() == 1);
  CHECK(creq.processes[0].add_effects ==
        std::vector<std::string>{"Prim(?x0:item)"});
  CHECK(creq.processes[0].candidates[0].text == "Aux(?x0:item)");
  CHECK(creq.processes[0].candidates[1].text == "Stat(?x1:item)");
  std::string prompt = render_condition_prompt(creq, kPromptDir);

  Proposer replayer;
  replayer.mode = ProposerMode::kReplay;
  replayer.replay.by_prompt[prompt] = {
      "<answer>\nProcess 0:\nSet 1: [1]\nSet 2: [1, 0]\n</answer>"};
  auto rhook = structure_proposer(replayer);
  std::vector<std::vector<int>> want = {{1}, {0, 1}};
  CHECK(rhook(sym, lc, 16) == want);

  // a cluster whose prompt is absent from the transcript defers as well
  lc.cluster.add = false;
  CHECK(rhook(sym, lc, 16).empty());
}
