#include <doctest.h>

#include <fstream>
#include <sstream>

#include "exo/listing.hpp"

using namespace exo;

static std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

static const char* kFixtures[] = {
    "data/fixtures/listings/coffee_given.txt",
    "data/fixtures/listings/grow_given.txt",
    "data/fixtures/listings/boil_given.txt",
    "data/fixtures/listings/domino_given.txt",
    "data/fixtures/listings/fan_given.txt",
    "data/fixtures/listings/coffee_learned.txt",
    "data/fixtures/listings/grow_learned.txt",
    "data/fixtures/listings/boil_learned.txt",
    "data/fixtures/listings/domino_learned.txt",
    "data/fixtures/listings/fan_learned.txt",
};

TEST_CASE("every listing fixture round-trips byte-identically") {
  for (const char* path : kFixtures) {
    CAPTURE(path);
    std::string text = slurp(path);
    Symbols sym;
    std::vector<ParsedListing> blocks = parse_listings(text, sym);
    REQUIRE(!blocks.empty());
    std::string out = print_listing_file(sym, blocks, CommaStyle::kPreserve);
    CHECK(out == text);
  }
}

TEST_CASE("parsed fields of a known block") {
  Symbols sym;
  auto blocks = parse_listings(slurp("data/fixtures/listings/coffee_given.txt"), sym);
  REQUIRE(blocks.size() == 7);
  const ProcessSchema& noop = blocks[0].schema;
  CHECK(noop.name == "NoOp");
  CHECK(noop.endogenous);
  CHECK(noop.is_noop());
  CHECK(noop.params.size() == 1);
  CHECK(noop.ignore_effects.size() == 2);
  CHECK(noop.delay.kind == DelayDistribution::kConstant);
  CHECK(blocks[0].trailing_comma);
  CHECK_FALSE(blocks[6].trailing_comma);  // last block in a given file

  const ProcessSchema& pour = blocks[4].schema;
  CHECK(pour.name == "PourFromCup");
  CHECK(pour.params.size() == 4);
  CHECK(pour.cond_start.size() == 2);
  CHECK(pour.add_eff.size() == 1);
  CHECK(pour.del_eff.size() == 2);
  CHECK(pour.option.skill == "Pour");
  CHECK(pour.option.args.size() == 3);
  CHECK(pour.delay.mean == doctest::Approx(2.0));
  CHECK(pour.delay.std == doctest::Approx(0.1));
}

TEST_CASE("exogenous blocks omit ignore and option lines") {
  Symbols sym;
  auto blocks = parse_listings(slurp("data/fixtures/listings/coffee_learned.txt"), sym);
  REQUIRE(blocks.size() == 9);
  const ProcessSchema& op3 = blocks[7].schema;
  CHECK(op3.name == "Op3");
  CHECK_FALSE(op3.endogenous);
  CHECK(op3.cond_start.size() == 2);
  CHECK(op3.cond_overall.size() == 2);
  CHECK(op3.log_strength == doctest::Approx(1.7168));
  CHECK(op3.delay.mean == doctest::Approx(17.3098));
  std::string printed = print_listing(sym, op3);
  CHECK(printed.find("Ignore Effects") == std::string::npos);
  CHECK(printed.find("Option Spec") == std::string::npos);
}

TEST_CASE("given-file comma style matches the shipped convention") {
  Symbols sym;
  std::string text = slurp("data/fixtures/listings/fan_given.txt");
  auto blocks = parse_listings(text, sym);
  CHECK(print_listing_file(sym, blocks, CommaStyle::kGivenFile) == text);
}
