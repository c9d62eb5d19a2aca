#include <gtest/gtest.h>

#include "nrc/instance.hpp"
#include "nrc/roster.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

const char* kMinimal = R"(instance mini n=8 d=14 s=2
shifts:
1 D 420 480
2 N 1380 480
employees:
1 3360
2 3360
3 3360
4 3360
5 3360
6 3360
7 3360
8 3360
coverage:
all D 3
all N 3
)";

}  // namespace

TEST(Instance, ParsesMinimalText) {
  const ProblemInstance p = parse_instance(kMinimal);
  EXPECT_EQ(p.n, 8);
  EXPECT_EQ(p.d, 14);
  EXPECT_EQ(p.s, 2);
  EXPECT_EQ(p.employees.size(), 8u);
  EXPECT_EQ(p.shift(1).label, "D");
  EXPECT_EQ(p.shift(2).label, "N");
  for (int day = 0; day < 14; ++day) {
    EXPECT_EQ(p.required(day, 1), 3);
    EXPECT_EQ(p.required(day, 2), 3);
  }
}

TEST(Instance, ZeroEmployeesIsSemanticError) {
  const std::string text = "instance empty n=0 d=14 s=2\n";
  try {
    parse_instance(text);
    FAIL() << "expected a semantic error";
  } catch (const SemanticError& e) {
    EXPECT_NE(std::string(e.what()).find("n must be"), std::string::npos);
  }
}

TEST(Instance, MalformedLinesAreParseErrors) {
  EXPECT_THROW(parse_instance("instance x n=1 d=1\n"), ParseError);
  EXPECT_THROW(parse_instance("shifts:\n1 D 0 60\n"), ParseError);
  std::string bad = kMinimal;
  bad += "constraints:\nsoft pattern \"D X\" max=0 window=1..14 weight=1 name=p\n";
  EXPECT_THROW(parse_instance(bad), ParseError);
}

TEST(Instance, ReportsLineOfError) {
  std::string bad = kMinimal;
  bad += "constraints:\nsoft frobnicate weight=1\n";
  try {
    parse_instance(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 18);
  }
}

TEST(Instance, SemanticChecksOnInvariants) {
  std::string over = kMinimal;
  over.replace(over.find("all D 3"), 7, "all D 9");
  EXPECT_THROW(parse_instance(over), SemanticError);
  std::string window = kMinimal;
  window += "constraints:\nsoft pattern \"D\" max=0 window=1..15 weight=1 name=p\n";
  EXPECT_THROW(parse_instance(window), SemanticError);
}

TEST(Instance, CommentsAndOptionalFields) {
  const ProblemInstance p = parse_instance(R"(# comment line
instance opt n=2 d=3 s=1   # trailing comment
shifts:
1 D 480 480 rn
employees:
1 960 skills=rn fixed=(2,D);(3,O) group=part
2 480 skills=rn
coverage:
all D 1
2 D 2
constraints:
hard min_rest=600
soft workload weight=2 scope=group:part name=wl
)");
  EXPECT_EQ(p.shift(1).required_skill.value(), "rn");
  EXPECT_EQ(p.employees[0].group, "part");
  ASSERT_EQ(p.employees[0].fixed_assignments.size(), 2u);
  EXPECT_EQ(p.fixed_at(0, 1).value(), 1);
  EXPECT_EQ(p.fixed_at(0, 2).value(), kDayOff);
  EXPECT_FALSE(p.fixed_at(1, 1).has_value());
  EXPECT_EQ(p.required(1, 1), 2);
  EXPECT_EQ(p.hard.min_rest_minutes, 600);
  EXPECT_EQ(p.soft_constraints[0].scope, std::vector<int>{0});
  EXPECT_EQ(p.groups(), (std::vector<std::string>{"part", "default"}));  // first-appearance order
  EXPECT_EQ(p.group_index(1), 1);
  EXPECT_EQ(default_tau(p), 2);
}

TEST(Instance, RoundTripOverRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const ProblemInstance p = tu::random_instance(seed, 3 + seed % 6, 5 + seed % 20, 1 + seed % 3);
    const std::string text = serialize_instance(p);
    const ProblemInstance q = parse_instance(text);
    EXPECT_EQ(p, q) << text;
    EXPECT_EQ(serialize_instance(q), text);
  }
}

TEST(Instance, ShippedFixturesParse) {
  for (const char* f : {"millar.inst", "valouxis.inst", "blocky.inst"}) {
    const ProblemInstance p = load_instance(tu::data_path(f));
    EXPECT_NO_THROW(p.validate());
    EXPECT_FALSE(p.soft_constraints.empty());
  }
}

TEST(Roster, SwapExchangesCells) {
  const ProblemInstance p = parse_instance(kMinimal);
  Roster r(8, 14);
  r.set(0, 2, 1);
  r.set(1, 2, 2);
  const Roster out = apply_move(p, r, CandidateMove::swap(0, 1, 2));
  EXPECT_EQ(out.at(0, 2), 2);
  EXPECT_EQ(out.at(1, 2), 1);
  EXPECT_EQ(apply_move(p, out, CandidateMove::swap(0, 1, 2)), r);
}

TEST(Roster, ReplaceTouchesOneCell) {
  ProblemInstance p = parse_instance(kMinimal);
  Roster r = tu::random_roster(p, 3);
  r.set(0, 2, 1);
  const Roster out = apply_move(p, r, CandidateMove::replace(0, 2, kDayOff));
  EXPECT_EQ(out.at(0, 2), kDayOff);
  int differing = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 14; ++j) differing += out.at(i, j) != r.at(i, j);
  EXPECT_EQ(differing, 1);
}

TEST(Roster, SwapIsAnInvolution) {
  const ProblemInstance p = parse_instance(kMinimal);
  std::mt19937_64 rng(4);
  Roster r = tu::random_roster(p, 8);
  for (int t = 0; t < 500; ++t) {
    const int a = rng() % 8, b = rng() % 8, day = rng() % 14;
    if (a == b || r.at(a, day) == r.at(b, day)) continue;
    const auto m = CandidateMove::swap(a, b, day);
    EXPECT_EQ(apply_move(p, apply_move(p, r, m), m), r);
    r = apply_move(p, r, m);
  }
}

TEST(Roster, RejectsInvalidMoves) {
  const ProblemInstance p = parse_instance(R"(instance f n=2 d=2 s=1
shifts:
1 D 480 480
employees:
1 480 fixed=(1,D)
2 480
coverage:
all D 1
)");
  Roster r(2, 2);
  r.set(0, 0, 1);
  r.set(1, 1, 1);
  EXPECT_THROW(apply_move(p, r, CandidateMove::swap(0, 1, 0)), MoveError);     // fixed cell
  EXPECT_THROW(apply_move(p, r, CandidateMove::swap(0, 0, 1)), MoveError);     // same employee
  EXPECT_THROW(apply_move(p, r, CandidateMove::replace(1, 1, 1)), MoveError);  // null move
  EXPECT_THROW(apply_move(p, r, CandidateMove::replace(1, 1, 2)), MoveError);  // no such shift
  EXPECT_THROW(apply_move(p, r, CandidateMove::replace(2, 0, 1)), MoveError);
  EXPECT_THROW(apply_move(p, r, CandidateMove::replace(1, 5, 1)), MoveError);
}

TEST(Roster, TabuRecordsFollowTheTupleDefinition) {
  const ProblemInstance p = parse_instance(kMinimal);
  Roster r(8, 14);
  r.set(0, 3, 1);
  r.set(1, 3, 2);
  const TabuRecord swap = tabu_record_of(p, r, CandidateMove::swap(0, 1, 3));
  EXPECT_EQ(swap.kind, TabuRecord::Kind::Swap);
  EXPECT_EQ(swap.emp_a, 0);
  EXPECT_EQ(swap.emp_b, 1);
  EXPECT_EQ(swap.shift_a, 1);
  EXPECT_EQ(swap.shift_b, 2);
  EXPECT_EQ(swap.day, 3);
  const TabuRecord rep = tabu_record_of(p, r, CandidateMove::replace(0, 3, 2));
  EXPECT_EQ(rep.kind, TabuRecord::Kind::Replace);
  EXPECT_EQ(rep.emp_a, 0);
  EXPECT_EQ(rep.emp_b, -1);
  EXPECT_EQ(rep.shift_a, 1);
  EXPECT_EQ(rep.shift_b, 2);
  EXPECT_EQ(rep.day, 3);
}

TEST(Roster, DistinctMovesGiveDistinctRecordsOnToyRosters) {
  const ProblemInstance p = parse_instance(R"(instance t n=2 d=2 s=2
shifts:
1 D 420 480
2 N 1380 480
employees:
1 0
2 0
coverage:
all D 0
)");
  // Every one of the 3^4 rosters, every valid move.
  for (int code = 0; code < 81; ++code) {
    Roster r(2, 2);
    int c = code;
    for (int cell = 0; cell < 4; ++cell, c /= 3) r.set(cell / 2, cell % 2, static_cast<Shift>(c % 3));
    std::vector<CandidateMove> moves;
    for (int day = 0; day < 2; ++day) {
      if (r.at(0, day) != r.at(1, day)) {
        moves.push_back(CandidateMove::swap(0, 1, day));
        moves.push_back(CandidateMove::swap(1, 0, day));
      }
      for (int e = 0; e < 2; ++e)
        for (Shift k = 0; k <= 2; ++k)
          if (r.at(e, day) != k) moves.push_back(CandidateMove::replace(e, day, k));
    }
    for (std::size_t a = 0; a < moves.size(); ++a)
      for (std::size_t b = a + 1; b < moves.size(); ++b)
        EXPECT_NE(tabu_record_of(p, r, moves[a]), tabu_record_of(p, r, moves[b]));
  }
}

TEST(Roster, BinaryViewRoundTrips) {
  const ProblemInstance p = parse_instance(kMinimal);
  const Roster r = tu::random_roster(p, 5);
  const auto bits = r.to_binary(2);
  ASSERT_EQ(bits.size(), 8u * 14 * 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 14; ++j) {
      const int ones = bits[(i * 14 + j) * 2] + bits[(i * 14 + j) * 2 + 1];
      EXPECT_EQ(ones, r.at(i, j) ? 1 : 0);
    }
  EXPECT_EQ(Roster::from_binary(8, 14, 2, bits), r);
}

TEST(Roster, FileRoundTrip) {
  const ProblemInstance p = parse_instance(kMinimal);
  const Roster r = tu::random_roster(p, 6);
  const std::string text = serialize_roster(p, r);
  EXPECT_EQ(parse_roster(p, text), r);
  EXPECT_THROW(parse_roster(p, "roster mini n=7 d=14\n"), std::exception);
}
