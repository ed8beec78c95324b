#include <doctest.h>

#include "soatk/soa.hpp"
#include "toy_set_adapter.hpp"

using namespace soatk;
using testsupport::SetAdapter;
using testsupport::SetMatchingSystem;

namespace {

struct Fixture {
  SetAdapter a;
  soa::Obj empty, point;
  soa::Map gen;  // ∅ -> {•}

  Fixture() {
    empty = a.add_object({});
    point = a.add_object({"pt"});
    gen = a.add_map(empty, point, {});
  }
};

}  // namespace

TEST_CASE("factorizing ∅ -> {•} attaches one cell and delta is an isomorphism") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.add_map(fx.empty, fx.point, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  CHECK(cert.stabilized);
  CHECK(cert.stages_used == 1);
  REQUIRE(cert.stages.size() == 1);
  CHECK(cert.stages[0].match.squares.size() == 1);
  // delta is a bijection between singletons.
  CHECK(fx.a.elems(fx.a.src(cert.delta)).size() == 1);
  CHECK(soa::replay_certificate(fx.a, cert));
}

TEST_CASE("a map already passing all probes factors with identity gamma") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  // Identity on {•} lifts against every square of ∅ -> {•}.
  const soa::Map f = fx.a.identity(fx.point);
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  CHECK(cert.stabilized);
  CHECK(cert.stages_used == 0);
  CHECK(fx.a.equal(cert.gamma, fx.a.identity(fx.point)));
  CHECK(fx.a.equal(cert.delta, f));
}

TEST_CASE("budget exhaustion returns an unstabilized certificate") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.add_map(fx.empty, fx.point, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {0, "system"});
  CHECK_FALSE(cert.stabilized);
  CHECK(cert.stages_used == 0);
  CHECK(soa::replay_certificate(fx.a, cert));
}

TEST_CASE("probes=none runs to the stage limit without stabilizing") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.add_map(fx.empty, fx.point, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {1, "none"});
  CHECK_FALSE(cert.stabilized);
  CHECK(cert.stages_used == 1);
}

TEST_CASE("verify_rlp: identity target always lifts via the bottom map") {
  SetAdapter a;
  auto x = a.add_object({"0", "1"});
  auto p = a.identity(x);
  auto l = a.identity(x);
  soa::GenSquare sq{l, a.identity(x), a.identity(x)};
  auto res = soa::verify_rlp(a, p, std::span<const soa::GenSquare>{&sq, 1});
  REQUIRE(res.size() == 1);
  CHECK(res[0].lift.has_value());
}

TEST_CASE("verify_rlp: surjection of finite sets lifts against ∅ -> {•}") {
  Fixture fx;
  auto two = fx.a.add_object({"x", "y"});
  auto p = fx.a.add_map(two, fx.point, {{"x", "pt"}, {"y", "pt"}});
  soa::GenSquare sq{fx.gen, fx.a.add_map(fx.empty, two, {}),
                    fx.a.add_map(fx.point, fx.point, {{"pt", "pt"}})};
  auto res = soa::verify_rlp(fx.a, p, std::span<const soa::GenSquare>{&sq, 1});
  REQUIRE(res.size() == 1);
  CHECK(res[0].lift.has_value());
}

TEST_CASE("verify_rlp: map into the empty set yields a counterexample tag") {
  Fixture fx;
  auto p = fx.a.add_map(fx.empty, fx.point, {});
  soa::GenSquare sq{fx.gen, fx.a.add_map(fx.empty, fx.empty, {}),
                    fx.a.add_map(fx.point, fx.point, {{"pt", "pt"}})};
  auto res = soa::verify_rlp(fx.a, p, std::span<const soa::GenSquare>{&sq, 1});
  REQUIRE(res.size() == 1);
  CHECK_FALSE(res[0].lift.has_value());
  CHECK(res[0].counterexample == "exhausted");
}

TEST_CASE("verify_rlp rejects a non-commuting square") {
  SetAdapter a;
  auto one = a.add_object({"u"});
  auto two = a.add_object({"x", "y"});
  auto l = a.add_map(one, two, {{"u", "x"}});
  auto p = a.add_map(two, two, {{"x", "x"}, {"y", "y"}});
  // bottom∘l sends u to y but p∘top sends u to x.
  soa::GenSquare bad{l, a.add_map(one, two, {{"u", "x"}}),
                     a.add_map(two, two, {{"x", "y"}, {"y", "x"}})};
  CHECK_THROWS_AS(soa::verify_rlp(a, p, std::span<const soa::GenSquare>{&bad, 1}),
                  soa::EngineError);
}

TEST_CASE("lift_through_factorization returns the proof's lift") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.add_map(fx.empty, fx.point, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  REQUIRE(cert.stabilized);

  // Square of the generator into delta.
  auto zl = fx.a.src(cert.delta);
  soa::GenSquare sq{fx.gen, fx.a.add_map(fx.empty, zl, {}),
                    fx.a.add_map(fx.point, fx.point, {{"pt", "pt"}})};
  auto res = soa::lift_through_factorization(fx.a, sys, cert, sq);
  CHECK(fx.a.equal(fx.a.compose(cert.delta, res.lift), sq.bottom));
  // Independent brute-force lift agrees.
  auto brute = fx.a.find_lift(sq.gen, sq.top, cert.delta, sq.bottom);
  REQUIRE(brute.has_value());
  CHECK(fx.a.equal(res.lift, *brute));
}

TEST_CASE("lift through a 0-stage certificate reduces to a direct lift") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.identity(fx.point);
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  REQUIRE(cert.stages_used == 0);
  soa::GenSquare sq{fx.gen, fx.a.add_map(fx.empty, fx.point, {}),
                    fx.a.add_map(fx.point, fx.point, {{"pt", "pt"}})};
  auto res = soa::lift_through_factorization(fx.a, sys, cert, sq);
  CHECK(res.stage == 0);
  CHECK_FALSE(res.via_cells);
}

TEST_CASE("induced_map refuses a non-functorial matching system") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  const soa::Map f = fx.a.add_map(fx.empty, fx.point, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  soa::MapOfMaps g{fx.a.identity(fx.empty), fx.a.identity(fx.point)};
  CHECK_THROWS_AS(soa::induced_map(fx.a, sys, g, cert, cert), soa::EngineError);
}

TEST_CASE("monotonicity: probe squares passed never shrink along stages") {
  Fixture fx;
  SetMatchingSystem sys(fx.a, {fx.gen});
  auto two = fx.a.add_object({"x", "y"});
  const soa::Map f = fx.a.add_map(fx.empty, two, {});
  auto cert = soa::soa_factorize(fx.a, sys, f, {8, "system"});
  REQUIRE(cert.stabilized);
  std::size_t prev_failures = static_cast<std::size_t>(-1);
  for (const auto& st : cert.stages) {
    const auto failures = sys.probe_failures(st.rho).size();
    CHECK(failures <= prev_failures);
    prev_failures = failures;
  }
  CHECK(sys.probe_failures(cert.delta).empty());
}
