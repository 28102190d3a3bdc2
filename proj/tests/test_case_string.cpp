#include <catch_amalgamated.hpp>

#include "pnspec/case_string.hpp"

using namespace pnspec;

TEST_CASE("valid case strings") {
  const auto a = parse_case("aiii:k=2,n=4");
  CHECK(a.family == CaseFamily::AIII);
  CHECK(a.k == 2);
  CHECK(a.n == 4);
  CHECK(parse_case("aiii:n=4,k=1").k == 1);
  CHECK(parse_case("ci:n=3").family == CaseFamily::CI);
  CHECK(parse_case("diii:n=4").n == 4);
  const auto b = parse_case("bdi:m=7");
  CHECK(b.family == CaseFamily::BDI);
  CHECK(b.n == 5);
  CHECK(build_case(b).name() == "bdi:m=7");
  CHECK(build_case(parse_case("aiii:k=1,n=2")).name() == "aiii:k=1,n=2");
}

TEST_CASE("invalid case strings") {
  for (const char* text : {"aiii:k=9,n=3", "aiii:k=0,n=3", "aiii:n=3", "ci", "ci:", "ci:n=", "ci:n=x", "ci:n=-1",
                           "ci:n=2,n=3", "ci:n=2,m=1", "diii:n=1", "bdi:m=3", "bdi:n=4", "foo:n=2", "CI:n=2",
                           "ci:n=2,", "ci:n 2"}) {
    INFO(text);
    CHECK_THROWS_AS(parse_case(text), UsageError);
  }
}
