#include "quantact/session.hpp"

#include <doctest.h>

using namespace quantact;

namespace {

SessionConfig session(const std::string& text) { return SessionConfig::from(Config::parse(text)); }

}  // namespace

TEST_CASE("config sections, comments and defaults") {
    const auto c = Config::parse("action = builtin:reflection  # top level\n[basis]\nkind = monomials\ndegree = 3\n");
    CHECK(c.get("session", "action") == "builtin:reflection");
    CHECK(c.get_int("basis", "degree", 0) == 3);
    CHECK(c.get_double("numeric", "hbar", 0.25) == 0.25);
    CHECK_FALSE(c.has("basis", "functions"));
}

TEST_CASE("config errors carry line numbers") {
    CHECK_THROWS_WITH_AS(Config::parse("a = 1\n[oops\n"), "config line 2: malformed section header", ConfigError);
    CHECK_THROWS_WITH_AS(Config::parse("\nnot a pair\n"), "config line 2: expected 'key = value'", ConfigError);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[basis]\ndegree = two\n").get_int("basis", "degree", 0), ConfigError);
    CHECK_THROWS_AS(session("action = builtin:reflection\ntask = cohomology\nbogus = 1\n"), ConfigError);
}

TEST_CASE("cohomology task on the reflection") {
    const auto r = run_task(session("action = builtin:reflection\ntask = cohomology\norder = 2\n"
                                    "[basis]\nkind = monomials\ndegree = 2\n"));
    CHECK(r.report.passed());
    CHECK(r.report.str().find("H^1") != std::string::npos);
}

TEST_CASE("mc-check separates cocycle and perturbed phase") {
    const std::string head = "action = builtin:galilean\ntask = mc-check\norder = 1\n[system]\nconstants = m=1\n";
    CHECK(run_task(session(head + "phase = m*v*x - (1/2)*m*v^2*t\n")).report.passed());
    CHECK_FALSE(run_task(session(head + "phase = v*x^2\n")).report.passed());
}

TEST_CASE("mc-solve writes a solution artifact") {
    const auto r = run_task(session("action = builtin:rotations:4\ntask = mc-solve\norder = 2\nseed = 3\n"
                                    "[basis]\nkind = functions\nfunctions = 1\n[solve]\nstart = random-cocycle\n"));
    CHECK(r.report.passed());
    CHECK(r.artifacts.count("solution.txt") == 1);
}

TEST_CASE("unknown task and action are errors") {
    CHECK_THROWS(run_task(session("action = builtin:reflection\ntask = nonsense\n")));
    CHECK_THROWS(run_task(session("action = builtin:nowhere\ntask = check-action\n")));
}
