#include "cli.hpp"

#include <doctest.h>

#include <sstream>

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = stakepool::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(STAKEPOOL_TEST_DATA) + "/" + name; }

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("rewards table") {
    Outcome r = invoke({"rewards", data("example_pos.json")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "1/2"));
    CHECK(contains(r.out, "1/4"));
    CHECK(contains(r.out, "scenario_sha256"));
    CHECK(contains(r.out, "seed             42"));
}

TEST_CASE("csv output is reproducible") {
    Outcome a = invoke({"--format", "csv", "rewards", data("oceanic.json")});
    Outcome b = invoke({"--format", "csv", "rewards", data("oceanic.json")});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "\r\n"));
    CHECK(contains(a.out, "1,1,2,0.5,0"));
}

TEST_CASE("scheme override") {
    Outcome r = invoke({"--scheme", "proportional", "rewards", data("example_pos.json")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "3/4"));
}

TEST_CASE("equilibrium check reports the deviation") {
    Outcome r = invoke({"equilibrium", "check", data("example_pos.json")});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "not NE"));
    CHECK(contains(r.out, "3/5"));
    CHECK(invoke({"equilibrium", "check", data("oceanic.json")}).out.find("not NE") == std::string::npos);
}

TEST_CASE("opt and pos") {
    Outcome o = invoke({"opt", data("example_pos.json")});
    CHECK(o.code == 0);
    Outcome p = invoke({"pos", "--mode", "exhaustive", data("example_pos.json")});
    CHECK(p.code == 0);
    CHECK(contains(p.out, "exhaustive"));
}

TEST_CASE("sybil subcommands") {
    CHECK(invoke({"sybil", "audit", data("oceanic.json")}).code == 0);
    Outcome w = invoke({"sybil", "waterfill", "--stakes", "5", "--budget", "2"});
    CHECK(w.code == 0);
    CHECK(contains(w.out, "2/7"));
}

TEST_CASE("exit codes") {
    CHECK(invoke({"rewards", data("bad_field.json")}).code == 2);
    CHECK(invoke({"rewards", data("missing.json")}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"--scheme", "nope", "rewards", data("example_pos.json")}).code == 2);
    CHECK(invoke({"equilibrium", "construct", data("small_large.json")}).code == 3);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("verify") {
    Outcome ok = invoke({"verify", "--criteria", "1"});
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "PASS"));
    Outcome bad = invoke({"verify", "--criteria", "5"});
    CHECK(bad.code == 4);
    CHECK(contains(bad.out, "FAIL"));
}
