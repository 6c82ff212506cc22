#include "catch_amalgamated.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct run_result {
    int code;
    std::string out;
};

run_result run(const std::string& args) {
    std::string cmd = std::string(PIDSX_CLI) + " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), f))
        out.append(buf.data(), n);
    int status = pclose(f);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string spec(const char* name) { return std::string(PIDSX_SPEC_DIR) + "/" + name; }

} // namespace

TEST_CASE("decompose prints redundancies, atoms and consistency") {
    auto r = run("decompose " + spec("copy.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("{1}{2}") != std::string::npos);
    CHECK(r.out.find("0.415037499279") != std::string::npos);

    auto j = run("decompose " + spec("xor.json") + " --format json");
    REQUIRE(j.code == 0);
    auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["schema"] == "pidsx.decompose/1");
    CHECK(doc["consistent"] == true);
    for (const auto& red : doc["redundancies"])
        if (red["antichain"] == "{1}{2}")
            CHECK(std::stod(red["value"].get<std::string>()) == Catch::Approx(1 - std::log2(3.0)).margin(1e-15));
}

TEST_CASE("JSON and CSV carry the same numbers") {
    auto j = run("decompose " + spec("copy.json") + " --format json");
    auto c = run("decompose " + spec("copy.json") + " --format csv");
    REQUIRE(j.code == 0);
    REQUIRE(c.code == 0);
    auto doc = nlohmann::json::parse(j.out);
    std::istringstream in(c.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "section,key,value,stderr,plus,minus");
    std::size_t k = 0;
    while (std::getline(in, line) && line.rfind("redundancy,", 0) == 0) {
        std::vector<std::string> parts{""};
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"')
                quoted = !quoted;
            else if (ch == ',' && !quoted)
                parts.emplace_back();
            else
                parts.back() += ch;
        }
        REQUIRE(parts.size() == 6);
        CHECK(parts[1] == doc["redundancies"][k]["antichain"].get<std::string>());
        REQUIRE(k < doc["redundancies"].size());
        CHECK(parts[2] == doc["redundancies"][k]["value"].get<std::string>());
        CHECK(std::stod(parts[2]) == std::stod(doc["redundancies"][k]["value"].get<std::string>()));
        ++k;
    }
    CHECK(k == doc["redundancies"].size());
}

TEST_CASE("pointwise output") {
    auto r = run("pointwise " + spec("xor.json") + " --at 0,0,0 --antichain '{1}{2}' --format json");
    REQUIRE(r.code == 0);
    auto doc = nlohmann::json::parse(r.out);
    CHECK(std::stod(doc["i_minus"].get<std::string>()) == Catch::Approx(1.0).margin(1e-15));
    CHECK(doc["regime"] == "positive-mass");

    auto red = run("pointwise " + spec("copy.json") + " --at 0,0,0 --antichain '{1}{1,2}' --format json");
    REQUIRE(red.code == 0);
    CHECK(nlohmann::json::parse(red.out).contains("note"));

    auto neg = run("pointwise " + spec("copy.json") + " --at 0,0,1 --antichain '{1}' --format json");
    REQUIRE(neg.code == 0);
    CHECK(nlohmann::json::parse(neg.out)["i_plus"].is_null());

    auto dom = run("pointwise " + spec("gauss3.json") + " --at 0,0,0 --antichain '{1}'");
    CHECK(dom.code == 0);
    CHECK(dom.out.find("dominated-slice") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("decompose " + spec("bad.json")).code == 1);
    CHECK(run("decompose /nonexistent.json").code == 1);
    CHECK(run("pointwise " + spec("copy.json") + " --at 0,0,0 --antichain '{1'").code == 1);
    CHECK(run("pointwise " + spec("copy.json") + " --at 0,0,0 --antichain '{3}'").code == 1);
    CHECK(run("decompose " + spec("gauss3.json") + " --method exact").code == 64);
    CHECK(run("decompose " + spec("gauss3.json") + " --method grid --grid-points 4").code == 64);
    CHECK(run("frobnicate").code == 64);
    CHECK(run("check " + spec("copy.json") + " --suite axioms").code == 0);
}

TEST_CASE("seeded output is byte identical") {
    const auto args = "decompose " + spec("gauss3.json") + " --method mc --mc-samples 20000 --seed 4 --format json";
    auto a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);
    auto c = run("decompose " + spec("gauss3.json") + " --method mc --mc-samples 20000 --seed 5 --format json");
    CHECK(c.out != a.out);
}
