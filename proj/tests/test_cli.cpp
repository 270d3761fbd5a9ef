#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hardy/problem.hpp"

using namespace hardy;

namespace {

std::string data(const std::string& name) { return std::string(HARDY_TEST_DATA) + "/" + name; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HARDY_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string pointer_of(const json& j) {
    try {
        parse_problem(j);
    } catch (const SpecError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

// Compares two JSON values, numbers up to an absolute tolerance.
bool close(const json& a, const json& b, double tol) {
    if (a.is_number() && b.is_number()) return std::abs(a.get<double>() - b.get<double>()) <= tol;
    if (a.type() != b.type() || a.size() != b.size()) return false;
    if (a.is_array()) {
        for (size_t i = 0; i < a.size(); ++i)
            if (!close(a[i], b[i], tol)) return false;
        return true;
    }
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it)
            if (!b.contains(it.key()) || !close(it.value(), b[it.key()], tol)) return false;
        return true;
    }
    return a == b;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parsing") {
    SUBCASE("minimal scalar two-point spec") {
        json j = json::parse(R"({"version": 1, "problem": {"correspondence": {"kind": "quiver", "adjacency": [[1]]},
                                 "points": [[[0]], [[0.5]]], "C": [[[0]], [[0.5]]]}})");
        ProblemSpec s = parse_problem(j);
        CHECK(s.k() == 2);
        CHECK(s.b.size() == 2);
        CHECK(s.options.truncation == 6);
    }
    SUBCASE("a 3x2 B against dim H = 3 names both fields") {
        try {
            parse_problem(data("bad_b.json"));
            FAIL("accepted");
        } catch (const SpecError& e) {
            CHECK(e.pointer() == "/problem/B/0");
            CHECK(std::string(e.what()).find("/problem/representation") != std::string::npos);
        }
    }
    SUBCASE("quiver duality") {
        ProblemSpec s = parse_problem(data("quiver_dual.json"));
        CHECK(s.corr.dim() == 1);
        CHECK(s.dual->dim() == 1);
    }
    SUBCASE("schema violations carry JSON pointers") {
        json good = json::parse(R"({"version": 1, "problem": {"correspondence": {"kind": "nest", "dims": [1, 1]}}})");
        CHECK(pointer_of(good) == "<accepted>");
        json j = good;
        j.erase("version");
        CHECK(pointer_of(j) == "/version");
        j = good;
        j["version"] = 2;
        CHECK(pointer_of(j) == "/version");
        j = good;
        j["problem"]["correspondance"] = 1;
        CHECK(pointer_of(j) == "/problem/correspondance");
        j = good;
        j["problem"]["correspondence"]["dims"] = {1, 0};
        CHECK(pointer_of(j) == "/problem/correspondence/dims/1");
        j = good;
        j["problem"]["correspondence"]["kind"] = "torus";
        CHECK(pointer_of(j) == "/problem/correspondence/kind");
        j = good;
        j["options"] = {{"r_grid", {0.5, 1.5}}};
        CHECK(pointer_of(j) == "/options/r_grid/1");
        j = good;
        j["problem"]["T"] = json::array({json::array({1, 2}), json::array({3})});
        CHECK(pointer_of(j) == "/problem/T/1");
        j = good;
        j["problem"]["B"] = json::array({json::array({json::array({1, 0})})});
        j["problem"]["C"] = json::array({json::array({json::array({1, 0}), json::array({0, 1})})});
        CHECK(pointer_of(j) == "/problem/C/0");
    }
}

TEST_CASE("commands") {
    SUBCASE("check on an infeasible scalar problem") {
        Report r = run("check", parse_problem(data("scalar_infeasible.json")));
        CHECK(r.status == "fail");
        CHECK(r.exit_code() == 1);
        CHECK(r.text.find("det -") != std::string::npos);
        CHECK(r.data["specialization"]["family"] == "scalar");
        CHECK(r.data["specialization"]["flags_agree"] == true);
    }
    SUBCASE("solve on a feasible (1,1) nest") {
        Report r = run("solve", parse_problem(data("nest11.json")));
        CHECK(r.exit_code() == 0);
        CHECK(r.data["residual"].get<double>() < 1e-6);
        CHECK(r.text.find("X =") != std::string::npos);
    }
    SUBCASE("solve on an infeasible nest problem") {
        CHECK(run("solve", parse_problem(data("nest11_infeasible.json"))).exit_code() == 1);
    }
    SUBCASE("eval of a constant returns sigma(X_0)") {
        Report r = run("eval", parse_problem(data("eval_const.json")));
        CHECK(r.exit_code() == 0);
        for (const auto& p : r.data["points"]) {
            Mat v = matrix_from_json(p["value"], "");
            CHECK(std::abs(v(0, 0) - cplx(2, 1)) < 1e-14);
        }
    }
    SUBCASE("every command on a sample file") {
        CHECK(run("dual", parse_problem(data("quiver_dual.json"))).exit_code() == 0);
        CHECK(run("distance", parse_problem(data("distance.json"))).exit_code() == 0);
        CHECK(run("dilate", parse_problem(data("dilate_scalar.json"))).exit_code() == 0);
        CHECK(run("verify", parse_problem(data("quiver_dual.json"))).exit_code() == 0);
        CHECK(run("sweep", parse_problem(data("scalar_feasible.json"))).exit_code() == 0);
        CHECK_THROWS_AS(run("plot", parse_problem(data("quiver_dual.json"))), Error);
    }
}

TEST_CASE("property: reports round-trip through their embedded spec") {
    for (const char* file : {"scalar_infeasible.json", "scalar_feasible.json", "nest11.json"}) {
        Report first = run("check", parse_problem(data(file)));
        json text = json::parse(first.to_json().dump());
        Report second = run("check", parse_problem(text["result"]["spec"]));
        CHECK(close(first.data["certificate"], second.data["certificate"], 1e-12));
    }
}

TEST_CASE("property: exit codes depend on the status only") {
    CHECK(exit_code_for("pass") == 0);
    CHECK(exit_code_for("fail") == 1);
    CHECK(exit_code_for("undecided") == 2);
    CHECK(exit_code_for("error") == 3);
    Report r;
    for (const char* s : {"pass", "fail", "undecided", "error"}) {
        r.status = s;
        CHECK(r.exit_code() == exit_code_for(s));
        CHECK(r.to_json()["exit_code"] == exit_code_for(s));
    }
}

TEST_CASE("command-line tool") {
    CHECK(run_cli("check --input " + data("scalar_infeasible.json")) == 1);
    CHECK(run_cli("check --input " + data("scalar_feasible.json")) == 0);
    CHECK(run_cli("check --input " + data("bad_b.json")) == 3);
    CHECK(run_cli("check --input " + data("missing.json")) == 3);
    CHECK(run_cli("frobnicate --input " + data("scalar_feasible.json")) == 3);

    const std::string out = (std::filesystem::temp_directory_path() / "hardy_cli_report.json").string();
    CHECK(run_cli("solve --input " + data("nest11.json") + " --solve-tol 1e-8 --json-out " + out) == 0);
    std::ifstream in(out);
    REQUIRE(in);
    json report = json::parse(in);
    CHECK(report["status"] == "pass");
    CHECK(report["result"]["spec"]["options"]["solve_tol"].get<double>() == 1e-8);
    std::remove(out.c_str());
}

}  // TEST_SUITE
