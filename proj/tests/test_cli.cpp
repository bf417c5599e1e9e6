#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "algforge/model_io.hpp"
#include "support.hpp"

using namespace algforge;
using namespace testing_support;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(ALGFORGE_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string model(const std::string& name) { return std::string(ALGFORGE_MODELS) + "/" + name; }

std::filesystem::path scratch_dir() {
    auto d = std::filesystem::temp_directory_path() / ("algforge_cli_" + std::to_string(getpid()));
    std::filesystem::create_directories(d);
    return d;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("axiom checks and exit codes") {
    Run ok = run("check --which lie " + model("so3.toml"));
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "lie: pass"));

    Run skew = run("check --which skew " + model("non_skew.toml"));
    CHECK(skew.code == 1);
    CHECK(contains(skew.out, "witness:"));

    Run pert = run("check --which lie " + model("perturbed_so3.toml"));
    CHECK(pert.code == 1);
    CHECK(contains(pert.out, "component 2 = -1"));
    CHECK(run("check --which al " + model("perturbed_so3.toml")).code == 0);
    CHECK(run("check --which leibniz " + model("tangent_r2.toml")).code == 0);

    std::string r2 = model("rank2_al_not_lie.toml");
    CHECK(run("check --which al " + r2).code == 0);
    CHECK(run("check --which strong " + r2).code == 0);
    Run r2lie = run("check --which lie " + r2);
    CHECK(r2lie.code == 1);
    CHECK(contains(r2lie.out, "(e1, e2)"));
}

TEST_CASE("usage and schema errors exit with 2") {
    CHECK(run("check --which lie " + model("malformed.toml")).code == 2);
    CHECK(run("check --which lie " + model("unknown_key.toml")).code == 2);
    CHECK(run("check --which lie " + model("missing.toml")).code == 2);
    CHECK(run("check --which colour " + model("so3.toml")).code == 2);
    CHECK(run("integrate " + model("missing_initial.toml")).code == 2);
    CHECK(run("check --which strong " + model("so3_algebroid.toml")).code == 2);
    CHECK(run("").code == 2);
    CHECK(run("frobnicate x.toml").code == 2);
    CHECK(run("check " + model("so3.toml")).code == 2);
}

TEST_CASE("prolongation output re-checks as a strong higher Lie algebroid") {
    auto dir = scratch_dir();
    std::string out = (dir / "so3_ha2.toml").string();
    CHECK(run("prolong --out " + out + " " + model("so3_algebroid.toml")).code == 0);
    Run lie = run("check --which lie " + out);
    CHECK(lie.code == 0);
    CHECK(contains(lie.out, "identities: 81"));
    CHECK(run("check --which strong " + out).code == 0);
    CHECK(load_model(out).need_ha2() == prolong2(constant_algebroid(so3_constants())));

    std::string pout = (dir / "pert_ha2.toml").string();
    CHECK(run("prolong --out " + pout + " " + model("perturbed_so3.toml")).code == 0);
    CHECK(run("check --which al " + pout).code == 0);
    CHECK(run("check --which lie " + pout).code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("tangent lift output") {
    Run r = run("lift --k 2 " + model("tangent_r2.toml"));
    REQUIRE(r.code == 0);
    Model m = parse_model(r.out);
    CHECK(m.need_algebroid().n == 6);
    CHECK(is_lie(m.need_algebroid()).ok);
    Run s = run("lift --section 1,0 --alpha 1 " + model("tangent_r2.toml"));
    CHECK(s.code == 0);
    CHECK(contains(s.out, "d/dX1"));
}

TEST_CASE("equations of motion") {
    Run st = run("el --form standard " + model("standard_xdd.toml"));
    CHECK(st.code == 0);
    CHECK(contains(st.out, "x.d4 = 0"));
    Run tex = run("el --latex --form standard " + model("standard_xdd.toml"));
    CHECK(contains(tex.out, "\\begin{align*}"));
    Run ep = run("ep " + model("rigid_body_ep.toml"));
    CHECK(ep.code == 0);
    CHECK(contains(ep.out, "symmetry defect: 0"));
    CHECK(contains(ep.out, "conserved: a1*a2.d1 - a1.d1*a2 + 2*a3.d2"));
    Run red = run("el " + model("reduced_example.toml"));
    CHECK(red.code == 0);
    CHECK(contains(red.out, "ADM1: y1.d1 - y2 = 0"));
}

TEST_CASE("integration") {
    Run ab = run("integrate " + model("abelian_ep.toml"));
    CHECK(ab.code == 0);
    CHECK(contains(ab.out, "integrate: pass"));
    CHECK(run("integrate --tol 1e-30 " + model("abelian_ep.toml")).code == 1);

    auto dir = scratch_dir();
    std::string csv = (dir / "rb.csv").string();
    Run rb = run("integrate --json --out " + csv + " " + model("rigid_body_ep.toml"));
    CHECK(rb.code == 0);
    auto j = nlohmann::json::parse(rb.out);
    CHECK(j["verdict"] == "pass");
    CHECK(j.contains("timing_ms"));
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("t,a1,a1.d1,", 0) == 0);
    CHECK(contains(header, "conserved1"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("graded subalgebroids") {
    Run good = run("subalg " + model("aff1_subalgebra.toml"));
    CHECK(good.code == 0);
    Run bad = run("subalg " + model("aff1_bad_subalgebra.toml"));
    CHECK(bad.code == 1);
    CHECK(contains(bad.out, "restriction: fails"));
}

TEST_CASE("seeded evaluation is reproducible") {
    Run a = run("kappa-eval --k 2 " + model("so3.toml"), "ALGFORGE_SEED=7");
    Run b = run("kappa-eval --k 2 " + model("so3.toml"), "ALGFORGE_SEED=7");
    Run c = run("kappa-eval --k 2 " + model("so3.toml"), "ALGFORGE_SEED=8");
    CHECK(a.code == 0);
    CHECK(contains(a.out, "matches_prolongation: yes"));
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    Run g = run("kappa-eval " + model("so3_algebroid.toml"), "ALGFORGE_SEED=7");
    CHECK(g.code == 0);
    CHECK(contains(g.out, "Y1.d1 = Y2*y3 - Y3*y2 + y1.d1"));
}

}
