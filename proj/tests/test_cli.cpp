#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "finsler/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <unistd.h>

using namespace finsler;

namespace {

std::string capture_stdout(const std::function<int()>& fn, int& code) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    try {
        code = fn();
    } catch (...) {
        std::cout.rdbuf(old);
        throw;
    }
    std::cout.rdbuf(old);
    return captured.str();
}

const char* kFunkExpr2 =
    "(sqrt((1-(x1^2+x2^2))*(y1^2+y2^2)+(x1*y1+x2*y2)^2)+(x1*y1+x2*y2))"
    "/(1-(x1^2+x2^2))";

}  // namespace

TEST_CASE("spec files parse with sections, comments and defaults") {
    SpecFile sf = parse_spec_text(
        "# fixture\n"
        "[metric]\n"
        "name = demo\n"
        "dim = 2\n"
        "F = sqrt(y1^2+y2^2) + 0.3*y1\n"
        "[candidates]\n"
        "f = sqrt(y1^2+y2^2)\n"
        "fprime = (x1*y1+x2*y2)/sqrt(y1^2+y2^2)\n"
        "x_min = -0.2 -0.2\n"
        "x_max = 0.2, 0.2\n"
        "seed = 7\n"
        "samples = 60\n");
    CHECK(sf.name == "demo");
    CHECK(sf.dim == 2);
    CHECK(sf.seed == 7);
    CHECK(sf.samples == 60);
    CHECK(sf.x_min == std::vector<double>{-0.2, -0.2});
    CHECK(sf.x_max == std::vector<double>{0.2, 0.2});

    LoadedSpec loaded = load_spec(sf);
    CHECK(loaded.metric.name == "demo");
    CHECK(loaded.f.has_value());
    CHECK(loaded.fprime.has_value());
    CHECK(loaded.metric.domain.seed == 7);
}

TEST_CASE("spec file errors carry file and line context") {
    try {
        parse_spec_text("dim = 2\nbogus line\n", "demo.spec");
        FAIL("expected an error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("demo.spec:2") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_spec_text("dim = two\n"), PreconditionError);
    CHECK_THROWS_AS(parse_spec_text("mystery = 4\n"), PreconditionError);

    // validation failures on load
    CHECK_THROWS_AS(load_spec(parse_spec_text("dim = 2\n")), PreconditionError);
    CHECK_THROWS_AS(
        load_spec(parse_spec_text("dim = 2\nF = y1\nL = y1^2\n")),
        PreconditionError);
    // malformed expression inside a value
    CHECK_THROWS_AS(load_spec(parse_spec_text("dim = 2\nF = sqrt(y1^2+y3^2)\n")),
                    PreconditionError);
    // declared metric fails the homogeneity gate; the error names the
    // Liouville residual
    try {
        load_spec(parse_spec_text("dim = 2\nF = y1^2 + y2^2\n"));
        FAIL("expected a homogeneity error");
    } catch (const HomogeneityError& e) {
        CHECK(std::string(e.what()).find("Liouville residual") != std::string::npos);
    }
    // witness with the wrong degree
    CHECK_THROWS_AS(
        load_spec(parse_spec_text(
            "dim = 2\nF = sqrt(y1^2+y2^2)\nfprime = sqrt(y1^2+y2^2)\n")),
        HomogeneityError);
}

TEST_CASE("analyze on the euclidean preset reports vanishing quantities") {
    cli::CommonOptions o;
    o.format = "json";
    int code = -1;
    std::string out = capture_stdout(
        [&] {
            return cli::cmd_analyze({"", "euclidean"}, {"0,0;1,0"}, o);
        },
        code);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["points"].size() == 1);
    auto& p0 = j["points"][0];
    CHECK(p0["S"].get<double>() == 0.0);
    for (auto& v : p0["chi"]) CHECK(v.get<double>() == 0.0);
    for (auto& row : p0["N"])
        for (auto& v : row) CHECK(v.get<double>() == 0.0);
    CHECK(j["checks"][0]["verdict"] == "pass");
}

TEST_CASE("analyze reports near-zero chi for the funk preset") {
    cli::CommonOptions o;
    o.format = "json";
    int code = -1;
    std::string out = capture_stdout(
        [&] { return cli::cmd_analyze({"", "funk"}, {"0,0;1,0"}, o); }, code);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(out);
    for (auto& v : j["points"][0]["chi"]) CHECK(std::abs(v.get<double>()) <= 1e-6);
    CHECK(j["points"][0]["S"].get<double>() ==
          doctest::Approx(1.5).epsilon(1e-8));  // (n+1) F / 2 with F = 1 here
}

TEST_CASE("analyze rejects malformed points and unknown presets") {
    cli::CommonOptions o;
    CHECK_THROWS_AS(cli::cmd_analyze({"", "euclidean"}, {"0,0"}, o),
                    PreconditionError);
    CHECK_THROWS_AS(cli::cmd_analyze({"", "nope"}, {}, o), PreconditionError);
    CHECK_THROWS_AS(cli::cmd_analyze({"", ""}, {}, o), PreconditionError);
    CHECK_THROWS_AS(cli::parse_phase_point("0,0;0,0", 2), DomainError);
}

TEST_CASE("classify reproduces the fixture verdict patterns") {
    auto run = [&](const std::string& body) {
        char path[] = "/tmp/finsler_spec_XXXXXX";
        int fd = mkstemp(path);
        REQUIRE(fd >= 0);
        {
            std::ofstream out(path);
            out << body;
        }
        close(fd);
        cli::CommonOptions o;
        o.format = "json";
        int code = -1;
        std::string out = capture_stdout(
            [&] { return cli::cmd_classify({path, ""}, o); }, code);
        std::remove(path);
        REQUIRE(code == 0);
        return nlohmann::json::parse(out);
    };

    auto a = run(
        "dim = 2\nF = sqrt(y1^2+y2^2)\nf = sqrt(y1^2+y2^2)\n"
        "fprime = (x1*y1+x2*y2)/sqrt(y1^2+y2^2)\n");
    CHECK(a["classification"]["hamel"] == "pass");
    CHECK(a["classification"]["strong_hamel"] == "pass");
    CHECK(a["classification"]["weak_funk"] == "fail");
    CHECK(a["classification"]["funk"] == "fail");
    CHECK(a["classification"]["witness"] == "supplied");

    auto b = run(std::string("dim = 2\nF = sqrt(y1^2+y2^2)\nf = ") + kFunkExpr2 +
                 "\n");
    CHECK(b["classification"]["hamel"] == "pass");
    CHECK(b["classification"]["weak_funk"] == "pass");
    CHECK(b["classification"]["funk"] == "pass");
    CHECK(b["classification"]["witness"] == "reconstructed");

    auto c = run("dim = 2\nF = sqrt(y1^2+y2^2)\nf = x1*sqrt(y1^2+y2^2)\n");
    CHECK(c["classification"]["hamel"] == "fail");
    CHECK(c["classification"]["strong_hamel"] == "fail");
    CHECK(c["classification"]["weak_funk"] == "fail");
    CHECK(c["classification"]["funk"] == "fail");
}

TEST_CASE("verify suite exit codes and JSON determinism") {
    cli::CommonOptions o;
    o.format = "json";
    int code1 = -1, code2 = -1;
    std::string a = capture_stdout([&] { return cli::cmd_verify("funk", o); }, code1);
    std::string b = capture_stdout([&] { return cli::cmd_verify("funk", o); }, code2);
    CHECK(code1 == 0);
    CHECK(code2 == 0);
    CHECK(a == b);  // byte-identical rerun
    CHECK(a.find("timings") == std::string::npos);

    // squeezing every tolerance to zero forces verdict failures (exit 1)
    cli::CommonOptions tight = o;
    tight.tol_scale = 1e-20;
    int code3 = -1;
    capture_stdout([&] { return cli::cmd_verify("projective", tight); }, code3);
    CHECK(code3 == 1);

    CHECK_THROWS_AS(cli::cmd_verify("bogus", o), PreconditionError);
}

TEST_CASE("geodesic command writes CSV and reports drift") {
    cli::CommonOptions o;
    o.format = "json";
    char path[] = "/tmp/finsler_csv_XXXXXX";
    int fd = mkstemp(path);
    REQUIRE(fd >= 0);
    close(fd);

    int code = -1;
    std::string out = capture_stdout(
        [&] {
            return cli::cmd_geodesic({"", "funk"}, "0.1,0.05;0.5,0.4", 1e-3, 1.0,
                                     path, o);
        },
        code);
    CHECK(code == 0);
    auto j = nlohmann::json::parse(out);
    CHECK(j["stop"] == "completed");
    for (auto& c : j["checks"]) CHECK(c["verdict"] == "pass");

    std::ifstream csv(path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,x1,x2,y1,y2,L,F");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 1001);
    std::remove(path);

    // slit-violating start is rejected before integration
    CHECK_THROWS_AS(cli::cmd_geodesic({"", "euclidean"}, "0,0;0,0", 1e-3, 1.0, "", o),
                    DomainError);
}

TEST_CASE("reports serialize checks with anchors and fail loudly without one") {
    Report r;
    r.checks.push_back(make_check("demo", "plumbing", 0.0, 1.0, 1));
    nlohmann::ordered_json j = r.to_json();
    CHECK(j["checks"][0]["anchor"] == "plumbing");

    Report bad;
    bad.checks.push_back(make_check("demo", "", 0.0, 1.0, 1));
    CHECK_THROWS_AS(bad.to_json(), Error);
}
