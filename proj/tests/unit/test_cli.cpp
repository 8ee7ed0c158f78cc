#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>

namespace {

struct Run {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

// Unique per process: ctest runs each test case in its own process, possibly in parallel.
std::filesystem::path scratch(const std::string& stem) {
    static int counter = 0;
    return std::filesystem::temp_directory_path() /
           (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
}

Run run(const std::vector<std::string>& args) {
    const auto out = scratch("fz_cli_out");
    const auto err = scratch("fz_cli_err");
    std::string cmd = quote(FZ_CLI_PATH);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " > " + quote(out.string()) + " 2> " + quote(err.string());
    const int status = std::system(cmd.c_str());
    Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

nlohmann::json section(const nlohmann::json& doc, const std::string& name) {
    for (const auto& s : doc["sections"]) {
        if (s["name"] == name) return s;
    }
    ADD_FAILURE() << "no section " << name;
    return {};
}

const std::string kTernary = "kind=cantor m=2 a=1/3";

}  // namespace

TEST(Cli, SetDescribesCantor) {
    const auto r = run({"set", "--set", kTernary, "--format", "json"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["schema"], "fractal-zeta/1");
    EXPECT_EQ(doc["command"], "set");
    const auto s = section(doc, "set");
    EXPECT_NEAR(s["fields"]["D_hint"].get<double>(), std::log(2.0) / std::log(3.0), 1e-15);
    EXPECT_EQ(section(doc, "gap table")["rows"].size(), 8u);
}

TEST(Cli, SetDescribesCircle) {
    const auto r = run({"set", "--set", "kind=sphere N=2", "--format", "json"});
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(section(nlohmann::json::parse(r.out), "set")["fields"]["D_hint"].get<double>(), 1.0);
}

TEST(Cli, MalformedCantorIsUsageError) {
    const auto r = run({"set", "--set", "kind=cantor m=2 a=2"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("m*a >= 1"), std::string::npos);
    EXPECT_NE(r.err.find("line 1"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).exit_code, 2);
    EXPECT_EQ(run({"bogus"}).exit_code, 2);
    EXPECT_EQ(run({"set"}).exit_code, 2);
    EXPECT_EQ(run({"check", "--suite", "nope"}).exit_code, 2);
    EXPECT_EQ(run({"zeta", "eval", "--set", kTernary, "--re", "1:2"}).exit_code, 2);
    EXPECT_EQ(run({"set", "--set", kTernary, "--format", "xml"}).exit_code, 2);
    EXPECT_EQ(run({"set", "-s", kTernary}).exit_code, 2);
    EXPECT_EQ(run({"--help"}).exit_code, 0);
}

TEST(Cli, SpecFile) {
    const auto p = scratch("fz_cli_spec");
    std::ofstream(p) << "c: kind=cantor m=2 a=1/3\nkind=grill base=c d=1\n";
    const auto r = run({"set", "--set", p.string(), "--format", "json"});
    std::filesystem::remove(p);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(section(nlohmann::json::parse(r.out), "set")["fields"]["kind"], "grill");
}

TEST(Cli, CheckFunctionalEquationPasses) {
    const auto r = run({"check", "--suite", "functional-eq", "--set", kTernary, "--format", "json"});
    ASSERT_EQ(r.exit_code, 0) << r.out;
    const auto s = nlohmann::json::parse(r.out)["sections"][0];
    EXPECT_EQ(s["fields"]["result"], "PASS");
    for (const auto& row : s["rows"]) EXPECT_LT(row[1].get<double>(), 1e-8);
}

TEST(Cli, CheckSphereResidueContentEquality) {
    const auto r = run({"check", "--suite", "residue-content", "--set", "kind=sphere N=3"});
    ASSERT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NE(r.out.find("equality residue = (N-D) M"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, CheckRankDeficientUnionFails) {
    const auto r = run({"check", "--suite", "quasi", "--set",
                        "a: kind=cantor m=2 a=1/4; b: kind=cantor m=4 a=1/16; kind=union component=a@0 component=b@2"});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("certificate FAILED (rank deficient)"), std::string::npos);
    EXPECT_EQ(run({"check", "--suite", "quasi", "--moduli", "2,3", "--D", "log(2)/log(3)"}).exit_code, 0);
}

TEST(Cli, CheckDti) { EXPECT_EQ(run({"check", "--suite", "dti"}).exit_code, 0); }

TEST(Cli, TubeExportBlocks) {
    const auto r = run({"tube", "export", "--set", "kind=sphere N=2", "--samples", "4"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    int block = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# block", 0) == 0) ++block;
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        if (block == 2) {
            double tau = 0.0, g = 0.0;
            std::istringstream(line) >> tau >> g;
            EXPECT_NEAR(g, 4.0 * std::numbers::pi, 1e-12);
        }
    }
    EXPECT_EQ(block, 2);
    EXPECT_EQ(rows, 8);
    EXPECT_EQ(run({"tube", "export"}).exit_code, 2);
}

TEST(Cli, ZetaEvalGrid) {
    const auto r = run({"zeta", "eval", "--set", kTernary, "--re", "0.7:0.9:3", "--im", "-1:1:2", "--delta", "1/6", "--format", "csv"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "re,im,value_re,value_im,error,status\r");
    int rows = 0;
    while (std::getline(in, line) && line != "\r") ++rows;
    EXPECT_EQ(rows, 6);
}

TEST(Cli, ZetaDivergenceExitsThree) {
    const auto r = run({"zeta", "eval", "--set", kTernary, "--re", "0.5"});
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.out.find("diverged"), std::string::npos);
}

TEST(Cli, ZetaMethodsAgree) {
    auto value = [](const std::string& method) {
        const auto r = run({"zeta", "eval", "--set", "kind=cantor m=3 a=1/5", "--re", "0.8", "--im", "2", "--method", method, "--format", "json"});
        EXPECT_EQ(r.exit_code, 0) << r.err;
        const auto row = nlohmann::json::parse(r.out)["sections"][0]["rows"][0];
        return std::complex<double>(row[2].get<double>(), row[3].get<double>());
    };
    const auto a = value("numeric"), b = value("direct"), c = value("closed-form");
    EXPECT_LT(std::abs(a - c), 1e-9 * std::abs(c));
    EXPECT_LT(std::abs(b - c), 1e-9 * std::abs(c));
}

TEST(Cli, DimsTableForTernaryCantor) {
    const auto r = run({"dims", "table", "--set", kTernary, "--format", "json"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    const auto lat = section(doc, "pole lattices");
    ASSERT_EQ(lat["rows"].size(), 1u);
    EXPECT_NEAR(lat["rows"][0][2].get<double>(), 2.0 * std::numbers::pi / std::log(3.0), 1e-12);
    EXPECT_NEAR(section(doc, "complex dimensions")["fields"]["residue_at_D"].get<double>(),
                2.0 / std::log(2.0) * std::pow(6.0, -std::log(2.0) / std::log(3.0)), 1e-12);
}

TEST(Cli, TubeMonteCarloIsSeeded) {
    const std::vector<std::string> args{"tube", "--set", "kind=sphere N=2", "--samples", "2", "--t-min", "0.05", "--t-max", "0.2",
                                        "--monte-carlo", "20000", "--format", "csv"};
    auto with_seed = [&](const std::string& seed) {
        auto a = args;
        a.push_back("--seed");
        a.push_back(seed);
        return run(a).out;
    };
    EXPECT_EQ(with_seed("3"), with_seed("3"));
    EXPECT_NE(with_seed("3"), with_seed("4"));
    EXPECT_EQ(run(args).out, with_seed("0"));
}

TEST(Cli, QuasiCommands) {
    const auto b = run({"quasi", "build", "--D", "1/2", "--moduli", "2,3,5", "--format", "json"});
    ASSERT_EQ(b.exit_code, 0) << b.err;
    const auto c = section(nlohmann::json::parse(b.out), "construction");
    EXPECT_EQ(c["fields"]["certified"], true);
    EXPECT_EQ(c["fields"]["rank"], 3);
    const auto s = run({"quasi", "spectrum", "--D", "1/2", "--moduli", "2,3", "--format", "csv"});
    ASSERT_EQ(s.exit_code, 0);
    EXPECT_EQ(s.out.rfind("frequency,power\r\n", 0), 0u);
    EXPECT_EQ(run({"quasi", "recover", "--D", "1/2", "--moduli", "2,3"}).exit_code, 0);
    EXPECT_EQ(run({"quasi", "build", "--D", "1/2", "--moduli", "2,x"}).exit_code, 2);
}

TEST(Cli, ReportTernaryCantor) {
    const auto r = run({"report", "--set", kTernary, "--format", "json"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    const double D = std::log(2.0) / std::log(3.0);
    EXPECT_NEAR(section(doc, "complex dimensions")["fields"]["abscissa"].get<double>(), D, 1e-15);
    EXPECT_NEAR(section(doc, "pole lattices")["rows"][0][2].get<double>(), 2.0 * std::numbers::pi / std::log(3.0), 1e-12);
    EXPECT_NEAR(section(doc, "minkowski contents")["fields"]["residue_at_D"].get<double>(), 0.9316349186, 1e-9);
    EXPECT_EQ(section(doc, "profile spectrum")["fields"]["all_recovered"], true);
}

TEST(Cli, ReportAStringStatesBothConstants) {
    const auto r = run({"report", "--set", "kind=astring a=1"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("inner lower"), std::string::npos);
    EXPECT_NE(r.out.find("full-neighborhood constant 2.828427 matches 2^(1-D) a^D / (1-D)"), std::string::npos);
    EXPECT_NE(r.out.find("inner-neighborhood constant 2.82842"), std::string::npos);
}

TEST(Cli, ReportGrillShiftsDimension) {
    const auto r = run({"report", "--set", "c: kind=cantor m=2 a=1/3; kind=grill base=c d=1", "--format", "json"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto lat = section(nlohmann::json::parse(r.out), "pole lattices");
    EXPECT_NEAR(lat["rows"][0][0].get<double>(), 1.0 + std::log(2.0) / std::log(3.0), 1e-15);
    EXPECT_EQ(lat["rows"][0][5], true);
}

TEST(Cli, OutputsAreDeterministic) {
    const auto out = scratch("fz_cli_det");
    for (const char* fmt : {"text", "csv", "json"}) {
        std::string first;
        for (int i = 0; i < 2; ++i) {
            ASSERT_EQ(run({"report", "--set", "kind=cantor m=3 a=1/5", "--format", fmt, "--output", out.string()}).exit_code, 0);
            if (i == 0) first = slurp(out);
            else EXPECT_EQ(slurp(out), first) << fmt;
        }
    }
    std::filesystem::remove(out);
}

TEST(Cli, GoldenJson) {
    // Byte-for-byte against checked-in output; regenerate only on a deliberate format change.
    const std::filesystem::path golden(FZ_GOLDEN_DIR);
    EXPECT_EQ(run({"set", "--set", kTernary, "--format", "json"}).out, slurp(golden / "cantor_set.json"));
    EXPECT_EQ(run({"dims", "table", "--set", kTernary, "--im-max", "30", "--format", "json"}).out,
              slurp(golden / "cantor_dims.json"));
}
