#include "commands.hpp"
#include "lagfib/models.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lagfib;
using namespace lagfib::cli;

namespace {

const std::string kFixtures = LAGFIB_FIXTURES_DIR;

std::string fixture(const std::string &name) { return kFixtures + "/" + name + ".json"; }

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("lagfib_test_" + name);
}

std::vector<std::string> lines_of(const std::filesystem::path &p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST(Report, StatusMatchesExitCode) {
    const auto ok = cmd_classify({fixture("construction1"), "z1=1/7"});
    EXPECT_TRUE(ok.ok);
    EXPECT_EQ(ok.exit_code, kExitOk);
    const auto j = ok.to_json();
    EXPECT_EQ(j["schema"], kSchemaVersion);
    EXPECT_EQ(j["status"], "ok");
    EXPECT_TRUE(j.contains("timings"));
    EXPECT_FALSE(ok.to_json(false).contains("timings"));
    EXPECT_EQ(j["spec_digest"].get<std::string>().rfind("sha256:", 0), 0u);
    EXPECT_EQ(j["spec_digest"].get<std::string>().size(), 7u + 64u);
}

TEST(Report, DigestDependsOnContentOnly) {
    const auto a = load_spec(fixture("construction1"));
    auto b = models::cubic();
    EXPECT_EQ(spec_digest(a), spec_digest(b));
    b.ell = 2;
    EXPECT_NE(spec_digest(a), spec_digest(b));
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CheckDomain, Fixtures) {
    const auto one = cmd_check_domain({fixture("construction1"), 9, 1e-10});
    EXPECT_TRUE(one.ok);
    EXPECT_GT(one.results["min_pivot"].get<double>(), 0.0);
    EXPECT_EQ(one.results["evidence"], "sampled");

    const auto three = cmd_check_domain({fixture("construction3"), 5, 1e-10});
    EXPECT_TRUE(three.ok);
    EXPECT_NEAR(three.results["min_pivot"].get<double>(), 1.0, 1e-12);

    const auto neg = cmd_check_domain({fixture("negative_domain"), 5, 1e-10});
    EXPECT_FALSE(neg.ok);
    EXPECT_EQ(neg.exit_code, kExitFail);
    EXPECT_LT(neg.results["min_pivot"].get<double>(), 0.0);
    EXPECT_TRUE(neg.results.contains("worst_point"));
}

TEST(CheckDomain, TolIsTheThreshold) {
    // Construction II pivots are exactly 1
    EXPECT_TRUE(cmd_check_domain({fixture("construction2"), 3, 0.99}).ok);
    EXPECT_FALSE(cmd_check_domain({fixture("construction2"), 3, 1.01}).ok);
}

TEST(Classify, Fixtures) {
    EXPECT_EQ(cmd_classify({fixture("construction1"), "z1=1/7"}).results["classification"]["cycle_type"]["name"],
              "I_7");
    for (const char *pt : {"z1=0", "z1=1/3", "z1=2/7+i/5", "z1=sqrt(2)/9"})
        EXPECT_EQ(cmd_classify({fixture("construction2"), pt}).results["classification"]["cycle_type"]["name"],
                  "I_4")
            << pt;
    for (const char *pt : {"z1=0", "z1=1/3"})
        EXPECT_EQ(cmd_classify({fixture("construction3"), pt}).results["classification"]["cycle_type"]["name"],
                  "A_inf");

    ClassifyOptions numeric{fixture("construction3"), "z1=1/3"};
    numeric.numeric = true;
    EXPECT_EQ(cmd_classify(numeric).results["classification"]["cycle_type"]["name"], "unknown_up_to_10000");
}

TEST(Classify, ExitCodes) {
    const auto off = cmd_classify({fixture("construction1"), "z1=1/3,z2=1/2"});
    EXPECT_EQ(off.exit_code, kExitFail);
    EXPECT_EQ(off.results["error"]["code"], "NotOnDiscriminant");
    EXPECT_EQ(cmd_classify({fixture("construction1"), "z1=what"}).exit_code, kExitUsage);
    EXPECT_EQ(cmd_classify({"/nonexistent.json", "z1=0"}).exit_code, kExitUsage);
}

TEST(Scan, RationalGridAllFinite) {
    const auto csv = temp_file("scan.csv");
    const auto report = cmd_scan({fixture("construction1"), "q<=10", csv.string(), ""});
    EXPECT_TRUE(report.ok);
    EXPECT_EQ(report.results["infinite"], 0);
    EXPECT_EQ(report.results["errors"], 0);
    EXPECT_EQ(report.results["finite"], report.results["points"]);
    for (int k = 1; k <= 10; ++k)
        EXPECT_TRUE(report.results["finite_cycle_types"].contains("I_" + std::to_string(k))) << k;
    const auto lines = lines_of(csv);
    ASSERT_FALSE(lines.empty());
    EXPECT_EQ(lines[0], "point,embed,cycle_type,wall_ms");
    EXPECT_EQ(lines.size(), report.results["points"].get<std::size_t>() + 1);
    std::filesystem::remove(csv);
}

TEST(Scan, IrrationalGridAllInfinite) {
    const auto json = temp_file("scan.json");
    const auto report = cmd_scan({fixture("construction1"), "sqrt(2)*q<=6", "", json.string()});
    EXPECT_TRUE(report.ok);
    EXPECT_GT(report.results["points"].get<int>(), 0);
    EXPECT_EQ(report.results["infinite"], report.results["points"]);
    const auto full = Json::parse(read_file(json.string()));
    EXPECT_EQ(full["schema"], kSchemaVersion);
    for (const auto &row : full["entries"])
        EXPECT_TRUE(row["result"].contains("certificate"));
    std::filesystem::remove(json);
}

TEST(Scan, EmptyGridAndIoError) {
    const auto csv = temp_file("empty.csv");
    const auto report = cmd_scan({fixture("construction1"), "", csv.string(), ""});
    EXPECT_TRUE(report.ok);
    EXPECT_EQ(report.results["points"], 0);
    EXPECT_EQ(lines_of(csv).size(), 1u);
    std::filesystem::remove(csv);
    EXPECT_EQ(cmd_scan({fixture("construction1"), "q<=2", "/nonexistent/dir/out.csv", ""}).exit_code, kExitUsage);
}

TEST(Scan, PointErrorsFailTheRun) {
    const auto report = cmd_scan({fixture("construction1"), "z1=0; z1=0,z2=1/2", "", ""});
    EXPECT_FALSE(report.ok);
    EXPECT_EQ(report.exit_code, kExitFail);
    EXPECT_EQ(report.results["errors"], 1);
}

TEST(Verify, AllChecksPassOnFixtures) {
    for (const char *name : {"construction1", "construction2", "construction3", "ell3_twist"}) {
        VerifyOptions opt;
        opt.spec_path = fixture(name);
        opt.samples = 10;
        const auto report = cmd_verify(opt);
        EXPECT_TRUE(report.ok) << name << "\n" << report.results.dump(2);
        EXPECT_EQ(report.results["checks"].size(), all_checks().size());
    }
}

TEST(Verify, CorruptedFixtureNamesSymplectic) {
    VerifyOptions opt;
    opt.spec_path = fixture("corrupted_cubic");
    opt.checks = {"symplectic"};
    opt.samples = 10;
    const auto report = cmd_verify(opt);
    EXPECT_FALSE(report.ok);
    EXPECT_EQ(report.exit_code, kExitFail);
    ASSERT_EQ(report.results["failed"].size(), 1u);
    EXPECT_EQ(report.results["failed"][0], "symplectic");
    EXPECT_TRUE(report.results["checks"][0].contains("witness"));
}

TEST(Verify, PolarizationOverride) {
    VerifyOptions opt;
    opt.spec_path = fixture("construction1");
    opt.checks = {"polarization"};
    opt.polarization_n = 3;
    opt.polarization_ell = 5;
    const auto report = cmd_verify(opt);
    EXPECT_TRUE(report.ok);
    EXPECT_EQ(report.results["checks"][0]["n"], 3);
    EXPECT_EQ(report.results["checks"][0]["ell"], 5);
}

TEST(Verify, UnknownCheckIsUsageError) {
    VerifyOptions opt;
    opt.spec_path = fixture("construction1");
    opt.checks = {"charts", "nonsense"};
    EXPECT_EQ(cmd_verify(opt).exit_code, kExitUsage);
}

TEST(Verify, DeterministicUnderSeedAndThreads) {
    VerifyOptions opt;
    opt.spec_path = fixture("construction2");
    opt.samples = 8;
    opt.seed = 42;
    setenv("LAGFIB_THREADS", "1", 1);
    const auto a = cmd_verify(opt).to_json(false).dump();
    setenv("LAGFIB_THREADS", "4", 1);
    const auto b = cmd_verify(opt).to_json(false).dump();
    unsetenv("LAGFIB_THREADS");
    EXPECT_EQ(a, b);
    opt.seed = 43;
    EXPECT_NE(cmd_verify(opt).to_json(false).dump(), a);
}

TEST(Fiber, Fixtures) {
    const auto two = cmd_fiber({fixture("construction2"), "z1=1/5", ""});
    EXPECT_TRUE(two.ok);
    EXPECT_EQ(two.results["fiber"]["components"], 1);
    EXPECT_EQ(two.results["fiber"]["classification"]["cycle_type"]["name"], "I_4");

    const auto out = temp_file("fiber.json");
    const auto three = cmd_fiber({fixture("ell3_twist"), "z1=0", out.string()});
    EXPECT_TRUE(three.ok);
    const auto written = Json::parse(read_file(out.string()));
    EXPECT_EQ(written, three.results["fiber"]);
    EXPECT_EQ(written["components"], 3);
    EXPECT_TRUE(written["classification"].contains("extension"));
    std::filesystem::remove(out);

    EXPECT_EQ(cmd_fiber({fixture("construction3"), "z1=1/2", ""}).results["fiber"]["classification"]["cycle_type"]
                  ["name"],
              "A_inf");
    EXPECT_EQ(cmd_fiber({fixture("construction3"), "z2=1", ""}).exit_code, kExitFail);
}
