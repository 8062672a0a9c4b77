#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include <advflow/io.hpp>

using namespace advflow;
namespace fs = std::filesystem;

namespace {

const fs::path configs = ADVFLOW_CONFIG_DIR;
const fs::path scratch = fs::temp_directory_path() / "advflow_cli_test";

int run_cli(const std::string& args, const std::string& out) {
    fs::remove_all(scratch / out);
    const std::string cmd = std::string(ADVFLOW_CLI) + " " + args + " --out " + (scratch / out).string() +
                            " > " + (scratch / (out + ".log")).string() + " 2>&1";
    fs::create_directories(scratch);
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cfg(const char* name) { return "--config " + (configs / name).string(); }

}  // namespace

TEST(Cli, Evolve1dWritesMovingEndpoints) {
    ASSERT_EQ(run_cli("evolve1d " + cfg("gaussian_1d.json") + " --eps-max 0.5", "gauss"), 0);
    std::ifstream in(scratch / "gauss" / "trajectory.csv");
    const auto rows = parse_trajectory_csv(in);
    double last_a = inf, last_b = -inf;
    std::size_t n = 0;
    for (const auto& r : rows) {
        EXPECT_EQ(r.event_flag, 0);
        EXPECT_LT(std::abs(r.residual), 1e-6);
        if (r.side == Side::left) {
            EXPECT_LT(r.position, last_a);
            last_a = r.position;
        } else {
            EXPECT_GT(r.position, last_b);
            last_b = r.position;
            ++n;
        }
    }
    EXPECT_EQ(n, 501u);
    EXPECT_TRUE(fs::exists(scratch / "gauss" / "assumptions.json"));
}

TEST(Cli, Evolve1dCertifyWritesDualityRows) {
    ASSERT_EQ(run_cli("evolve1d " + cfg("gaussian_1d.json") + " --eps-max 0.2 --certify --eps 0.05 --eps 0.2", "dual"),
              0);
    std::ifstream in(scratch / "dual" / "duality.csv");
    const auto rows = parse_dual_csv(in);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_LE(std::abs(r.gap), 2e-3);
}

TEST(Cli, SymmetricBoundaryStaysAtZero) {
    ASSERT_EQ(run_cli("evolve1d " + cfg("symmetric_1d.json"), "sym"), 0);
    std::ifstream in(scratch / "sym" / "trajectory.csv");
    for (const auto& r : parse_trajectory_csv(in)) {
        EXPECT_EQ(r.side, Side::right);
        EXPECT_NEAR(r.position, 0.0, 1e-12);
    }
}

TEST(Cli, CollisionStopsWithEventRow) {
    EXPECT_EQ(run_cli("evolve1d " + cfg("two_bump_1d.json"), "bump"), 3);
    std::ifstream in(scratch / "bump" / "trajectory.csv");
    const auto rows = parse_trajectory_csv(in);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows.back().event_flag, 1);
    EXPECT_NE(slurp(scratch / "bump.log").find("interval_collision"), std::string::npos);
}

TEST(Cli, CertifyVerdicts) {
    EXPECT_EQ(run_cli("certify " + cfg("gaussian_1d.json"), "cert"), 0);
    const auto log = slurp(scratch / "cert.log");
    EXPECT_NE(log.find("eps 0: pass"), std::string::npos);
    EXPECT_NE(log.find("eps 0.05: pass"), std::string::npos);
    EXPECT_TRUE(fs::exists(scratch / "cert" / "certificate_eps0.05.json"));

    EXPECT_EQ(run_cli("certify " + cfg("gaussian_1d.json") + " --eps 0.3", "cert_fail"), 4);
    const auto bad = slurp(scratch / "cert_fail.log");
    EXPECT_NE(bad.find("eps 0.3: fail: "), std::string::npos);
    EXPECT_NE(bad.find("bracket"), std::string::npos);
}

TEST(Cli, Evolve2dProducesShorteningSnapshots) {
    ASSERT_EQ(run_cli("evolve2d " + cfg("two_gaussian_pairs_2d.json"), "mix"), 0);
    std::ifstream in(scratch / "mix" / "curves.csv");
    const auto rows = parse_curve_csv(in);
    std::vector<double> eps;
    for (const auto& r : rows)
        if (eps.empty() || eps.back() != r.eps) eps.push_back(r.eps);
    EXPECT_EQ(eps.size(), 5u);
    std::ifstream sum(scratch / "mix" / "summary.csv");
    std::string line;
    std::getline(sum, line);
    double prev = inf;
    while (std::getline(sum, line)) {
        const double len = parse_num(line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1));
        EXPECT_LE(len, prev);
        prev = len;
    }
}

TEST(Cli, RadialMatchesOracle) {
    ASSERT_EQ(run_cli("radial " + cfg("radial_2d.json"), "radial"), 0);
    std::ifstream in(scratch / "radial" / "oracle.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "eps,oracle_radius,mean_radius,hausdorff");
    int n = 0;
    while (std::getline(in, line)) {
        EXPECT_LT(parse_num(line.substr(line.rfind(',') + 1)), 1e-3);
        ++n;
    }
    EXPECT_EQ(n, 6);
}

TEST(Cli, BayesOnBothDimensions) {
    EXPECT_EQ(run_cli("bayes " + cfg("gaussian_1d.json"), "bayes1"), 0);
    const auto j = json::parse(slurp(scratch / "bayes1" / "bayes.json"));
    EXPECT_NEAR(j["set"][0][0].get<double>(), -2.570917243474, 1e-11);
    EXPECT_EQ(run_cli("bayes " + cfg("radial_2d.json"), "bayes2"), 0);
    EXPECT_TRUE(fs::exists(scratch / "bayes2" / "contour.csv"));
}

TEST(Cli, ConfigErrors) {
    EXPECT_EQ(run_cli("evolve2d " + cfg("degenerate_2d.json"), "degenerate"), 2);
    EXPECT_NE(slurp(scratch / "degenerate.log").find("no zero contour"), std::string::npos);
    EXPECT_EQ(run_cli("evolve1d " + cfg("two_gaussian_pairs_2d.json"), "dim"), 2);
    EXPECT_EQ(run_cli("evolve1d " + cfg("gaussian_1d.json") + " --step -1", "step"), 2);
    const auto broken = scratch / "broken.json";
    fs::create_directories(scratch);
    std::ofstream(broken) << "{ \"model\": ";
    EXPECT_EQ(run_cli("evolve1d --config " + broken.string(), "broken"), 2);
}

TEST(Cli, OutputsAreDeterministic) {
    ASSERT_EQ(run_cli("evolve1d " + cfg("gaussian_1d.json") + " --eps-max 0.1 --certify", "det1"), 0);
    ASSERT_EQ(run_cli("evolve1d " + cfg("gaussian_1d.json") + " --eps-max 0.1 --certify", "det2"), 0);
    for (const char* f : {"trajectory.csv", "assumptions.json", "duality.csv", "events.json"})
        EXPECT_EQ(slurp(scratch / "det1" / f), slurp(scratch / "det2" / f)) << f;
}
