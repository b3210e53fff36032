#include "fdxlab/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using namespace fdxlab;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fdxlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const std::string& name, const std::string& body) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << body;
        return p;
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "fdxlab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        out_.str("");
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static std::string last_line(const std::string& s) {
        std::istringstream in(s);
        std::string line, last;
        while (std::getline(in, line)) last = line;
        return last;
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

config::RunConfig parse(const std::string& text, const std::string& sub = "") {
    std::istringstream in(text);
    return config::parse_config(in, "test", sub);
}

std::vector<std::string> problems(const std::string& text, const std::string& sub = "") {
    try {
        parse(text, sub);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool mentions(const std::vector<std::string>& ps, const std::string& needle) {
    for (const auto& p : ps)
        if (p.find(needle) != std::string::npos) return true;
    return false;
}

const char* kMinimal = "N = 1\nm = 0.5\np = 3\nprofile = power\nc = 0.1\n";

} // namespace

TEST(ParseConfig, MinimalValidFile) {
    const auto cfg = parse(std::string("subcommand = simulate\n# comment\n") + kMinimal);
    EXPECT_EQ(cfg.subcommand, "simulate");
    ASSERT_TRUE(cfg.params.has_value());
    EXPECT_EQ(*cfg.params, ProblemParams(1, 0.5, 3));
    EXPECT_EQ(cfg.profile.kind, "power");
    EXPECT_EQ(cfg.profile.c, 0.1);
    ASSERT_TRUE(cfg.solver.has_value());
    EXPECT_EQ(cfg.solver->cells, 400u);
}

TEST(ParseConfig, InvalidMNamesKey) {
    const auto ps = problems("N = 1\nm = 1.2\np = 3\n", "simulate");
    ASSERT_FALSE(ps.empty());
    EXPECT_TRUE(mentions(ps, "key `m`"));
    EXPECT_TRUE(mentions(ps, "test:2"));
}

TEST(ParseConfig, CollectsEveryViolation) {
    const auto ps = problems("N = 0\nm = 0.5\np = 0.5\nsolver.cells = 1\nsolver.dt_safety = 2\nbogus = 3\n", "simulate");
    EXPECT_TRUE(mentions(ps, "key `N`"));
    EXPECT_TRUE(mentions(ps, "key `p`"));
    EXPECT_TRUE(mentions(ps, "key `solver.cells`"));
    EXPECT_TRUE(mentions(ps, "dt_safety"));
    EXPECT_TRUE(mentions(ps, "unknown key `bogus`"));
}

TEST(ParseConfig, SyntaxErrorsCarryLine) {
    std::istringstream in("N = 1\nthis line has no equals sign\nN = 2\n");
    try {
        config::parse_config(in, "cfg.txt", "exponents");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e.problems(), "cfg.txt:2"));
        EXPECT_TRUE(mentions(e.problems(), "duplicate key `N`"));
    }
}

TEST(ParseConfig, MissingSubcommandAndParams) {
    EXPECT_TRUE(mentions(problems(kMinimal), "missing subcommand"));
    EXPECT_TRUE(mentions(problems("m = 0.5\n", "norms"), "missing required key `N`"));
    EXPECT_TRUE(problems("", "gronwall-check").empty());
}

TEST(ParseConfig, TraceDefaultsToEarlyLogOutputs) {
    const auto cfg = parse(kMinimal, "trace");
    EXPECT_EQ(cfg.solver->log_outputs_per_decade, 3);
    EXPECT_DOUBLE_EQ(cfg.solver->log_output_t_min, 1e-6);
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
    EXPECT_EQ(run({"--set", "N=1"}), 2);
    EXPECT_NE(err_.str().find("missing subcommand"), std::string::npos);
    EXPECT_EQ(run({"--bogus-flag"}), 2);
    EXPECT_EQ(run({"frobnicate", "--set", "N=1", "--set", "m=0.5", "--set", "p=3"}), 2);
}

TEST_F(CliTest, ExponentsPrintsThetaKappaRegime) {
    const auto cfg = write_config("e.conf", "N = 1\nm = 0.5\np = 3\n");
    ASSERT_EQ(run({"exponents", "--config", cfg.string(), "--out", (dir_ / "e.csv").string()}), 0) << err_.str();
    const std::string o = out_.str();
    EXPECT_NE(o.find("theta=0.625\n"), std::string::npos);
    EXPECT_NE(o.find("kappa=1.5\n"), std::string::npos);
    EXPECT_NE(o.find("regime=Supercritical\n"), std::string::npos);
    const std::string csv = slurp(dir_ / "e.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,m,p,p_m,theta,theta_prime,kappa,scaling_exponent,regime");
    EXPECT_EQ(last_line(csv), "# status: ok");
}

TEST_F(CliTest, GronwallCheckIsDeterministic) {
    const auto a = dir_ / "a.csv", b = dir_ / "b.csv";
    ASSERT_EQ(run({"gronwall-check", "--seed", "7", "--out", a.string()}), 0) << err_.str();
    EXPECT_NE(out_.str().find("pass 1000/1000"), std::string::npos);
    ASSERT_EQ(run({"gronwall-check", "--seed", "7", "--threads", "3", "--out", b.string()}), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(last_line(slurp(a)), "# status: pass 1000/1000");
    ASSERT_EQ(run({"gronwall-check", "--seed", "8", "--out", b.string()}), 0);
    EXPECT_NE(slurp(a), slurp(b));
}

TEST_F(CliTest, SimulateBarenblattControlCompletes) {
    const auto cfg = write_config("b.conf", "subcommand = simulate\nN = 1\nm = 0.5\np = 3\nprofile = barenblatt\n"
                                            "solver.source_on = false\nsolver.boundary = barenblatt\n"
                                            "solver.t_end = 0.2\nsolver.R_dom = 4\nsolver.cells = 100\n"
                                            "solver.n_outputs = 4\n");
    ASSERT_EQ(run({"--config", cfg.string(), "--out", (dir_ / "t.csv").string()}), 0) << err_.str();
    const std::string csv = slurp(dir_ / "t.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,sup_norm,mass_sigma_0,mass_sigma_1,mass_sigma_2");
    EXPECT_EQ(last_line(csv), "# status: completed t=0.20000000000000001");
}

TEST_F(CliTest, EverySubcommandWritesHeaderAndStatus) {
    const std::string base = "N = 1\nm = 0.5\np = 3\nprofile = power\nc = 0.05\n"
                             "solver.cells = 50\nsolver.t_end = 0.01\nsolver.n_outputs = 10\n";
    const std::vector<std::pair<std::string, std::string>> runs{
        {"exponents", ""},
        {"norms", "norm.kind = morrey\nnorm.q = 1.25\n"},
        {"norms", "norm.kind = condition\nnorm.T = inf\n"},
        {"simulate", ""},
        {"threshold", "threshold.rule = status\nthreshold.c_start = 0.05\nthreshold.bisect_steps = 4\n"
                      "threshold.horizon = 0.01\n"},
        {"decay", "solver.log_outputs_per_decade = 4\nsolver.log_output_t_min = 1e-4\ndecay.t0 = 1e-3\n"},
        {"trace", "solver.probes = 0.05, 0.2, 0.5, 1, 2\n"},
        {"gronwall-check", "gronwall.draws = 5\n"}};
    int i = 0;
    for (const auto& [sub, extra] : runs) {
        const auto cfg = write_config("c" + std::to_string(i) + ".conf", base + extra);
        const auto csv_path = dir_ / ("o" + std::to_string(i++) + ".csv");
        ASSERT_EQ(run({sub, "--config", cfg.string(), "--out", csv_path.string()}), 0) << sub << ": " << err_.str();
        const std::string csv = slurp(csv_path);
        ASSERT_FALSE(csv.empty()) << sub;
        EXPECT_NE(csv[0], '#') << sub;
        EXPECT_EQ(last_line(csv).rfind("# status: ", 0), 0u) << sub;
    }
}

TEST_F(CliTest, DomainErrorExitsOne) {
    // Ψ_1 of the critical log profile is not locally integrable for N = 2.
    const auto cfg = write_config("d.conf", "N = 2\nm = 0.5\np = 1.5\nprofile = critical\nc = 0.05\n"
                                            "norm.kind = condition\nnorm.alpha = 1\n");
    EXPECT_EQ(run({"norms", "--config", cfg.string(), "--out", (dir_ / "d.csv").string()}), 1);
    EXPECT_NE(err_.str().find("error:"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "d.csv"));
}

TEST_F(CliTest, DefaultOutputNameHasSubcommandAndTimestamp) {
    const auto outdir = dir_ / "results";
    ASSERT_EQ(run({"gronwall-check", "--set", "gronwall.draws=2", "--out", outdir.string()}), 0);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(outdir)) names.push_back(e.path().filename().string());
    ASSERT_EQ(names.size(), 1u);
    EXPECT_TRUE(std::regex_match(names[0], std::regex(R"(gronwall-check-\d{8}T\d{6}Z\.csv)"))) << names[0];
}
