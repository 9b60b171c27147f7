#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "tcone/cli.hpp"

namespace fs = std::filesystem;
using tcone::cli::json;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tcone_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        args.insert(args.begin(), {"--out", dir_.string()});
        return tcone::cli::run(args, out_, err_);
    }

    json read_json(const std::string& name) const { return json::parse(tcone::io::read_file((dir_ / name).string())); }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) {
    EXPECT_EQ(run({"--help"}), 0);
    EXPECT_NE(out_.str().find("minimize"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(Cli, ParseErrorsExitTwoWithoutOutput) {
    EXPECT_EQ(run({"cone-angles", "--bogus", "1"}), 2);
    EXPECT_EQ(run({"frobnicate"}), 2);
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"cone-angles", "--ratio", "abc"}), 2);
    EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(Cli, ValidationErrorsExitTwo) {
    EXPECT_EQ(run({"cone-angles", "--ratio", "0.5"}), 2);
    EXPECT_EQ(run({"constants", "--tau", "2"}), 2);
    EXPECT_NE(err_.str().find("error:"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "manifest.json"));
}

TEST_F(Cli, ConeAnglesWritesSummaryAndManifest) {
    ASSERT_EQ(run({"cone-angles", "--ratio", "30"}), 0) << err_.str();
    const auto summary = json::parse(out_.str());
    ASSERT_EQ(summary["count"], 2);
    EXPECT_NEAR(summary["roots"][1]["theta"].get<double>(), 0.7474510892, 1e-9);
    EXPECT_EQ(read_json("cone-angles.json"), summary);
    const auto manifest = read_json("manifest.json");
    EXPECT_EQ(manifest["subcommand"], "cone-angles");
    EXPECT_EQ(manifest["parameters"]["ratio"], "30");
    EXPECT_EQ(manifest["versions"]["tool"], tcone::cli::kToolVersion);
    EXPECT_EQ(manifest["versions"]["config_hash"].get<std::string>().size(), 8u);
    EXPECT_TRUE(manifest["wall_time"].is_number());
}

TEST_F(Cli, CsvFormat) {
    ASSERT_EQ(run({"--format", "csv", "cone-angles", "--ratio", "30"}), 0) << err_.str();
    const std::string text = out_.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "index,theta,degrees,residual");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_TRUE(fs::exists(dir_ / "cone-angles.csv"));
    EXPECT_EQ(run({"--format", "xml", "cone-angles"}), 2);
}

TEST_F(Cli, ConstantsWarnsWithoutSobolevConstant) {
    ASSERT_EQ(run({"constants", "--n", "3", "--ratio", "3"}), 0);
    EXPECT_NE(err_.str().find("warning"), std::string::npos);
    EXPECT_EQ(json::parse(out_.str())["lambda0"], "31/23");
    ASSERT_EQ(run({"constants", "--ratio", "3", "--cs", "2"}), 0);
    EXPECT_EQ(err_.str(), "");
}

TEST_F(Cli, SolveWritesFieldArtifacts) {
    ASSERT_EQ(run({"solve", "--resolution", "16", "--ratio", "5"}), 0) << err_.str();
    const auto meta = read_json("field.json");
    const auto data = tcone::io::parse_field_binary(tcone::io::read_file((dir_ / "field.bin").string()));
    EXPECT_EQ(data.n0, meta["n0"].get<std::uint32_t>());
    EXPECT_EQ(data.values.size(), 17u * 17u);
    EXPECT_EQ(read_json("manifest.json")["artifact_paths"].size(), 3u);
}

TEST_F(Cli, MinimizeConfigErrors) {
    fs::create_directories(dir_);
    const auto cfg = (dir_ / "bad.cfg").string();
    tcone::io::write_file(cfg, "grid = 8\ncolour = red\n");
    EXPECT_EQ(run({"minimize", "--config", cfg}), 2);
    EXPECT_NE(err_.str().find("colour"), std::string::npos);
    tcone::io::write_file(cfg, "grid = 16\n");
    EXPECT_EQ(run({"minimize", "--config", cfg}), 2);
    EXPECT_EQ(run({"minimize", "--config", (dir_ / "missing.cfg").string()}), 2);
    EXPECT_EQ(run({"minimize"}), 2);
    EXPECT_FALSE(fs::exists(dir_ / "manifest.json"));
}

TEST_F(Cli, MinimizeRunsAndIsDeterministic) {
    fs::create_directories(dir_);
    const auto cfg = (dir_ / "run.cfg").string();
    tcone::io::write_file(cfg, "grid = 40\ngamma = 0.1\nbeta = 5\nLambda = 1\ninit = disk\n");
    ASSERT_EQ(run({"minimize", "--config", cfg}), 0) << err_.str();
    const std::string first = out_.str();
    for (const char* f : {"phase.pgm", "u.bin", "u.json", "diagnostics.json", "trace.csv", "minimize.json"})
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    const auto hash = read_json("manifest.json")["versions"]["config_hash"];
    ASSERT_EQ(run({"minimize", "--config", cfg}), 0);
    EXPECT_EQ(out_.str(), first);
    EXPECT_EQ(read_json("manifest.json")["versions"]["config_hash"], hash);
}

TEST(CliBinary, ExitCodes) {
    const std::string bin = TCONE_BINARY;
    EXPECT_EQ(std::system((bin + " --help > /dev/null").c_str()), 0);
    const int rc = std::system((bin + " --no-such-flag > /dev/null 2>&1").c_str());
    ASSERT_TRUE(WIFEXITED(rc));
    EXPECT_EQ(WEXITSTATUS(rc), 2);
}
