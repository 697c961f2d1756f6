#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LIDARGAIT_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe))
        r.output.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string q(const fs::path& p) {
    return "'" + p.string() + "'";
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        root = fs::temp_directory_path() / "lidargait_cli_tests";
        fs::remove_all(root);
        fs::create_directories(root);
        const auto r = run("synth --out " + q(root / "data") +
                           " --subjects 4 --seqs-per-subject 4 --frames 90 --seed 7 --dropout 0.2 --jump-rate 0.05");
        ASSERT_EQ(r.code, 0) << r.output;
        const auto p = run("pipeline --in " + q(root / "data") + " --out " + q(root / "out"));
        ASSERT_EQ(p.code, 0) << p.output;
    }
    static void TearDownTestSuite() { fs::remove_all(root); }

    static fs::path root;
};

fs::path Cli::root;

} // namespace

TEST_F(Cli, Version) {
    const auto r = run("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.output.find("0.1.0"), std::string::npos);
}

TEST_F(Cli, SynthWritesDetectorFilesAndTruth) {
    EXPECT_TRUE(fs::exists(root / "data" / "s01_toward_00.jsonl"));
    EXPECT_TRUE(fs::exists(root / "data" / "truth" / "s01_toward_00.world.csv"));
    EXPECT_TRUE(fs::exists(root / "data" / "truth" / "s01_toward_00.mask.csv"));
}

TEST_F(Cli, PipelineArtifacts) {
    for (const char* name : {"eval_report.json", "eval_report.txt", "cycles.json", "repair_report.json",
                             "config.toml", "confusion.svg"})
        EXPECT_TRUE(fs::exists(root / "out" / name)) << name;
    EXPECT_TRUE(fs::is_directory(root / "out" / "world"));
    EXPECT_TRUE(fs::is_directory(root / "out" / "repaired"));
    EXPECT_TRUE(fs::is_directory(root / "out" / "features"));
}

TEST_F(Cli, MissingInputDirectoryExitsTwo) {
    const auto r = run("pipeline --in " + q(root / "no_such_dir") + " --out " + q(root / "never"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("no_such_dir"), std::string::npos);
}

TEST_F(Cli, StageErrorNamesStage) {
    fs::create_directories(root / "thin");
    fs::copy_file(root / "data" / "s01_toward_00.jsonl", root / "thin" / "s01_toward_00.jsonl",
                  fs::copy_options::overwrite_existing);
    const auto r = run("pipeline --in " + q(root / "thin") + " --out " + q(root / "thin_out"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("stage ingest"), std::string::npos) << r.output;
}

TEST_F(Cli, DeterministicReport) {
    const auto r = run("pipeline --in " + q(root / "data") + " --out " + q(root / "out2"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(root / "out" / "eval_report.json"), slurp(root / "out2" / "eval_report.json"));
}

TEST_F(Cli, RepairRestartsFromWorldArtifact) {
    const auto r = run("repair --in " + q(root / "out" / "world" / "s02_diamond_01.csv") + " --out " +
                       q(root / "s02.csv") + " --plot " + q(root / "s02.svg"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(root / "s02.csv"), slurp(root / "out" / "repaired" / "s02_diamond_01.csv"));
    EXPECT_NE(slurp(root / "s02.svg").find("<svg"), std::string::npos);
}

TEST_F(Cli, FeaturesRestartFromRepairedArtifact) {
    const auto r = run("features --in " + q(root / "out" / "repaired" / "s03_toward_00.csv") + " --out " +
                       q(root / "s03_features.csv"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(root / "s03_features.csv"), slurp(root / "out" / "features" / "s03_toward_00.csv"));
}

TEST_F(Cli, CycleRestartsFromRepairedDirectory) {
    const auto r = run("cycle --in " + q(root / "out" / "repaired") + " --out " + q(root / "cycles.json"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(root / "cycles.json"), slurp(root / "out" / "cycles.json"));
}

TEST_F(Cli, TrainEvalRestartsFromFeaturesAndCycles) {
    const auto r = run("--config " + q(root / "out" / "config.toml") + " train-eval --features " +
                       q(root / "out" / "features") + " --cycles " + q(root / "out" / "cycles.json") + " --report " +
                       q(root / "report.json"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(slurp(root / "report.json"), slurp(root / "out" / "eval_report.json"));
}

TEST_F(Cli, SkipRepairFlag) {
    const auto r = run("pipeline --skip-repair --in " + q(root / "data") + " --out " + q(root / "raw_out"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_FALSE(fs::exists(root / "raw_out" / "repaired"));
    EXPECT_NE(slurp(root / "raw_out" / "eval_report.json").find("\"repaired\": false"), std::string::npos);
}

TEST_F(Cli, BadConfigRejected) {
    std::ofstream(root / "bad.toml") << "[repair]\nwindow_size = 3\n";
    const auto r = run("--config " + q(root / "bad.toml") + " pipeline --in " + q(root / "data") + " --out " +
                       q(root / "bad_out"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find("window_size"), std::string::npos);
}
