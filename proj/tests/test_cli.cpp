#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = DUOCOVER_CLI;
const std::string kData = DUOCOVER_DATA;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("duocover_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string& args, const std::string& env = "") {
    const auto out = scratch_dir() / "stdout.txt";
    const auto err = scratch_dir() / "stderr.txt";
    const auto cmd = env + " \"" + kCli + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, SolveTiny) {
    const auto r = run("solve --input " + kData + "/tiny.csv --k 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["status"], "optimal");
    EXPECT_DOUBLE_EQ(doc["total_cost"].get<double>(), 8.0);
}

TEST(Cli, FlagsBeatSidecarBeatsDefaults) {
    const auto dir = scratch_dir();
    fs::copy_file(kData + "/tiny.csv", dir / "line.csv", fs::copy_options::overwrite_existing);
    // No sidecar: routing factor defaults to 1.6.
    fs::remove(dir / "line.json");
    auto r = run("solve -i " + (dir / "line.csv").string() + " --k 2");
    EXPECT_NEAR(nlohmann::json::parse(r.out)["total_cost"].get<double>(), 12.8, 1e-12);
    write(dir / "line.json", R"({"k": 2, "routing_factor": 2.0})");
    r = run("solve -i " + (dir / "line.csv").string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["total_cost"].get<double>(), 16.0, 1e-12);
    r = run("solve -i " + (dir / "line.csv").string() + " --routing-factor 1 --k 4");
    EXPECT_NEAR(nlohmann::json::parse(r.out)["total_cost"].get<double>(), 4.0, 1e-12);  // every site is open: 0 + 1 each
    EXPECT_EQ(nlohmann::json::parse(r.out)["open"].size(), 4u);
}

TEST(Cli, SingletonCandidatesAreInfeasible) {
    const auto map = (scratch_dir() / "kcn1.csv").string();
    auto r = run("sample --method kcn --neighbors 1 -i " + kData + "/tiny.csv --k 2 -o " + map);
    ASSERT_EQ(r.code, 0) << r.err;
    r = run("solve -i " + kData + "/tiny.csv --k 2 --candidates " + map);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(nlohmann::json::parse(r.out)["status"], "infeasible");
}

TEST(Cli, ExportLpCounts) {
    const auto csv = scratch_dir() / "three.csv";
    write(csv, "id,x,y,load\n0,0,0,1\n1,1,0,2\n2,0,5,1\n");
    auto r = run("export-lp -i " + csv.string() + " --k 2");
    ASSERT_EQ(r.code, 0) << r.err;
    auto lp = oracle::parse_lp(r.out);
    EXPECT_EQ(lp.binaries.size(), 12u);
    EXPECT_EQ(lp.rows.size(), 13u);
    r = run("export-lp -i " + csv.string() + " --k 2 --linking weak");
    lp = oracle::parse_lp(r.out);
    EXPECT_EQ(lp.rows.size(), 7u);
    EXPECT_NE(r.out.find("wlink_0: 3 y_0 - x_0_0 - x_1_0 - x_2_0 >= 0"), std::string::npos);
}

TEST(Cli, ErrorsAndUsage) {
    const auto bad = scratch_dir() / "bad.csv";
    write(bad, "id,x,y,load\n0,0,0,1\n1,zz,0,1\n");
    auto r = run("solve -i " + bad.string() + " --k 2");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
    r = run("solve -i " + kData + "/missing.csv --k 2");
    EXPECT_EQ(r.code, 1);
    r = run("sample -i " + kData + "/tiny.csv --k 2 --method cbs --neighbors 3");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("usage"), std::string::npos);
    r = run("export-lp -i " + kData + "/tiny.csv --k 2 --tight-weak");
    EXPECT_EQ(r.code, 1);
    r = run("");
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, SeedFromEnvironment) {
    const auto a = run("gen --n 30", "DUOCOVER_SEED=7");
    const auto b = run("gen --n 30 --seed 7");
    const auto c = run("gen --n 30");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(c.out, run("gen --n 30 --seed 20100901").out);
}

TEST(Cli, DownsampleAndBench) {
    const auto master = scratch_dir() / "master.csv";
    ASSERT_EQ(run("gen --n 120 -o " + master.string()).code, 0);
    auto r = run("downsample -i " + master.string() + " --m 20");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 21u);
    r = run("bench -i " + master.string() + " --k 3 --sizes 15,20 --timing none");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,k,method,value,gap_percent,time_s,params");
    EXPECT_EQ(r.out, run("bench -i " + master.string() + " --k 3 --sizes 15,20 --timing none").out);
}
