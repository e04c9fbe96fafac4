#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "cardest_cli_test";

int run(const std::string& args) {
    const std::string cmd = std::string(CARDEST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path dir(const std::string& name) {
    const auto p = kRoot / name;
    fs::remove_all(p);
    return p;
}

void write_file(const fs::path& p, const std::string& body) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << body;
}

const char* kSmallSpec = R"(name = "tiny"
seed = 4
batch_size = 1000
tcp_fraction = 0.9

[[phase]]
packets = 20000
law = "zipf"
alpha = 1.1
pool = 800
)";

}  // namespace

TEST_CASE("gen is deterministic in the seed") {
    const auto spec = kRoot / "tiny.toml";
    write_file(spec, kSmallSpec);
    const auto a = dir("gen_a"), b = dir("gen_b"), c = dir("gen_c");
    REQUIRE(run("--out " + a.string() + " gen --spec " + spec.string()) == 0);
    REQUIRE(run("--out " + b.string() + " gen --spec " + spec.string()) == 0);
    REQUIRE(run("--out " + c.string() + " --seed 9 gen --spec " + spec.string()) == 0);
    for (const char* f : {"trace.csv", "sidecar.csv", "metadata.json", "spec.toml"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto ta = slurp(a / "trace.csv"), tc = slurp(c / "trace.csv");
    CHECK(ta != tc);
    CHECK(ta.substr(0, ta.find('\n')) == tc.substr(0, tc.find('\n')));
    std::istringstream side(slurp(a / "sidecar.csv"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(side, line)) ++rows;
    CHECK(rows == 21);
}

TEST_CASE("compare reruns produce identical files") {
    const auto spec = kRoot / "tiny.toml";
    write_file(spec, kSmallSpec);
    const auto g = dir("cmp_gen");
    REQUIRE(run("--out " + g.string() + " gen --spec " + spec.string()) == 0);
    const auto trace = (g / "trace.csv").string();
    const auto a = dir("cmp_a"), b = dir("cmp_b");
    const std::string common = " --trace " + trace + " --batch-size 1000 --sampling-rate 0.05 --training-rate 0.2 compare";
    REQUIRE(run("--out " + a.string() + common) == 0);
    REQUIRE(run("--out " + b.string() + common) == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        ++files;
    }
    CHECK(files == 8);
    CHECK(slurp(a / "errors.csv").find("estimator,RMSE,MAE,MAPE,MAXAE") == 0);
}

TEST_CASE("config file values and flag precedence") {
    const auto cfg = kRoot / "run.toml";
    write_file(cfg, "preset = \"caida-like\"\nbatch_size = 5000\nsampling_rate = 0.02\ntraining_rate = 0.5\n[rls]\nmu = 0.98\n");
    const auto a = dir("cfg_a");
    REQUIRE(run("--config " + cfg.string() + " --out " + a.string() + " --estimators rls --batch-size 20000 run") == 0);
    const auto meta = slurp(a / "metadata.json");
    CHECK(meta.find("\"batch_size\": 20000") != std::string::npos);
    CHECK(meta.find("0.98") != std::string::npos);
}

TEST_CASE("error exit codes") {
    const auto out = dir("errors");
    CHECK(run("--out " + out.string() + " gen --spec " + (kRoot / "missing.toml").string()) == 2);
    CHECK(run("--no-such-flag compare") == 2);
    CHECK(run("--out " + out.string() + " --sampling-rate 1.5 --preset caida-like compare") == 2);
    CHECK(run("--out " + out.string() + " --training-rate 0.3 --effective-rate 0.02 --preset caida-like compare") == 2);
    const auto bad = kRoot / "bad.csv";
    write_file(bad, "ts_sec,src_ip,dst_ip,src_port,dst_port,proto,pkt_len,tcp_flags\n0.1,10.0.0.1,10.0.0.2,1,2,6,60,2\n0.2,not-an-ip,10.0.0.2,1,2,6,60,2\n");
    CHECK(run("--out " + out.string() + " --trace " + bad.string() + " compare") == 1);
}
