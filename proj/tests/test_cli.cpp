// Drives the uidforge executable end to end.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const fs::path kData = UIDFORGE_DATA_DIR;
const std::string kCli = UIDFORGE_CLI_PATH;

struct Run {
    int status = -1;
    std::string out, err;
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Sandbox {
public:
    Sandbox() {
        static int counter = 0;
        root_ = fs::temp_directory_path() /
                ("uidforge_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(root_);
    }
    ~Sandbox() { fs::remove_all(root_); }
    const fs::path &root() const { return root_; }
    fs::path file(const std::string &name, const std::string &content) const {
        std::ofstream(root_ / name, std::ios::binary) << content;
        return root_ / name;
    }

    Run run(const std::string &args, const std::string &env = "") const {
        const auto out = root_ / "stdout.txt";
        const auto err = root_ / "stderr.txt";
        const std::string cmd = env + " '" + kCli + "' " + args + " >'" + out.string() + "' 2>'" +
                                err.string() + "'";
        Run r;
        const int raw = std::system(cmd.c_str());
        r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

private:
    fs::path root_;
};

std::string toy_args(const fs::path &out) {
    const auto toy = kData / "toy";
    return "--population '" + (toy / "population.csv").string() + "' --survival '" +
           (toy / "survival.csv").string() + "' --fertility '" + (toy / "fertility.csv").string() +
           "' --eligible-proportion 0.8 --sex-ratio 1.05 --out '" + out.string() + "'";
}

} // namespace

TEST_CASE("help goes to stdout") {
    Sandbox box;
    const auto r = box.run("--help");
    CHECK(r.status == 0);
    CHECK(r.out.find("demand") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("project writes a projection") {
    Sandbox box;
    const auto out = box.root() / "proj";
    const auto r = box.run("project " + toy_args(out) + " --horizon 2");
    REQUIRE(r.status == 0);
    CHECK(r.err.empty());
    const auto csv = slurp(out / "projection.csv");
    CHECK(csv.rfind("region,year,sex,age,count\n", 0) == 0);
    CHECK(csv.find("TOY,2013,") != std::string::npos);
}

TEST_CASE("demand reproduces the golden file and writes a chart") {
    Sandbox box;
    const auto out = box.root() / "demand";
    const auto r = box.run("demand " + toy_args(out) + " --horizon 3 --flows '" +
                           (kData / "toy" / "flows.csv").string() + "'");
    REQUIRE(r.status == 0);
    CHECK(slurp(out / "demand.csv") == slurp(kData / "toy" / "demand_golden.csv"));
    CHECK(slurp(out / "demand.svg").find("<polyline id=\"Male\"") != std::string::npos);
    CHECK(slurp(out / "ledger.csv").rfind("year,active_cards,issued,returned,child_links\n", 0) == 0);
}

TEST_CASE("config file supplies parameters; flags win") {
    Sandbox box;
    const auto nat = kData / "national";
    const auto out = box.root() / "nat";
    const std::string base = "project --config '" + (nat / "params.conf").string() +
                             "' --population '" + (nat / "population.csv").string() +
                             "' --survival '" + (nat / "survival.csv").string() +
                             "' --fertility '" + (nat / "fertility.csv").string() +
                             "' --horizon 1 --out '" + out.string() + "'";
    REQUIRE(box.run(base).status == 0);
    const auto from_config = slurp(out / "projection.csv");
    REQUIRE(box.run(base + " --sex-ratio 1.2").status == 0);
    CHECK(slurp(out / "projection.csv") != from_config);

    const auto bad = box.file("bad.conf", "no-such-option=1\n");
    const auto r = box.run("project --config '" + bad.string() + "' " + toy_args(out) +
                           " --horizon 1");
    CHECK(r.status == 1);
    CHECK(r.err.find("no-such-option") != std::string::npos);
}

TEST_CASE("coverage adjusts counts") {
    Sandbox box;
    std::string rows = "region,sex,age,count\n";
    for (const char *sex : {"M", "F"}) {
        for (int age = 0; age <= 100; ++age) {
            rows += "Z," + std::string(sex) + "," + std::to_string(age) + "," +
                    (age == 30 ? "490000" : "0") + "\n";
        }
    }
    const auto pop = box.file("pop.csv", rows);
    const auto out = box.root() / "cov";
    const auto r = box.run("coverage --population '" + pop.string() + "' --omission 20 --out '" +
                           out.string() + "'");
    REQUIRE(r.status == 0);
    const auto csv = slurp(out / "adjusted_population.csv");
    CHECK(csv.find("Z,M,30,500000") != std::string::npos);
    CHECK(csv.find("Z,F,30,500000") != std::string::npos);
}

TEST_CASE("estimate needs a seed and is reproducible") {
    Sandbox box;
    const auto obs = box.file("obs.csv", "year,count,exposure\n2011,4,1\n2012,6,1\n");
    const auto out = box.root() / "est";
    const std::string args = "estimate --observations '" + obs.string() +
                             "' --samples 2000 --out '" + out.string() + "'";

    const auto missing = box.run(args, "env -u UIDFORGE_SEED");
    CHECK(missing.status == 1);
    CHECK(missing.err.find("seed") != std::string::npos);

    REQUIRE(box.run(args, "UIDFORGE_SEED=17").status == 0);
    const auto chain_env = slurp(out / "chain.csv");
    REQUIRE(box.run(args + " --seed 17").status == 0);
    CHECK(slurp(out / "chain.csv") == chain_env);
    const auto summary = slurp(out / "posterior_summary.csv");
    CHECK(summary.find("conjugate_mean,3.66666") != std::string::npos);
    CHECK(summary.find("seed,17") != std::string::npos);
}

TEST_CASE("errors are reported on stderr with a nonzero exit") {
    Sandbox box;
    const auto out = box.root() / "err";

    const auto toy = kData / "toy";
    const auto missing_file =
        box.run("project --population '" + (box.root() / "nope.csv").string() + "' --survival '" +
                (toy / "survival.csv").string() + "' --fertility '" +
                (toy / "fertility.csv").string() +
                "' --eligible-proportion 0.8 --sex-ratio 1.05 --horizon 1 --out '" + out.string() +
                "'");
    CHECK(missing_file.status != 0);
    CHECK(missing_file.out.empty());
    CHECK(missing_file.err.find("uidforge: error:") != std::string::npos);

    const auto bad_row = box.file("bad.csv", "region,sex,age,count\nZ,M,3,-1\n");
    const auto parse = box.run("coverage --population '" + bad_row.string() + "' --out '" +
                               out.string() + "'");
    CHECK(parse.status == 1);
    CHECK(parse.err.find("bad.csv:2:") != std::string::npos);

    const auto policy = box.run("demand " + toy_args(out) + " --horizon 1 --flows '" +
                                (kData / "toy" / "flows.csv").string() + "' --policy sometimes");
    CHECK(policy.status != 0);
    CHECK(!policy.err.empty());

    const auto no_command = box.run("");
    CHECK(no_command.status != 0);
}
