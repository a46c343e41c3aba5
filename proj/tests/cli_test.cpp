#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "alice/config.hpp"
#include "alice/pipeline.hpp"
#include "fixtures.hpp"

namespace alice {
namespace {

namespace fs = std::filesystem;
using namespace alice::testing;

struct Outcome {
  int code;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("alice_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  Outcome run(const std::string& args) const {
    const std::string cmd = std::string(ALICE_BINARY) + " " + args + " >" + path("stdout") + " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(path("stdout")), read_file(path("stderr"))};
  }

  std::string fixture_flags() const {
    const std::string data = ALICE_TEST_DATA;
    return "--graph " + data + "/citation.edges --attrs " + data + "/citation.attrs --output " + dir.string();
  }

  // Small planted benchmark plus a config that trains in seconds.
  void small_setup() {
    write("run.cfg",
          "output = " + dir.string() +
              "\nnodes = 80\nnum_communities = 4\nnoise_vocabulary = 10\n"
              "latent_dim = 8\nepochs = 3\ntrain_queries = 10\nval_queries = 5\ntest_queries = 6\n");
    ASSERT_EQ(run("gen -c " + path("run.cfg")).code, 0);
  }
};

TEST_F(Cli, ExtractCitationQuery) {
  auto r = run("extract " + fixture_flags() + " --query-nodes 4");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* t : {"2\n", "4\n", "6\n"}) EXPECT_NE(r.out.find(t), std::string::npos) << t;
  EXPECT_EQ(read_file(path("candidate.txt")), r.out);
  EXPECT_EQ(read_file(path("trace.csv")).substr(0, 22), "branch,hop,modularity\n");
}

TEST_F(Cli, EmptyQueryFileIsInputError) {
  write("queries.txt", "");
  auto r = run("extract " + fixture_flags() + " --queries " + path("queries.txt"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("query nodes required"), std::string::npos) << r.err;
}

TEST_F(Cli, QueryFileFirstLineUsed) {
  write("queries.txt", "4\t\t\n9\t\t\n");
  auto r = run("extract " + fixture_flags() + " --queries " + path("queries.txt"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("6\n"), std::string::npos);
}

TEST_F(Cli, TauFlagOverridesConfig) {
  write("a.cfg", "tau = 0.2\n");
  auto from_cfg = run("extract -c " + path("a.cfg") + " " + fixture_flags() + " --query-nodes 4");
  ASSERT_EQ(from_cfg.code, 0) << from_cfg.err;
  const std::string trace_cfg = read_file(path("trace.csv"));
  auto flag = run("extract -c " + path("a.cfg") + " --tau 0.8 " + fixture_flags() + " --query-nodes 4");
  ASSERT_EQ(flag.code, 0);
  const std::string trace_flag = read_file(path("trace.csv"));
  ASSERT_EQ(run("extract " + fixture_flags() + " --query-nodes 4").code, 0);
  EXPECT_NE(trace_cfg, trace_flag);
  EXPECT_EQ(trace_flag, read_file(path("trace.csv")));  // 0.8 is also the default
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("fly").code, 1);
  EXPECT_EQ(run("extract --no-such-flag 1").code, 1);
  EXPECT_EQ(run("extract --tau abc").code, 1);
  EXPECT_EQ(run("extract -c " + path("missing.cfg")).code, 1);
  EXPECT_EQ(run("gen --help").code, 0);
}

TEST_F(Cli, MissingInputsAreInputErrors) {
  EXPECT_EQ(run("extract --graph " + path("none.edges") + " --query-nodes 1").code, 2);
  auto r = run("extract " + fixture_flags() + " --query-nodes 77");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'77'"), std::string::npos) << r.err;
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen --output " + dir.string() + " --nodes 60 --num_communities 3").code, 0);
  const std::string first = read_file(path("graph.edges")) + read_file(path("graph.attrs"));
  ASSERT_EQ(run("gen --output " + dir.string() + " --nodes 60 --num_communities 3").code, 0);
  EXPECT_EQ(first, read_file(path("graph.edges")) + read_file(path("graph.attrs")));
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(run("gen --output " + dir.string() + " --p_in 2").code, 1);
}

TEST_F(Cli, TrainTwiceGivesIdenticalFiles) {
  small_setup();
  ASSERT_EQ(run("train -c " + path("run.cfg")).code, 0);
  const std::string model = read_file(path("model.alice"));
  const std::string loss = read_file(path("loss.csv"));
  ASSERT_EQ(run("train -c " + path("run.cfg")).code, 0);
  EXPECT_EQ(model, read_file(path("model.alice")));
  EXPECT_EQ(loss, read_file(path("loss.csv")));
  EXPECT_EQ(loss.substr(0, loss.find('\n')), "epoch,loss,val_f1,bce,wasserstein,local,threshold");
  const auto rows = std::count(loss.begin(), loss.end(), '\n');
  EXPECT_GE(rows, 2);
  EXPECT_LE(rows, 4);
}

TEST_F(Cli, QueryAndEvaluate) {
  small_setup();
  ASSERT_EQ(run("train -c " + path("run.cfg")).code, 0);

  auto q = run("query -c " + path("run.cfg") + " --query-nodes 1");
  ASSERT_EQ(q.code, 0) << q.err;
  auto j = nlohmann::json::parse(q.out);
  EXPECT_NE(std::find(j["nodes"].begin(), j["nodes"].end(), "1"), j["nodes"].end());
  EXPECT_TRUE(j["scores"].is_object());
  EXPECT_GT(j["threshold"].get<double>(), 0.0);
  EXPECT_LT(q.out.find("\"nodes\""), q.out.find("\"threshold\""));

  auto ev1 = run("evaluate -c " + path("run.cfg"));
  ASSERT_EQ(ev1.code, 0) << ev1.err;
  const std::string metrics = read_file(path("metrics.csv"));
  for (const char* key : {"f1,", "avg_degree,", "cpj,"}) EXPECT_NE(metrics.find(key), std::string::npos);
  ASSERT_EQ(run("evaluate -c " + path("run.cfg")).code, 0);
  EXPECT_EQ(metrics, read_file(path("metrics.csv")));
  EXPECT_EQ(ev1.out, metrics);
}

TEST_F(Cli, EmaQueryAcceptedWithEmptyAttributes) {
  small_setup();
  ASSERT_EQ(run("train -c " + path("run.cfg")).code, 0);
  write("q.txt", "1 2\t\t\n");
  auto q = run("query -c " + path("run.cfg") + " --queries " + path("q.txt"));
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_TRUE(nlohmann::json::accept(q.out));
}

TEST_F(Cli, CorruptModelIsIntegrityError) {
  small_setup();
  ASSERT_EQ(run("train -c " + path("run.cfg")).code, 0);
  std::string bytes = read_file(path("model.alice"));
  bytes[bytes.size() / 2] ^= 0x10;
  std::ofstream(path("model.alice"), std::ios::binary) << bytes;
  EXPECT_EQ(run("query -c " + path("run.cfg") + " --query-nodes 1").code, 3);
  EXPECT_EQ(run("evaluate -c " + path("run.cfg")).code, 3);
}

TEST(Pipeline, PerfectOracleScoresGiveF1One) {
  RunConfig cfg;
  const std::string data_dir = ALICE_TEST_DATA;
  cfg.graph = data_dir + "/citation.edges";
  cfg.attrs = data_dir + "/citation.attrs";
  const auto data = load_data(cfg, false);
  std::vector<QueryPair> pairs(2);
  pairs[0].query.nodes = ids(data.graph, {"4"});
  pairs[0].truth = ids(data.graph, {"2", "4", "6"});
  pairs[1].query.nodes = ids(data.graph, {"2"});
  pairs[1].truth = ids(data.graph, {"1", "2", "3"});
  const Scorer oracle = [](const PreparedQuery& p) { return p.targets; };
  auto run = evaluate_queries(data, pairs, oracle, 0.5, cfg.extraction());
  EXPECT_EQ(run.report.f1, 1.0);
  EXPECT_EQ(run.coverage, (std::vector<double>{1.0, 1.0}));
}

}  // namespace
}  // namespace alice
