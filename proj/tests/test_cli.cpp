#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "support/helpers.hpp"

// End-to-end checks that exec the installed binary, so argument parsing, exit
// codes, and artifact layout are tested exactly as a shell user sees them.

using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const testutil::TempDir& scratch) {
    auto out_path = scratch.file("cli_stdout.txt");
    auto err_path = scratch.file("cli_stderr.txt");
    std::string cmd = std::string(GROUNDBENCH_CLI_PATH) + " " + args + " > " +
                      out_path.string() + " 2> " + err_path.string();
    int rc = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = testutil::read_file(out_path);
    result.err = testutil::read_file(err_path);
    return result;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

json read_json(const std::filesystem::path& path) {
    return json::parse(testutil::read_file(path));
}

}  // namespace

TEST_CASE("the full pipeline runs from the command line") {
    testutil::TempDir tmp;
    auto run_dir = tmp.file("run");
    std::string config = (testutil::fixtures_dir() / "e2e_config.json").string();
    std::string common = "--config " + config + " --run-dir " + run_dir.string();

    auto gen = run_cli("generate " + common, tmp);
    INFO("stderr: ", gen.err);
    REQUIRE(gen.exit_code == 0);
    std::string benchmark_bytes = testutil::read_file(run_dir / "benchmark.jsonl");
    CHECK(count_lines(benchmark_bytes) == 40);
    auto manifest = read_json(run_dir / "manifest.json");
    CHECK(manifest.at("seed").get<long long>() == 42);
    CHECK(manifest.at("dataset").get<std::string>() == "e2e_fixture");
    CHECK(manifest.at("counts").at("items").get<int>() == 40);
    CHECK(manifest.at("partial").get<bool>() == false);

    auto qc = run_cli("qc " + common, tmp);
    INFO("stderr: ", qc.err);
    REQUIRE(qc.exit_code == 0);
    CHECK(count_lines(testutil::read_file(run_dir / "quality.jsonl")) == 40);
    auto diversity = read_json(run_dir / "diversity.json");
    CHECK(diversity.at("n_items").get<int>() == 40);
    CHECK(diversity.at("mean_pairwise_cosine").get<double>() < 1.0);

    auto eval = run_cli("eval " + common, tmp);
    INFO("stderr: ", eval.err);
    REQUIRE(eval.exit_code == 0);
    CHECK(count_lines(testutil::read_file(run_dir / "transcripts.jsonl")) == 80);
    CHECK(testutil::read_file(run_dir / "matrix.csv") ==
          "model,e2e_fixture\n"
          "evalA,0.750000\n"
          "evalB,0.400000\n");
    auto matrix = read_json(run_dir / "matrix.json");
    CHECK(matrix.at("models").at("evalA").at("e2e_fixture").at("correct").get<int>() == 30);
    CHECK(matrix.at("models").at("evalB").at("e2e_fixture").at("correct").get<int>() == 16);

    auto analyze = run_cli("analyze " + common, tmp);
    INFO("stderr: ", analyze.err);
    REQUIRE(analyze.exit_code == 0);
    auto agreement = read_json(run_dir / "agreement.json");
    CHECK(agreement.at("pearson_accuracy").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(agreement.at("spearman_rank").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(agreement.at("n_points").get<int>() == 2);
    CHECK(agreement.at("per_model_overperformance").at("evalA").get<double>() ==
          doctest::Approx(0.05).epsilon(1e-12));
    CHECK(agreement.at("per_model_overperformance").at("evalB").get<double>() ==
          doctest::Approx(-0.10).epsilon(1e-12));
    CHECK(std::filesystem::exists(run_dir / "ranks.csv"));
    CHECK(std::filesystem::exists(run_dir / "scatter.csv"));
    CHECK(std::filesystem::exists(run_dir / "length_effect.json"));

    auto report = run_cli("report " + common, tmp);
    INFO("stderr: ", report.err);
    REQUIRE(report.exit_code == 0);
    auto report_json = read_json(run_dir / "report.json");
    for (const char* key : {"benchmark", "quality", "diversity", "matrix", "agreement", "usage"})
        CHECK(report_json.contains(key));
    CHECK(report_json.dump().find("created_at") == std::string::npos);

    auto usage = run_cli("usage " + common, tmp);
    REQUIRE(usage.exit_code == 0);
    CHECK(usage.out.find("genA") != std::string::npos);
    CHECK(usage.out.find("total") != std::string::npos);

    SUBCASE("a warm rerun is served from cache and byte-identical") {
        auto again = run_cli("generate " + common, tmp);
        REQUIRE(again.exit_code == 0);
        CHECK(testutil::read_file(run_dir / "benchmark.jsonl") == benchmark_bytes);
    }

    SUBCASE("--seed overrides the config for a fresh run directory") {
        auto run2 = tmp.file("run2");
        auto r = run_cli("generate --config " + config + " --run-dir " + run2.string() +
                             " --seed 7",
                         tmp);
        REQUIRE(r.exit_code == 0);
        CHECK(read_json(run2 / "manifest.json").at("seed").get<long long>() == 7);
    }
}

TEST_CASE("stage order is enforced: qc before generate fails cleanly") {
    testutil::TempDir tmp;
    auto run_dir = tmp.file("empty_run");
    std::string config = (testutil::fixtures_dir() / "e2e_config.json").string();
    auto r = run_cli("qc --config " + config + " --run-dir " + run_dir.string(), tmp);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find("generate") != std::string::npos);
}

TEST_CASE("bad invocations exit 2 with a diagnostic") {
    testutil::TempDir tmp;
    auto run_dir = tmp.file("run");

    SUBCASE("nonexistent config file") {
        auto r = run_cli("generate --config /nonexistent.json --run-dir " + run_dir.string(),
                         tmp);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("error:") != std::string::npos);
    }

    SUBCASE("config that fails validation") {
        auto config = tmp.file("bad.json");
        testutil::write_file(config, R"({"mode": "sideways", "drop_ceiling": 3.0})");
        auto r = run_cli("generate --config " + config.string() + " --run-dir " +
                             run_dir.string(),
                         tmp);
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("mode") != std::string::npos);
        CHECK(r.err.find("drop_ceiling") != std::string::npos);
    }

    SUBCASE("unknown --mode value is rejected by the parser") {
        std::string config = (testutil::fixtures_dir() / "e2e_config.json").string();
        auto r = run_cli("generate --config " + config + " --run-dir " + run_dir.string() +
                             " --mode essay",
                         tmp);
        CHECK(r.exit_code == 2);
    }

    SUBCASE("--config is required") {
        auto r = run_cli("generate --run-dir " + run_dir.string(), tmp);
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("generation drops above the ceiling exit 1 and are logged") {
    testutil::TempDir tmp;

    // One chunk, two topics; the scripted generator produces a valid item for
    // topic 0 and unusable JSON for everything else.
    testutil::write_file(tmp.file("solo.md"),
                         "# Solo Pump Station\n\n"
                         "The feed pump is backed up by the standby pump, which starts "
                         "automatically when discharge pressure drops below the cutoff "
                         "threshold for more than five seconds.\n");
    json valid_item{{"question", "Which unit backs up the feed pump?"},
                    {"choices",
                     {{"A", "the standby pump"},
                      {"B", "the relief valve"},
                      {"C", "the day tank"},
                      {"D", "the intake strainer"}}},
                    {"answer", "A"},
                    {"justification", "stated directly in the passage"}};
    json script{{"topics/solo#0", json{{"topics", {"alpha", "beta"}}}.dump()},
                {"item/mcq/solo#0/t0", valid_item.dump()},
                {"*", "{\"bogus\": 1}"}};
    auto script_path = tmp.file("gen_script.json");
    testutil::write_file(script_path, script.dump());

    json config{{"seed", 5},
                {"mode", "mcq"},
                {"dataset", "partial_demo"},
                {"docs", {"solo.md"}},
                {"endpoints",
                 json::array({json{{"name", "genP"},
                                   {"base_url", "mock:file?path=" + script_path.string()}}})},
                {"generators", {"genP"}},
                {"max_topics", 2}};
    auto config_path = tmp.file("partial_config.json");
    testutil::write_file(config_path, config.dump(2));

    auto run_dir = tmp.file("run");
    auto r = run_cli("generate --config " + config_path.string() + " --run-dir " +
                         run_dir.string(),
                     tmp);
    INFO("stderr: ", r.err);
    CHECK(r.exit_code == 1);

    CHECK(count_lines(testutil::read_file(run_dir / "benchmark.jsonl")) == 1);
    std::string dropped = testutil::read_file(run_dir / "dropped.jsonl");
    REQUIRE(count_lines(dropped) == 1);
    auto drop = json::parse(dropped);
    CHECK(drop.at("chunk_id").get<std::string>() == "solo#0");
    CHECK(drop.at("topic").get<std::string>() == "beta");
    CHECK_FALSE(drop.at("reason").get<std::string>().empty());
    CHECK(read_json(run_dir / "manifest.json").at("partial").get<bool>() == true);
}
