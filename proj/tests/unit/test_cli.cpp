#include "oppsim/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace oppsim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text, const fs::path& base = {})
{
  std::istringstream in(text);
  return parse_config(in, base);
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir
{
  fs::path path;
  explicit TempDir(const std::string& tag)
    : path(fs::temp_directory_path() / ("oppsim_test_" + tag))
  {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmallTraceLike = "scenario.kind = trace_like\n"
                              "scenario.num_destinations = 6\n"
                              "trace_like.nodes = 12\n"
                              "trace_like.days = 2\n"
                              "trace_like.communities = 2\n"
                              "experiment.strategies = [bubble, scorp]\n"
                              "experiment.seeds = 2\n"
                              "sweep.msg_int = [1, 5]\n";

} // namespace

TEST_CASE("parse_config: defaults of a synthetic sweep")
{
  const auto c = parse("scenario.kind = synthetic\nsweep.pause_s = [100, 1000, 10000, 100000]\n");
  c.validate();
  CHECK(c.kind == ScenarioKind::kSynthetic);
  CHECK(c.synthetic.group_size == 50);
  CHECK(c.buffer_bytes == 2'000'000);
  CHECK(c.bandwidth_bps == 250'000);
  CHECK(c.sweep_name == "pause_s");
  CHECK(c.sweep_values == std::vector<double>{100, 1000, 10000, 100000});

  const auto matrix = run_matrix(c);
  CHECK(matrix.size() == 3 * 4 * 10);
  CHECK(matrix.front().strategy == "bubble");
  CHECK(matrix.front().seed == 1);
  CHECK(matrix.back().strategy == "scorp");
  CHECK(matrix.back().param == 100000);
  for (std::size_t i = 0; i < matrix.size(); ++i)
    CHECK(matrix[i].index == i);

  const auto contacts = std::vector<ContactEvent>{};
  const auto sc = build_scenario(c, matrix.front(), contacts);
  CHECK(sc.node_count == 150);
  CHECK(sc.duration == 4 * kDay);
}

TEST_CASE("parse_config: comments, lists, seeds")
{
  const auto c = parse("# header\n"
                       "scenario.kind = trace_like   # inline\n"
                       "experiment.seeds = [3, 9]\n"
                       "experiment.strategies = [epidemic, dlife]\n"
                       "network.bandwidth_bps = infinite\n"
                       "network.buffer_bytes = unlimited\n");
  CHECK(c.kind == ScenarioKind::kTraceLike);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 9});
  CHECK(c.strategies == std::vector<std::string>{"epidemic", "dlife"});
  CHECK(c.bandwidth_bps == kInfiniteBandwidth);
  CHECK(c.buffer_bytes == kUnlimitedBuffer);
  CHECK(c.sweep_name == "msg_int");
}

TEST_CASE("parse_config: errors carry the line and the key")
{
  auto expect_error = [](const std::string& text, std::size_t line, const std::string& key) {
    try
    {
      parse(text);
      FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  expect_error("scenario.kind = synthetic\nsynthetic.colour = red\n", 2, "synthetic.colour");
  expect_error("\n\nsynthetic.pause_s = soon\n", 3, "synthetic.pause_s");
  expect_error("experiment.seeds = 2\nexperiment.seeds = 3\n", 2, "experiment.seeds");
  expect_error("scenario.kind = boat\n", 1, "scenario.kind");
  expect_error("experiment.strategies = [bubble, flood]\n", 1, "experiment.strategies");
  expect_error("experiment.seeds = [1, 2\n", 1, "experiment.seeds");
}

TEST_CASE("validate: missing trace file and bad combinations")
{
  CHECK_THROWS_AS(parse("scenario.kind = trace\nscenario.trace_path = /nonexistent/trace.txt\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse("scenario.kind = trace_like\nsweep.pause_s = [1, 2]\n"), ValidationError);
  CHECK_THROWS_AS(parse("scenario.kind = trace_like\nexperiment.seeds = [4, 4]\n"), ValidationError);
  CHECK_THROWS_AS(parse("scenario.kind = trace_like\nsweep.msg_int = [3]\n"), ValidationError);
}

TEST_CASE("relative trace paths resolve against the config directory")
{
  TempDir dir("relpath");
  fs::create_directories(dir.path / "configs");
  fs::create_directories(dir.path / "data");
  std::ofstream(dir.path / "data" / "t.txt") << "0 1 10 20\n";
  const auto c = parse("scenario.kind = trace\nscenario.trace_path = ../data/t.txt\n", dir.path / "configs");
  CHECK(c.trace_path.lexically_normal() == (dir.path / "data" / "t.txt").lexically_normal());
}

TEST_CASE("trace workloads follow the load sweep")
{
  auto c = parse("scenario.kind = trace_like\nsweep.msg_int = [1, 5, 10, 20, 35]\n");
  c.validate();
  const std::vector<ContactEvent> none;
  std::vector<std::size_t> sizes;
  for (double load : c.sweep_values)
  {
    RunSpec spec{0, "bubble", load, 1};
    sizes.push_back(build_scenario(c, spec, none).workload.messages.size());
  }
  CHECK(sizes == std::vector<std::size_t>{35, 175, 350, 700, 1225});

  RunSpec scorp{0, "scorp", 5, 1};
  const auto sc = build_scenario(c, scorp, none);
  CHECK(sc.workload.messages.front().content_type.has_value());
}

TEST_CASE("run_experiment: dry run writes nothing")
{
  TempDir dir("dry");
  auto c = parse(kSmallTraceLike);
  ExperimentOptions opt;
  opt.out_dir = dir.path;
  opt.dry_run = true;
  std::ostringstream progress;
  const auto r = run_experiment(c, opt, progress);
  CHECK(!fs::exists(dir.path));
  CHECK(r.runs.size() == 2 * 2 * 2);
  CHECK(!progress.str().empty());
}

TEST_CASE("run_experiment: outputs are byte-identical across executions")
{
  TempDir a("det_a");
  TempDir b("det_b");
  auto c = parse(kSmallTraceLike);
  std::ostringstream progress;

  ExperimentOptions oa;
  oa.out_dir = a.path;
  oa.log_events = true;
  ExperimentOptions ob = oa;
  ob.out_dir = b.path;
  ob.jobs = 2;

  REQUIRE(run_experiment(c, oa, progress).ok());
  REQUIRE(run_experiment(c, ob, progress).ok());
  for (const auto* f : {"runs.csv", "aggregate.csv", "manifest.txt"})
  {
    CHECK(fs::exists(a.path / f));
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  CHECK(slurp(a.path / "manifest.txt").find("complete yes") != std::string::npos);
  const auto log = a.path / "events" / "scorp_msg_int-5_seed2.log";
  CHECK(fs::exists(log));
  CHECK(slurp(log) == slurp(b.path / "events" / "scorp_msg_int-5_seed2.log"));
}

TEST_CASE("write_file_atomic replaces the whole file")
{
  TempDir dir("atomic");
  fs::create_directories(dir.path);
  const auto p = dir.path / "x.txt";
  write_file_atomic(p, "first version, longer\n");
  write_file_atomic(p, "second\n");
  CHECK(slurp(p) == "second\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path))
    ++files;
  CHECK(files == 1);
}
