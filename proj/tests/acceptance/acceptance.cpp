// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "oracles.hpp"
#include "random_scenario.hpp"

#include "oppsim/engine.hpp"
#include "oppsim/experiment.hpp"
#include "oppsim/rng.hpp"
#include "oppsim/social.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace oppsim;
namespace fs = std::filesystem;

#ifndef OPPSIM_SOURCE_DIR
#define OPPSIM_SOURCE_DIR "."
#endif

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string fmt(double v)
{
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

fs::path scratch(const std::string& tag)
{
  auto p = fs::temp_directory_path() / ("oppsim_acceptance_" + tag);
  fs::remove_all(p);
  return p;
}

ExperimentConfig load_config(const std::string& name)
{
  return parse_config_file(fs::path(OPPSIM_SOURCE_DIR) / "configs" / name);
}

/// Mean and CI of one metric per (strategy, param) from the aggregate.
const AggregateRow& find_row(const std::vector<AggregateRow>& rows, const std::string& strategy,
                             double param)
{
  for (const auto& r : rows)
    if (r.strategy == strategy && r.param == param)
      return r;
  throw std::runtime_error("no aggregate row for " + strategy + " " + fmt(param));
}

// 1 ---------------------------------------------------------------------------

Outcome determinism()
{
  auto config = load_config("mobility_sweep_small.conf");
  config.seeds = {1, 2, 3};
  config.sweep_values = {250};
  std::ostringstream progress;
  std::vector<fs::path> dirs = {scratch("det1"), scratch("det2"), scratch("det3")};
  for (std::size_t i = 0; i < dirs.size(); ++i)
  {
    ExperimentOptions opt;
    opt.out_dir = dirs[i];
    opt.jobs = i == 2 ? 2 : 1;
    if (!run_experiment(config, opt, progress).ok())
      return {false, "a run failed"};
  }
  bool same = true;
  for (const auto* f : {"runs.csv", "aggregate.csv"})
    for (std::size_t i = 1; i < dirs.size(); ++i)
      same &= slurp(dirs[0] / f) == slurp(dirs[i] / f) && !slurp(dirs[0] / f).empty();
  for (const auto& d : dirs)
    fs::remove_all(d);
  return {same, "3 executions (1, 1 and 2 jobs), runs.csv and aggregate.csv compared byte for byte"};
}

// 2 ---------------------------------------------------------------------------

std::set<std::pair<MessageId, NodeId>> delivered_pairs(const RunResult& r)
{
  std::set<std::pair<MessageId, NodeId>> out;
  for (const auto& rec : r.log.records())
    if (rec.kind == EventKind::kDeliver)
      out.insert({rec.msg, rec.a});
  return out;
}

Outcome dominance()
{
  Rng rng(20260101);
  std::size_t violations = 0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 50; ++trial)
  {
    for (bool content : {false, true})
    {
      const auto s = testgen::random_scenario(rng, content, kInfiniteBandwidth, kUnlimitedBuffer);
      const auto flood = delivered_pairs(run(s, *make_strategy("epidemic"), 1));
      for (const auto* name : {"bubble", "dlife", "scorp"})
      {
        const auto strategy = make_strategy(name);
        if (strategy->content_oriented() != content)
          continue;
        const auto got = delivered_pairs(run(s, *strategy, 1));
        ++checked;
        if (!std::includes(flood.begin(), flood.end(), got.begin(), got.end()))
          ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(checked) + " strategy runs on 50 scenario pairs, " +
                               std::to_string(violations) + " outside the epidemic set"};
}

// 3 ---------------------------------------------------------------------------

Outcome community_oracle()
{
  Rng rng(99);
  std::size_t mismatches = 0;
  std::size_t nontrivial = 0;
  for (int trial = 0; trial < 50; ++trial)
  {
    const auto n = static_cast<std::size_t>(3 + rng.uniform_int(0, 5));
    SocialParams params;
    params.k = static_cast<std::size_t>(3 + rng.uniform_int(0, 2));
    const double density = 0.3 + 0.6 * rng.uniform01();

    std::vector<std::set<NodeId>> adj(n);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j)
        if (rng.bernoulli(density))
        {
          adj[i].insert(j);
          adj[j].insert(i);
          edges.emplace_back(i, j);
        }

    // Encounters happen over familiar edges only; gossip repeats until no
    // profile learns anything new.
    std::vector<SocialProfile> nodes;
    for (NodeId v = 0; v < n; ++v)
      nodes.emplace_back(v, n, params);
    for (std::size_t i = edges.size(); i > 1; --i)
      std::swap(edges[i - 1], edges[rng.uniform_int(0, i - 1)]);
    bool changed = true;
    while (changed)
    {
      changed = false;
      for (auto [a, b] : edges)
      {
        const auto before_a = nodes[a].community();
        const auto before_b = nodes[b].community();
        update_community(nodes[a], nodes[b], params.familiar_threshold_s, params);
        changed |= !(nodes[a].community() == before_a) || !(nodes[b].community() == before_b);
      }
    }

    for (NodeId v = 0; v < n; ++v)
    {
      auto want = oracle::kclique_community(adj, v, params.k);
      if (want.size() > 1)
        ++nontrivial;
      want.insert(v);
      want.insert(adj[v].begin(), adj[v].end());
      const auto got_v = nodes[v].community().to_vector();
      if (std::set<NodeId>(got_v.begin(), got_v.end()) != want)
        ++mismatches;
    }
  }
  return {mismatches == 0, "50 graphs, " + std::to_string(nontrivial) +
                               " nodes inside a k-clique community, " + std::to_string(mismatches) +
                               " mismatches"};
}

// 4 ---------------------------------------------------------------------------

Outcome estimator()
{
  const double mb = estimate_buffer_occupancy(80340.7, 12, 35, 52);
  return {std::abs(mb - 9.94) <= 0.01, "estimate " + fmt(mb) + " MB"};
}

// 5 ---------------------------------------------------------------------------

Outcome movement_law()
{
  auto params = [](double pause) {
    SyntheticParams p;
    p.map.add_vertex({0.0, 0.0});
    p.map.add_vertex({1.0, 0.0});
    p.map.add_edge(0, 1);
    p.groups = {{"A", 10, {0, 1}}, {"M", 10, {0, 1}}, {"B", 10, {0, 1}}};
    p.pause_time_s = pause;
    p.duration = 4 * kDay;
    return p;
  };
  const auto fast = generate_synthetic(params(100.0), 1).movement_counts;
  const auto slow = generate_synthetic(params(100000.0), 1).movement_counts;
  bool ok = fast.size() == 30 && slow.size() == 30;
  std::size_t lo = ~std::size_t{0};
  std::size_t hi = 0;
  for (auto c : fast)
  {
    ok &= std::abs(static_cast<double>(c) - 3456.0) <= 0.05 * 3456.0;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  std::size_t slo = ~std::size_t{0};
  std::size_t shi = 0;
  for (auto c : slow)
  {
    ok &= c >= 3 && c <= 4;
    slo = std::min(slo, c);
    shi = std::max(shi, c);
  }
  return {ok, "pause 100 s: " + std::to_string(lo) + ".." + std::to_string(hi) +
                  " movements, pause 100000 s: " + std::to_string(slo) + ".." + std::to_string(shi)};
}

// 6 ---------------------------------------------------------------------------

Outcome mobility_sweep()
{
  const auto config = load_config("mobility_sweep_small.conf");
  ExperimentOptions opt;
  opt.out_dir = scratch("mobility");
  std::ostringstream progress;
  const auto result = run_experiment(config, opt, progress);
  fs::remove_all(opt.out_dir);
  if (!result.ok())
    return {false, "a run failed"};

  bool ok = true;
  std::ostringstream detail;
  for (double pause : config.sweep_values)
  {
    const auto& scorp = find_row(result.aggregate, "scorp", pause);
    const auto& bubble = find_row(result.aggregate, "bubble", pause);
    const auto& dlife = find_row(result.aggregate, "dlife", pause);
    const auto& cheaper = bubble.cost.mean <= dlife.cost.mean ? bubble : dlife;
    ok &= scorp.delivery.mean >= 0.95;
    // Intervals must not overlap.
    ok &= scorp.cost.mean + scorp.cost.ci95 < cheaper.cost.mean - cheaper.cost.ci95;
    detail << "pause " << fmt(pause) << ": scorp delivery " << fmt(scorp.delivery.mean) << ", cost "
           << fmt(scorp.cost.mean) << "+-" << fmt(scorp.cost.ci95) << " vs " << cheaper.strategy << ' '
           << fmt(cheaper.cost.mean) << "+-" << fmt(cheaper.cost.ci95) << "; ";
  }
  return {ok, detail.str()};
}

// 7 ---------------------------------------------------------------------------

Outcome load_sweep()
{
  const auto config = load_config("load_sweep.conf");
  ExperimentOptions opt;
  opt.out_dir = scratch("load");
  std::ostringstream progress;
  const auto result = run_experiment(config, opt, progress);
  fs::remove_all(opt.out_dir);
  if (!result.ok())
    return {false, "a run failed"};

  const auto& values = config.sweep_values;
  const double lo = values.front();
  const double hi = values.back();
  const double b_lo = find_row(result.aggregate, "bubble", lo).delivery.mean;
  const double b_hi = find_row(result.aggregate, "bubble", hi).delivery.mean;
  const double drop = (b_lo - b_hi) / b_lo;

  bool scorp_monotone = true;
  double scorp_cost = 0.0;
  double bubble_cost = 0.0;
  std::ostringstream scorp_del;
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    const auto& s = find_row(result.aggregate, "scorp", values[i]);
    scorp_del << (i ? " " : "") << fmt(s.delivery.mean);
    if (i > 0)
      scorp_monotone &= s.delivery.mean >= find_row(result.aggregate, "scorp", values[i - 1]).delivery.mean;
    scorp_cost += s.cost.mean;
    bubble_cost += find_row(result.aggregate, "bubble", values[i]).cost.mean;
  }
  scorp_cost /= static_cast<double>(values.size());
  bubble_cost /= static_cast<double>(values.size());

  const bool ok = drop >= 0.30 && scorp_monotone && scorp_cost * 5.0 <= bubble_cost;
  return {ok, "bubble delivery " + fmt(b_lo) + " -> " + fmt(b_hi) + " (drop " + fmt(drop) +
                  "), scorp delivery [" + scorp_del.str() + "], mean cost scorp " + fmt(scorp_cost) +
                  " vs bubble " + fmt(bubble_cost)};
}

// 8 ---------------------------------------------------------------------------

Outcome social_math()
{
  using std::chrono::hours;
  using std::chrono::minutes;
  using std::chrono::seconds;
  auto at = [](int day, int hour, int minute) { return kDay * day + hours(hour) + minutes(minute); };
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok)
      failed.push_back(what);
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };

  SocialProfile first(0, 4);
  first.record_contact(1, at(0, 9, 0), at(0, 9, 10));
  check(first.average_duration(1, 9, at(0, 9, 30)) == 600.0, "AD first day 600");
  check(first.average_duration(1, 9, at(1, 9, 30)) == 300.0, "AD second day 300");
  check(first.average_duration(1, 9, at(1, 9, 30)) == oracle::incremental_average({600.0, 0.0}),
        "AD recurrence");

  SocialProfile split(0, 3);
  split.record_contact(2, at(0, 14, 0), at(0, 15, 30));
  check(split.average_duration(2, 14, at(0, 23, 0)) == 3600.0, "AD 90 min split first hour");
  check(split.average_duration(2, 15, at(0, 23, 0)) == 1800.0, "AD 90 min split second hour");

  SocialProfile empty(0, 3);
  check(social_weight(empty, 1, at(0, 5, 0)) == 0.0, "weight 0");
  SocialProfile full(0, 3);
  full.record_contact(1, SimTime{0}, kDay);
  check(near(social_weight(full, 1, kDay - seconds(1)), 3600.0), "weight 3600");

  SocialProfile one(0, 4);
  one.record_contact(1, hours(9), hours(9) + seconds(600));
  const SimTime now = at(0, 9, 30);
  std::vector<double> ad(24, 0.0);
  ad[9] = 600.0;
  check(near(social_weight(one, 1, now), 48.0), "weight 48");
  check(near(social_weight(one, 1, now), oracle::decayed_weight(ad, 9)), "weight formula");

  InterestRegistry reg(0, {7});
  check(weight_to_interested(empty, 7, reg, now) == 0.0, "weight_to_interested 0");
  reg.learn(1, {7});
  check(near(weight_to_interested(one, 7, reg, now), 48.0), "weight_to_interested 48");
  one.record_contact(2, at(0, 9, 20), at(0, 9, 20) + seconds(150));
  reg.learn(2, {7, 8});
  check(near(social_weight(one, 2, now), 12.0), "weight 12");
  check(near(weight_to_interested(one, 7, reg, now), 60.0), "weight_to_interested 60");
  check(near(weight_to_interested(one, 8, reg, now), 12.0), "weight_to_interested 12");

  std::string detail = "15 examples";
  for (const auto& f : failed)
    detail += ", failed: " + f;
  return {failed.empty(), detail};
}

} // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 determinism", determinism},
      {"2 epidemic dominance", dominance},
      {"3 community oracle", community_oracle},
      {"4 buffer estimator", estimator},
      {"5 movement law", movement_law},
      {"6 mobility sweep", mobility_sweep},
      {"7 load sweep", load_sweep},
      {"8 social math", social_math},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria)
  {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
      o = fn();
    }
    catch (const std::exception& e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all &= o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt(secs) << " s): " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
