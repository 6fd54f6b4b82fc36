#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "fdrdet/sim.hpp"

using namespace fdrdet;

namespace {

std::string write_temp(const std::string& contents) {
  const std::string path = "test_sim_config.tmp";
  std::ofstream out(path, std::ios::binary);
  out << contents;
  return path;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& ex) {
    return ex.what();
  }
  return {};
}

}  // namespace

TEST_CASE("override parsing") {
  const Scenario sc = parse_overrides({{"gamma", "0.25"}, {"N", "8"}, {"seed", "42"}});
  CHECK(sc.gamma == 0.25);
  CHECK(sc.n == 8);
  CHECK(sc.seed == 42);
  // Untouched fields keep their defaults.
  CHECK(sc.roi_radius == 10.0);
}

TEST_CASE("range and key errors are descriptive") {
  CHECK(contains(message_of([] { parse_overrides({{"alpha", "1.5"}}); }), "alpha"));
  CHECK(contains(message_of([] { parse_overrides({{"gamma", "0"}}); }), "gamma"));
  CHECK(contains(message_of([] { parse_overrides({{"trials", "0"}}); }), "trials"));
  CHECK(contains(message_of([] { parse_overrides({{"bogus", "1"}}); }), "bogus"));
  CHECK(contains(message_of([] { parse_overrides({{"P0", "abc"}}); }), "P0"));
}

TEST_CASE("config file parsing with comments and precedence") {
  const std::string path = write_temp(
      "# experiment configuration\n"
      "N = 12\n"
      "gamma = 0.1   # local level\n"
      "\n"
      "alpha = 0.5\n");
  const Scenario file_only = parse_config(path, {});
  CHECK(file_only.n == 12);
  CHECK(file_only.gamma == 0.1);
  CHECK(file_only.alpha == 0.5);
  // Command-line flags win over file values.
  const Scenario overridden = parse_config(path, {{"gamma", "0.25"}});
  CHECK(overridden.gamma == 0.25);
  CHECK(overridden.n == 12);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_config("does_not_exist.cfg", {}), std::invalid_argument);
  const std::string bad = write_temp("no equals sign here\n");
  CHECK(contains(message_of([&] { parse_config(bad, {}); }), "line 1"));
  std::remove(bad.c_str());
}

TEST_CASE("csv serialization format") {
  ExperimentResult result;
  result.metadata = {{"seed", "7"}};
  result.columns = {"x", "y"};
  result.rows = {{1.0, 0.123456789}, {2.0, 3e-05}};
  CHECK(result.to_csv() == "# seed = 7\nx,y\n1,0.123457\n2,3e-05\n");
  result.row_labels = {"a", "b"};
  result.columns = {"name", "x", "y"};
  CHECK(result.to_csv() == "# seed = 7\nname,x,y\na,1,0.123457\nb,2,3e-05\n");
}

TEST_CASE("substreams are reproducible and tag sensitive") {
  Rng a = Rng::substream(9, 5, "tag");
  Rng b = Rng::substream(9, 5, "tag");
  Rng c = Rng::substream(9, 5, "other-tag");
  Rng d = Rng::substream(9, 6, "tag");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(Rng::substream(9, 5, "tag").next_u64() != c.next_u64());
  CHECK(Rng::substream(9, 5, "tag").next_u64() != d.next_u64());
}

TEST_CASE("results do not depend on the worker count") {
  Scenario sc;
  sc.n = 10;
  sc.alpha = 0.5;
  sc.gamma = 0.1;
  sc.trials = 20000;
  sc.seed = 77;
  Scenario sc8 = sc;
  sc8.workers = 8;
  const CountPmf one = simulate_count_pmf(sc, Hypothesis::G1);
  const CountPmf eight = simulate_count_pmf(sc8, Hypothesis::G1);
  for (std::size_t i = 0; i < one.probs.size(); ++i) CHECK(one.probs[i] == eight.probs[i]);

  // Whole-subcommand check: byte-identical CSV, including the averaged
  // floating-point columns.
  sc.trials = 5000;
  sc8.trials = 5000;
  const std::vector<double> grid = {0.0, 0.5, 1.0};
  CHECK(run_fdr_sweep(sc, grid).to_csv() == run_fdr_sweep(sc8, grid).to_csv());
  CHECK(run_tables(sc).to_csv() == run_tables(sc8).to_csv());
}

TEST_CASE("identical-threshold pmf closed form") {
  Scenario sc;
  sc.n = 10;
  sc.alpha = 0.0;
  const double lambda = 0.05;
  const CountPmf g0 = pmf_identical(sc, Hypothesis::G0, lambda);
  // Under the null the count is Binomial(N, lambda).
  CHECK(g0.probs[0] == doctest::Approx(std::pow(1.0 - lambda, 10)).epsilon(1e-12));
  CHECK(g0.mean() == doctest::Approx(10 * lambda).epsilon(1e-12));
  const CountPmf g1 = pmf_identical(sc, Hypothesis::G1, lambda);
  // A present target can only raise the count distribution.
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < g0.probs.size(); ++i) {
    c0 += g0.probs[i];
    c1 += g1.probs[i];
    CHECK(c1 <= c0 + 1e-12);
  }
  CHECK_THROWS_AS(pmf_identical(sc, Hypothesis::G0, 0.0), std::invalid_argument);
}

TEST_CASE("runner output shapes") {
  Scenario sc;
  sc.n = 4;
  sc.signal_power = 3.0;
  sc.influence_radius = 3.0;
  sc.gamma = 0.1;
  sc.trials = 2000;
  sc.workers = 2;
  const ExperimentResult tables = run_tables(sc);
  CHECK(tables.columns == std::vector<std::string>{"alpha", "i", "numerical", "simulated"});
  CHECK(tables.rows.size() == 3 * 5);  // three alphas, N+1 counts
  double sum_num = 0.0, sum_sim = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    sum_num += tables.rows[r][2];
    sum_sim += tables.rows[r][3];
  }
  CHECK(sum_num == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sum_sim == doctest::Approx(1.0).epsilon(1e-9));

  const ExperimentResult pmf_dump = run_pmf(sc, Hypothesis::G0, false);
  CHECK(pmf_dump.columns == std::vector<std::string>{"i", "prob"});
  CHECK(pmf_dump.rows.size() == 5);
  CHECK(pmf_dump.rows[0][1] == doctest::Approx(0.9));
}
