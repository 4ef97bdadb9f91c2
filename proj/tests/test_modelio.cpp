#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "specinf/errors.hpp"
#include "specinf/modelio.hpp"
#include "specinf/spectral.hpp"
#include "test_util.hpp"

using namespace specinf;

namespace {

const std::string kData = SPECINF_TEST_DATA;

// log of sum over states of the raw factor product.
double raw_factor_log_z(const UaiNetwork& net) {
  const int n = static_cast<int>(net.cardinalities.size());
  std::vector<double> logs(std::size_t{1} << n, 0.0);
  for (std::size_t s = 0; s < logs.size(); ++s) {
    for (const auto& f : net.factors) {
      std::size_t idx = 0;
      for (int v : f.scope) idx = 2 * idx + ((s >> v) & 1);
      logs[s] += std::log(f.table[idx]);
    }
  }
  const double m = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - m);
  return m + std::log(acc);
}

UaiNetwork network_of(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return parse_uai_network(in);
}

ParseError::Kind parse_kind(const std::string& text) {
  try {
    parse_uai_text(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for: " << text);
  return ParseError::Kind::malformed;
}

std::size_t parse_token(const std::string& text) {
  try {
    parse_uai_text(text);
  } catch (const ParseError& e) {
    return e.token();
  }
  return static_cast<std::size_t>(-1);
}

int count_edges(const Matrix& a) {
  int e = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) e += a(i, j) != 0.0;
  return e;
}

}  // namespace

TEST_CASE("parse_uai examples") {
  const GraphicalModel one = parse_uai_text("MARKOV\n1\n2\n1\n1 0\n2\n1.6487 0.6065\n");
  CHECK(one.theta()[0] == doctest::Approx(-0.5).epsilon(1e-4));
  CHECK(std::abs(one.log_offset()) < 1e-4);
  CHECK(std::abs(exact_log_z(one).log_z - std::log(1.6487 + 0.6065)) < 1e-12);

  const GraphicalModel ones = parse_uai_text("MARKOV 2 2 2 3 1 0 1 1 2 0 1  2 1 1 2 1 1 4 1 1 1 1");
  CHECK(ones.theta().isZero());
  CHECK(ones.coupling().isZero());
  CHECK(ones.log_offset() == 0.0);

  const double e = std::exp(1.0);
  std::ostringstream pair;
  pair.precision(17);
  pair << "MARKOV 2 2 2 1 2 0 1 4 " << e << " 1 1 " << e;
  const GraphicalModel p = parse_uai_text(pair.str());
  CHECK(p.coupling()(0, 1) == doctest::Approx(0.25));
  CHECK(p.coupling()(1, 0) == doctest::Approx(0.25));
  CHECK(p.theta().isZero(1e-15));
  CHECK(p.log_offset() == doctest::Approx(0.5));
}

TEST_CASE("parse_uai errors are distinct and positioned") {
  CHECK(parse_kind("BAYES 1 2 0") == ParseError::Kind::malformed);
  CHECK(parse_token("BAYES 1 2 0") == 0);
  CHECK(parse_kind("MARKOV 2 2 3 0") == ParseError::Kind::non_binary);
  CHECK(parse_token("MARKOV 2 2 3 0") == 3);
  CHECK(parse_kind("MARKOV 3 2 2 2 1 3 0 1 2 8 1 1 1 1 1 1 1 1") == ParseError::Kind::arity);
  CHECK(parse_token("MARKOV 3 2 2 2 1 3 0 1 2 8 1 1 1 1 1 1 1 1") == 6);
  CHECK(parse_kind("MARKOV 1 2 1 1 0 2 1 0") == ParseError::Kind::nonpositive_entry);
  CHECK(parse_token("MARKOV 1 2 1 1 0 2 1 0") == 8);
  CHECK(parse_kind("MARKOV 1 2 1 1 0 2 1 -2") == ParseError::Kind::nonpositive_entry);
  CHECK(parse_kind("MARKOV 1 2 1 1 0 3 1 1 1") == ParseError::Kind::malformed);
  CHECK(parse_kind("MARKOV 1 2 2 1 0") == ParseError::Kind::malformed);
  CHECK(parse_kind("MARKOV 1 2 1 1 0 2 1") == ParseError::Kind::malformed);
  CHECK(parse_kind("MARKOV 2 2 2 1 1 5 2 1 1") == ParseError::Kind::malformed);
  CHECK(parse_kind("MARKOV two") == ParseError::Kind::malformed);
  CHECK(parse_kind("MARKOV 0") == ParseError::Kind::malformed);
  CHECK_THROWS_AS(read_uai_file(kData + "/does-not-exist.uai"), IoError);
}

TEST_CASE("bundled files match the raw factor product") {
  for (const char* name : {"zero5", "single", "pair", "grid3x3", "chain6", "mixed12"}) {
    CAPTURE(name);
    const std::string path = kData + "/" + name + ".uai";
    const UaiNetwork net = network_of(path);
    const GraphicalModel m = read_uai_file(path);
    CHECK(std::abs(exact_log_z(m).log_z - raw_factor_log_z(net)) <= 1e-9);
  }
  CHECK(exact_log_z(read_uai_file(kData + "/zero5.uai")).log_z == doctest::Approx(3.465735902800).epsilon(1e-12));
}

TEST_CASE("write_uai round trips") {
  Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 12;
    const GraphicalModel m = testutil::random_model(rng, n, 1.5);
    const GraphicalModel back = parse_uai_text(write_uai_text(m));
    CHECK(std::abs(exact_log_z(back).log_z - exact_log_z(m).log_z) <= 1e-10);
    CHECK((back.theta() - m.theta()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  for (const char* name : {"grid3x3", "mixed12"}) {
    const GraphicalModel m = read_uai_file(kData + "/" + name + ".uai");
    const GraphicalModel back = parse_uai_text(write_uai_text(m));
    CHECK(std::abs(exact_log_z(back).log_z - exact_log_z(m).log_z) <= 1e-10);
  }

  const GraphicalModel indep = GraphicalModel::fields_only(Vector{{0.1, -0.2, 0.3}});
  std::istringstream in(write_uai_text(indep));
  const UaiNetwork net = parse_uai_network(in);
  CHECK(net.factors.size() == 3);
  for (const auto& f : net.factors) CHECK(f.scope.size() == 1);

  CHECK_THROWS(GraphicalModel(Vector(0), Matrix(0, 0)));
}

TEST_CASE("generate validates its spec") {
  GeneratorSpec s;
  s.family = Family::complete;
  s.s = 0.0;
  CHECK_THROWS_AS(generate(s), InvalidArgument);
  s.s = 1.0;
  s.n = 0;
  CHECK_THROWS_AS(generate(s), InvalidArgument);
  GeneratorSpec er;
  er.family = Family::er;
  CHECK_THROWS_AS(generate(er), InvalidArgument);
  er.p = 1.5;
  CHECK_THROWS_AS(generate(er), InvalidArgument);
  GeneratorSpec r1;
  r1.family = Family::rank1;
  r1.sign = 2;
  CHECK_THROWS_AS(generate(r1), InvalidArgument);
  CHECK(parse_family("complete-bipartite") == Family::complete_bipartite);
  CHECK(to_string(Family::rank1) == "rank1");
  CHECK_THROWS_AS(parse_family("tree"), InvalidArgument);
}

TEST_CASE("generate families") {
  GeneratorSpec g;
  g.family = Family::grid;
  g.n = 16;
  g.seed = 4;
  const GraphicalModel grid = generate(g);
  CHECK(count_edges(grid.coupling()) == 24);
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) {
      const bool adjacent = (j == i + 1 && i % 4 != 3) || j == i + 4;
      if (!adjacent) CHECK(grid.coupling()(i, j) == 0.0);
    }
  CHECK(grid_shape(16) == std::pair<int, int>{4, 4});
  CHECK(grid_shape(10) == std::pair<int, int>{3, 4});

  GeneratorSpec c;
  c.family = Family::complete;
  c.n = 9;
  c.s = 2.0;
  const GraphicalModel comp = generate(c);
  CHECK(count_edges(comp.coupling()) == 36);
  CHECK(comp.coupling().cwiseAbs().maxCoeff() <= 2.0);
  CHECK(comp.theta().cwiseAbs().maxCoeff() <= 1.0);
  CHECK(comp.coupling().diagonal().isZero());

  GeneratorSpec b;
  b.family = Family::complete_bipartite;
  b.n = 8;
  const GraphicalModel bip = generate(b);
  CHECK(count_edges(bip.coupling()) == 16);
  CHECK(bip.coupling().topLeftCorner(4, 4).isZero());
  CHECK(bip.coupling().bottomRightCorner(4, 4).isZero());

  GeneratorSpec e;
  e.family = Family::er;
  e.n = 10;
  e.p = 0.0;
  CHECK(generate(e).coupling().isZero());
  e.p = 1.0;
  CHECK(count_edges(generate(e).coupling()) == 45);
}

TEST_CASE("rank1 family scaling, rank and sign") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeneratorSpec r;
    r.family = Family::rank1;
    r.n = 10;
    r.s = 1.0;
    r.seed = seed;
    const GraphicalModel m = generate(r);
    const Matrix& a = m.coupling();
    const double off = a.cwiseAbs().sum() - a.diagonal().cwiseAbs().sum();
    CHECK(std::abs(off / (10.0 * 11.0) - 1.0) <= 1e-9);
    const Spectrum s = eig_sym(a);
    const double top = s.eigenvalues.cwiseAbs().maxCoeff();
    Vector mags = s.eigenvalues.cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size());
    CHECK(mags[mags.size() - 2] <= 1e-9 * top);

    r.normalization = Rank1Normalization::offdiag;
    const Matrix a2 = generate(r).coupling();
    CHECK(std::abs((a2.cwiseAbs().sum() - a2.diagonal().cwiseAbs().sum()) / 90.0 - 1.0) <= 1e-9);

    r.sign = -1;
    CHECK(eig_sym(generate(r).coupling()).lambda(9) < 0.0);
    r.sign = 1;
    CHECK(eig_sym(generate(r).coupling()).lambda(0) > 0.0);
  }
  // lambda > 0 with a same-sign v gives nonnegative off-diagonal couplings.
  const Vector v = Vector{{0.1, 0.5, 0.2, 0.8}}.normalized();
  const Matrix a = 1.7 * v * v.transpose();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(a(i, j) >= 0.0);
}

TEST_CASE("generate is deterministic") {
  for (Family f : {Family::er, Family::complete, Family::complete_bipartite, Family::grid, Family::rank1}) {
    GeneratorSpec s;
    s.family = f;
    s.n = 12;
    s.p = 0.5;
    s.seed = 99;
    CHECK(write_uai_text(generate(s)) == write_uai_text(generate(s)));
    GeneratorSpec t = s;
    t.seed = 100;
    CHECK(write_uai_text(generate(s)) != write_uai_text(generate(t)));
  }
}

TEST_CASE("result files") {
  std::ostringstream empty;
  write_results_csv({}, empty);
  CHECK(empty.str() == std::string(kResultCsvHeader) + "\n");

  ResultRecord r;
  r.seed = 7;
  r.family = "er";
  r.n = 14;
  r.s = 2.5;
  r.method = "bp";
  r.log_z = 12.345678901234567;
  r.error = 0.1;
  r.runtime_ms = 3.25;
  r.diagnostics = "a=1;note=\"x,y\"";
  ResultRecord blank = r;
  blank.error.reset();
  blank.diagnostics.clear();

  std::ostringstream one;
  write_results_csv({r}, one);
  int lines = 0;
  for (char ch : one.str()) lines += ch == '\n';
  CHECK(lines == 2);

  std::ostringstream two;
  write_results_csv({r, blank}, two);
  std::istringstream in(two.str());
  const auto back = read_results_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].seed == 7);
  CHECK(back[0].family == "er");
  CHECK(back[0].n == 14);
  CHECK(back[0].s == 2.5);
  CHECK(back[0].method == "bp");
  CHECK(back[0].log_z == r.log_z);
  CHECK(back[0].error == r.error);
  CHECK(back[0].runtime_ms == 3.25);
  CHECK(back[0].diagnostics == r.diagnostics);
  CHECK_FALSE(back[1].error);
  CHECK(back[1].diagnostics.empty());

  std::ostringstream js;
  write_results_json({r, blank}, js);
  const auto arr = nlohmann::json::parse(js.str());
  REQUIRE(arr.size() == 2);
  std::set<std::string> k0, k1;
  for (auto it = arr[0].begin(); it != arr[0].end(); ++it) k0.insert(it.key());
  for (auto it = arr[1].begin(); it != arr[1].end(); ++it) k1.insert(it.key());
  CHECK(k0 == k1);
  CHECK(k0.size() == 9);
  CHECK(arr[1]["error"].is_null());
  CHECK(arr[0]["log_z"].get<double>() == r.log_z);

  CHECK(parse_result_format("json") == ResultFormat::json);
  CHECK_THROWS_AS(parse_result_format("xml"), InvalidArgument);
  CHECK_THROWS_AS(emit_results({r}, "/nonexistent-dir/x/out.csv", ResultFormat::csv), IoError);

  const auto tmp = std::filesystem::temp_directory_path() / "specinf_results_test.csv";
  emit_results({r}, tmp.string(), ResultFormat::csv);
  std::ifstream f(tmp);
  CHECK(read_results_csv(f).size() == 1);
  std::filesystem::remove(tmp);
}
