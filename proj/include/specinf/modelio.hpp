#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specinf/model.hpp"

namespace specinf {

// ---- UAI MARKOV format (binary variables, unary/pairwise factors) ----

struct UaiFactor {
  std::vector<int> scope;     // variable indices, 0 to 2 of them
  std::vector<double> table;  // 2^arity entries, last scope variable fastest
};

struct UaiNetwork {
  std::vector<int> cardinalities;
  std::vector<UaiFactor> factors;
};

/// Reads the factor-product form. Throws ParseError for non-binary variables,
/// arity > 2, nonpositive entries, or malformed counts.
UaiNetwork parse_uai_network(std::istream& in);

/// State 0 maps to x = -1 and state 1 to x = +1. Each log-table is expanded as
/// alpha + beta x_i + gamma x_j + J x_i x_j; theta and log_offset accumulate
/// the linear and constant parts, A_ij and A_ji receive J / 2 each.
GraphicalModel to_model(const UaiNetwork& network);

GraphicalModel parse_uai(std::istream& in);
GraphicalModel parse_uai_text(std::string_view text);
GraphicalModel read_uai_file(const std::string& path);

/// One unary factor per variable (carrying the fields, Tr(A) and log_offset)
/// and one pairwise factor per nonzero off-diagonal coupling.
void write_uai(const GraphicalModel& model, std::ostream& out);
std::string write_uai_text(const GraphicalModel& model);

// ---- Random model families ----

enum class Family { er, complete, complete_bipartite, grid, rank1 };

Family parse_family(std::string_view name);
std::string_view to_string(Family family);

/// Off-diagonal pair count used to normalize the rank-1 coupling strength.
enum class Rank1Normalization {
  n_plus_one,  // n (n + 1)
  offdiag,   // n (n - 1)
};

struct GeneratorSpec {
  Family family = Family::er;
  int n = 10;
  std::optional<double> p;   // ER edge probability
  double s = 1.0;            // coupling strength
  std::optional<int> sign;   // rank-1 eigenvalue sign; drawn when absent
  std::uint64_t seed = 0;
  Rank1Normalization normalization = Rank1Normalization::n_plus_one;
};

/// theta_i ~ U[-1, 1]; A_ij ~ U[-s, s] on the family's edges. rank1 draws v
/// uniform on the sphere and scales A = lambda v v^T so that the mean
/// off-diagonal |A_ij| (over the chosen pair count) equals s.
GraphicalModel generate(const GeneratorSpec& spec);

/// Grid shape rows x cols for n vertices: rows = floor(sqrt n), cols = ceil(n / rows).
std::pair<int, int> grid_shape(int n);

// ---- Result files ----

struct ResultRecord {
  std::uint64_t seed = 0;
  std::string family;
  int n = 0;
  double s = 0.0;
  std::string method;
  double log_z = 0.0;
  std::optional<double> error;
  double runtime_ms = 0.0;
  std::string diagnostics;
};

enum class ResultFormat { csv, json };

ResultFormat parse_result_format(std::string_view name);

inline constexpr std::string_view kResultCsvHeader =
    "seed,family,n,s,method,log_z,error,runtime_ms,diagnostics";

void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& out);
void write_results_json(const std::vector<ResultRecord>& records, std::ostream& out);
std::vector<ResultRecord> read_results_csv(std::istream& in);

/// Writes to `path`; throws IoError when the file cannot be written.
void emit_results(const std::vector<ResultRecord>& records, const std::string& path, ResultFormat format);

}  // namespace specinf
