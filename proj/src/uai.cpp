#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/modelio.hpp"

namespace specinf {

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string tok;
    if (!(in_ >> tok))
      throw ParseError(ParseError::Kind::malformed, index_, std::string("unexpected end of input, expected ") + what);
    ++index_;
    return tok;
  }

  long long next_int(const char* what) {
    const std::string tok = next(what);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0')
      throw ParseError(ParseError::Kind::malformed, position(), "expected integer " + std::string(what) + ", got '" + tok + "'");
    return v;
  }

  double next_double(const char* what) {
    const std::string tok = next(what);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
      throw ParseError(ParseError::Kind::malformed, position(), "expected number " + std::string(what) + ", got '" + tok + "'");
    return v;
  }

  /// Index of the token most recently read.
  std::size_t position() const { return index_ == 0 ? 0 : index_ - 1; }

 private:
  std::istream& in_;
  std::size_t index_ = 0;
};

}  // namespace

UaiNetwork parse_uai_network(std::istream& in) {
  Tokenizer tok(in);
  const std::string kind = tok.next("preamble");
  if (kind != "MARKOV")
    throw ParseError(ParseError::Kind::malformed, tok.position(), "expected MARKOV preamble, got '" + kind + "'");

  UaiNetwork net;
  const long long n = tok.next_int("variable count");
  if (n <= 0) throw ParseError(ParseError::Kind::malformed, tok.position(), "variable count must be positive");
  for (long long i = 0; i < n; ++i) {
    const long long card = tok.next_int("cardinality");
    if (card != 2)
      throw ParseError(ParseError::Kind::non_binary, tok.position(),
                       "variable " + std::to_string(i) + " has cardinality " + std::to_string(card));
    net.cardinalities.push_back(2);
  }
  const long long count = tok.next_int("factor count");
  if (count < 0) throw ParseError(ParseError::Kind::malformed, tok.position(), "negative factor count");
  net.factors.resize(static_cast<std::size_t>(count));
  for (auto& f : net.factors) {
    const long long arity = tok.next_int("scope size");
    if (arity < 0) throw ParseError(ParseError::Kind::malformed, tok.position(), "negative scope size");
    if (arity > 2)
      throw ParseError(ParseError::Kind::arity, tok.position(),
                       "factor of arity " + std::to_string(arity) + " is not pairwise");
    for (long long k = 0; k < arity; ++k) {
      const long long v = tok.next_int("scope variable");
      if (v < 0 || v >= n)
        throw ParseError(ParseError::Kind::malformed, tok.position(), "scope variable " + std::to_string(v) + " out of range");
      f.scope.push_back(static_cast<int>(v));
    }
    if (f.scope.size() == 2 && f.scope[0] == f.scope[1])
      throw ParseError(ParseError::Kind::malformed, tok.position(), "pairwise scope repeats a variable");
  }
  for (auto& f : net.factors) {
    const long long entries = tok.next_int("table size");
    const long long expected = 1LL << f.scope.size();
    if (entries != expected)
      throw ParseError(ParseError::Kind::malformed, tok.position(),
                       "table has " + std::to_string(entries) + " entries, expected " + std::to_string(expected));
    for (long long k = 0; k < entries; ++k) {
      const double v = tok.next_double("table entry");
      if (!(v > 0.0))
        throw ParseError(ParseError::Kind::nonpositive_entry, tok.position(), "table entries must be strictly positive");
      f.table.push_back(v);
    }
  }
  return net;
}

GraphicalModel to_model(const UaiNetwork& network) {
  const int n = static_cast<int>(network.cardinalities.size());
  Vector theta = Vector::Zero(n);
  Matrix a = Matrix::Zero(n, n);
  double offset = 0.0;
  for (const auto& f : network.factors) {
    switch (f.scope.size()) {
      case 0:
        offset += std::log(f.table[0]);
        break;
      case 1: {
        const double l0 = std::log(f.table[0]), l1 = std::log(f.table[1]);
        theta[f.scope[0]] += 0.5 * (l1 - l0);
        offset += 0.5 * (l0 + l1);
        break;
      }
      case 2: {
        const double l00 = std::log(f.table[0]), l01 = std::log(f.table[1]);
        const double l10 = std::log(f.table[2]), l11 = std::log(f.table[3]);
        const int i = f.scope[0], j = f.scope[1];
        offset += 0.25 * (l00 + l01 + l10 + l11);
        theta[i] += 0.25 * (l10 + l11 - l00 - l01);
        theta[j] += 0.25 * (l01 + l11 - l00 - l10);
        const double coupling = 0.25 * (l00 + l11 - l01 - l10);
        a(i, j) += 0.5 * coupling;
        a(j, i) += 0.5 * coupling;
        break;
      }
      default:
        throw ParseError(ParseError::Kind::arity, 0, "factor is not pairwise");
    }
  }
  return GraphicalModel(std::move(theta), std::move(a), offset);
}

GraphicalModel parse_uai(std::istream& in) { return to_model(parse_uai_network(in)); }

GraphicalModel parse_uai_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_uai(in);
}

GraphicalModel read_uai_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse_uai(in);
}

void write_uai(const GraphicalModel& model, std::ostream& out) {
  const int n = model.size();
  const Matrix& a = model.coupling();
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0) pairs.emplace_back(i, j);

  auto checked_exp = [](double v) {
    if (std::abs(v) > 700.0) throw InvalidArgument("model parameter too large for a UAI table");
    return std::exp(v);
  };
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };

  out << "MARKOV\n" << n << '\n';
  for (int i = 0; i < n; ++i) out << (i ? " " : "") << 2;
  out << '\n' << n + pairs.size() << '\n';
  for (int i = 0; i < n; ++i) out << "1 " << i << '\n';
  for (const auto& [i, j] : pairs) out << "2 " << i << ' ' << j << '\n';
  // The constant log_offset + Tr(A) is spread evenly over the unary tables.
  const double share = (model.log_offset() + a.trace()) / n;
  for (int i = 0; i < n; ++i) {
    const double t = model.theta()[i];
    out << "\n2\n" << num(checked_exp(share - t)) << ' ' << num(checked_exp(share + t)) << '\n';
  }
  for (const auto& [i, j] : pairs) {
    const double coupling = 2.0 * a(i, j);
    const std::string same = num(checked_exp(coupling)), diff = num(checked_exp(-coupling));
    out << "\n4\n" << same << ' ' << diff << ' ' << diff << ' ' << same << '\n';
  }
}

std::string write_uai_text(const GraphicalModel& model) {
  std::ostringstream out;
  write_uai(model, out);
  return out.str();
}

}  // namespace specinf
