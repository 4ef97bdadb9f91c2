#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <string>

#include "specinf/errors.hpp"
#include "specinf/modelio.hpp"

namespace specinf {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

// Splits one RFC 4180 record; quoted fields may span lines.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false, any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "json") return ResultFormat::json;
  throw InvalidArgument("unknown result format '" + std::string(name) + "'");
}

void write_results_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.seed << ',' << csv_field(r.family) << ',' << r.n << ',' << num(r.s) << ','
        << csv_field(r.method) << ',' << num(r.log_z) << ',' << (r.error ? num(*r.error) : "") << ','
        << num(r.runtime_ms) << ',' << csv_field(r.diagnostics) << '\n';
  }
}

void write_results_json(const std::vector<ResultRecord>& records, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["seed"] = r.seed;
    o["family"] = r.family;
    o["n"] = r.n;
    o["s"] = r.s;
    o["method"] = r.method;
    o["log_z"] = r.log_z;
    o["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
    o["runtime_ms"] = r.runtime_ms;
    o["diagnostics"] = r.diagnostics;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields)) return {};
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kResultCsvHeader) throw InvalidArgument("unexpected results header");
  std::vector<ResultRecord> out;
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 9) throw InvalidArgument("results row has " + std::to_string(fields.size()) + " fields");
    ResultRecord r;
    r.seed = std::strtoull(fields[0].c_str(), nullptr, 10);
    r.family = fields[1];
    r.n = std::atoi(fields[2].c_str());
    r.s = std::strtod(fields[3].c_str(), nullptr);
    r.method = fields[4];
    r.log_z = std::strtod(fields[5].c_str(), nullptr);
    if (!fields[6].empty()) r.error = std::strtod(fields[6].c_str(), nullptr);
    r.runtime_ms = std::strtod(fields[7].c_str(), nullptr);
    r.diagnostics = fields[8];
    out.push_back(std::move(r));
  }
  return out;
}

void emit_results(const std::vector<ResultRecord>& records, const std::string& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results to '" + path + "'");
  if (format == ResultFormat::csv)
    write_results_csv(records, out);
  else
    write_results_json(records, out);
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace specinf
