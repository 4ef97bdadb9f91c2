#include "specinf/logz.hpp"

#include <cstdio>

#include "specinf/errors.hpp"

namespace specinf {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::lowrank: return "lowrank";
    case Method::spectral_mf: return "spectral-mf";
    case Method::mean_field: return "mean-field";
    case Method::bp: return "bp";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::exact;
  if (name == "lowrank") return Method::lowrank;
  if (name == "spectral-mf" || name == "spectral") return Method::spectral_mf;
  if (name == "mean-field" || name == "mf") return Method::mean_field;
  if (name == "bp") return Method::bp;
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

void Diagnostics::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void Diagnostics::set(std::string key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  set(std::move(key), std::string(buf));
}

void Diagnostics::set(std::string key, long long value) { set(std::move(key), std::to_string(value)); }

const std::string* Diagnostics::find(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

std::string Diagnostics::joined() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    if (!out.empty()) out += ';';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string format_log_z(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace specinf
