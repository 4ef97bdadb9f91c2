#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace specinf {

enum class Method { exact, lowrank, spectral_mf, mean_field, bp };

std::string_view to_string(Method m);
/// Accepts the canonical names plus the short aliases "mf" and "spectral".
Method parse_method(std::string_view name);

/// Ordered key/value annotations attached to an estimate.
class Diagnostics {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, long long value);
  void set(std::string key, int value) { set(std::move(key), static_cast<long long>(value)); }
  void set(std::string key, std::size_t value) { set(std::move(key), static_cast<long long>(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

  const std::string* find(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// "k1=v1;k2=v2" in insertion order.
  std::string joined() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct LogZEstimate {
  double log_z = 0.0;  // nats
  Method method = Method::exact;
  std::optional<double> a_priori_bound;
  Diagnostics diagnostics;
};

/// %.12g rendering used for every human-facing log Z value.
std::string format_log_z(double value);

}  // namespace specinf
