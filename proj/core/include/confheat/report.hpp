#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "confheat/verdict.hpp"

namespace confheat::report {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal; "inf", "-inf"; NaN (not applicable) is "".
std::string format_number(double v);

/// Finite values as JSON numbers, infinities as "inf"/"-inf", NaN as null.
Json number(double v);

/// RFC 4180: quoted when the field holds a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

/// One measurement. NaN in reference or bound means not applicable.
struct Row {
  std::string quantity;
  Json inputs = Json::object();
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::kPass;
};

inline constexpr std::string_view kSchema = "confheat-report/1";

class Report {
 public:
  Report(std::string experiment, Json effective_config);

  void add(Row row);
  const std::vector<Row>& rows() const { return rows_; }

  /// Extra summary entries, kept in insertion order.
  void note(const std::string& key, Json value);

  /// Worst row verdict (pass for an empty report).
  Verdict verdict() const;

  std::string csv() const;
  std::string json() const;

  /// Writes <prefix>.csv and <prefix>.json. IoError on failure.
  void write(const std::string& prefix) const;

 private:
  std::string experiment_;
  Json config_;
  Json summary_ = Json::object();
  std::vector<Row> rows_;
};

}  // namespace confheat::report
