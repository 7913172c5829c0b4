#include "confheat/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "confheat/error.hpp"

namespace confheat {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::kFail || b == Verdict::kFail) return Verdict::kFail;
  if (a == Verdict::kInconclusive || b == Verdict::kInconclusive) return Verdict::kInconclusive;
  return Verdict::kPass;
}

}  // namespace confheat

namespace confheat::report {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Report::Report(std::string experiment, Json effective_config)
    : experiment_(std::move(experiment)), config_(std::move(effective_config)) {}

void Report::add(Row row) { rows_.push_back(std::move(row)); }

void Report::note(const std::string& key, Json value) { summary_[key] = std::move(value); }

Verdict Report::verdict() const {
  Verdict v = Verdict::kPass;
  for (const Row& r : rows_) v = combine(v, r.verdict);
  return v;
}

std::string Report::csv() const {
  std::string out = "experiment,row,quantity,inputs,estimate,std_error,reference,bound,verdict\r\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& r = rows_[i];
    out += csv_field(experiment_) + ',' + std::to_string(i) + ',' + csv_field(r.quantity) + ',' +
           csv_field(r.inputs.dump()) + ',' + format_number(r.estimate) + ',' + format_number(r.std_error) + ',' +
           format_number(r.reference) + ',' + format_number(r.bound) + ',' + to_string(r.verdict) + "\r\n";
  }
  return out;
}

std::string Report::json() const {
  Json j;
  j["schema"] = kSchema;
  j["experiment"] = experiment_;
  j["verdict"] = to_string(verdict());
  j["config"] = config_;
  j["summary"] = summary_;
  Json rows = Json::array();
  for (const Row& r : rows_) {
    Json e;
    e["quantity"] = r.quantity;
    e["inputs"] = r.inputs;
    e["estimate"] = number(r.estimate);
    e["std_error"] = number(r.std_error);
    e["reference"] = number(r.reference);
    e["bound"] = number(r.bound);
    e["verdict"] = to_string(r.verdict);
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

void Report::write(const std::string& prefix) const {
  for (const auto& [ext, body] : {std::pair{".csv", csv()}, std::pair{".json", json()}}) {
    const std::string path = prefix + ext;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << body;
    if (!f.flush()) throw IoError("failed writing " + path);
  }
}

}  // namespace confheat::report
