#include "covest/harness/summary.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "covest/error.hpp"

namespace covest::harness {

namespace {

struct Acc {
  std::size_t index = 0;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean = 0.0;
  double m2 = 0.0;
};

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Minimal CSV split with quote support.
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

double to_num(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in summary");
  }
  return v;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  require(!rows.empty(), ErrorCode::EmptyBatch, "no rows to summarize");
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, Acc> groups;
  std::vector<Key> order;
  for (const auto& r : rows) {
    Key key{r.experiment, r.grid_point, r.estimator, r.metric};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.index = order.size();
      order.push_back(key);
    }
    Acc& a = it->second;
    if (r.failed() || !std::isfinite(r.value)) {
      ++a.failures;
      continue;
    }
    // Welford update.
    ++a.count;
    const double d = r.value - a.mean;
    a.mean += d / static_cast<double>(a.count);
    a.m2 += d * (r.value - a.mean);
  }
  std::vector<SummaryRow> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const Acc& a = groups.at(key);
    SummaryRow s;
    std::tie(s.experiment, s.grid_point, s.estimator, s.metric) = key;
    s.count = a.count;
    s.failures = a.failures;
    s.mean = a.mean;
    if (a.count > 1) {
      const double var = a.m2 / static_cast<double>(a.count - 1);
      s.std_error = std::sqrt(var / static_cast<double>(a.count));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string summary_header() { return "experiment,grid_point,estimator,metric,mean,stderr,count,failures"; }

std::string to_csv_line(const SummaryRow& r) {
  const bool ok = r.count > 0;
  return field(r.experiment) + "," + field(r.grid_point) + "," + field(r.estimator) + "," + field(r.metric) + "," +
         (ok ? format_value(r.mean) : "") + "," + (ok ? format_value(r.std_error) : "") + "," +
         std::to_string(r.count) + "," + std::to_string(r.failures);
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << summary_header() << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

std::vector<SummaryRow> read_summary(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != summary_header()) throw Error(ErrorCode::ParseError, "missing summary header");
  std::vector<SummaryRow> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) throw Error(ErrorCode::ParseError, "expected 8 summary fields");
    SummaryRow r{f[0], f[1], f[2], f[3]};
    r.count = static_cast<std::size_t>(to_num(f[6]));
    r.failures = static_cast<std::size_t>(to_num(f[7]));
    if (r.count > 0) {
      r.mean = to_num(f[4]);
      r.std_error = to_num(f[5]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IOError, "cannot open '" + path + "'");
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  if (first == summary_header()) return read_summary(in);
  return summarize(read_csv(in));
}

}  // namespace covest::harness
