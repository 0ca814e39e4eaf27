#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hjm/cli.hpp"

namespace hjm {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::vector<TimeSeriesRecord> parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return source + ":" + std::to_string(lineno) + ": "; };

  bool header = false;
  std::vector<TimeSeriesRecord> out;
  std::set<int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!header) {
      const std::vector<std::string> expect{"t", "y", "p0", "p1", "p2"};
      require(cells == expect, where() + "header must be t,y,p0,p1,p2");
      header = true;
      continue;
    }
    require(cells.size() == 5, where() + "expected 5 fields, got " + std::to_string(cells.size()));
    TimeSeriesRecord r;
    double v[4];
    require(parse_number(cells[0], r.t), where() + "malformed t '" + cells[0] + "'");
    for (int k = 0; k < 4; ++k)
      require(parse_number(cells[k + 1], v[k]), where() + "malformed number '" + cells[k + 1] + "'");
    r.y = v[0];
    r.p0 = v[1];
    r.p = {v[2], v[3]};
    require(std::isfinite(r.y) && r.y >= 0.0, where() + "negative output");
    for (double p : {r.p0, v[2], v[3]})
      require(std::isfinite(p) && p > 0.0, where() + "nonpositive price");
    require(seen.insert(r.t).second, where() + "duplicate t=" + std::to_string(r.t));
    try {
      r.validate();
    } catch (const Error& e) {
      fail(e.kind(), where() + e.what());
    }
    out.push_back(std::move(r));
  }
  require(header, source + ": empty input");
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return out;
}

std::vector<TimeSeriesRecord> ingest_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "cannot open " + path);
  return parse_csv(f, path);
}

}  // namespace hjm
