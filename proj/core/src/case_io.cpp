#include "gridjam/case_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gridjam/error.hpp"

namespace gridjam {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

// Splits on whitespace and commas.
std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\r'; };
  while (i < s.size()) {
    while (i < s.size() && is_sep(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_sep(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

template <typename T>
T expect_number(std::string_view s, int line_no, std::string_view what) {
  auto v = parse_number<T>(s);
  if (!v) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" +
                    std::string(s) + "'",
                line_no);
  }
  return *v;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    f(text.substr(pos, end - pos), line_no);
    pos = end + 1;
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Grid parse_topology_text(std::string_view text) {
  std::vector<RawLine> lines;
  for_each_line(text, [&](std::string_view raw, int line_no) {
    auto body = strip_comment(raw);
    if (body.empty()) return;
    auto toks = tokens(body);
    if (toks.size() < 2 || toks.size() > 3) {
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected 'from to [susceptance]'",
                  line_no);
    }
    RawLine line;
    line.from_bus = expect_number<int>(toks[0], line_no, "bus id");
    line.to_bus = expect_number<int>(toks[1], line_no, "bus id");
    if (toks.size() == 3) line.susceptance = expect_number<double>(toks[2], line_no, "susceptance");
    lines.push_back(line);
  });
  if (lines.empty()) throw Error(ErrorKind::ValidationError, "topology has no lines");
  try {
    return Grid::from_lines(lines);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DisconnectedGrid) {
      throw Error(ErrorKind::ValidationError, "topology is disconnected");
    }
    throw;
  }
}

Grid parse_topology(const std::filesystem::path& path) {
  return parse_topology_text(read_file(path));
}

Scenario parse_scenario_text(std::string_view text, const Grid& grid) {
  std::map<std::string, std::pair<std::vector<std::string_view>, int>> entries;
  static const std::set<std::string> known{"flows", "phasors", "secure", "p_I", "p_J",
                                           "lambda", "seed", "beta", "gamma"};
  for_each_line(text, [&](std::string_view raw, int line_no) {
    auto body = strip_comment(raw);
    if (body.empty()) return;
    auto colon = body.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'key: value'",
                  line_no);
    }
    std::string key(trim(body.substr(0, colon)));
    if (!known.count(key)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'",
                  line_no);
    }
    if (entries.count(key)) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                  line_no);
    }
    entries[key] = {tokens(body.substr(colon + 1)), line_no};
  });

  auto is_word = [](const std::vector<std::string_view>& v, std::string_view w) {
    return v.size() == 1 && v[0] == w;
  };
  auto scalar = [&](const std::string& key) -> std::optional<std::pair<std::string_view, int>> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    const auto& [vals, line_no] = it->second;
    if (vals.size() != 1) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": '" + key + "' takes one value",
                  line_no);
    }
    return std::make_pair(vals[0], line_no);
  };

  std::vector<int> flow_lines;
  if (auto it = entries.find("flows"); it == entries.end() || is_word(it->second.first, "all")) {
    for (int l = 0; l < grid.line_count(); ++l) flow_lines.push_back(l);
  } else if (!is_word(it->second.first, "none")) {
    for (auto tok : it->second.first) {
      int l = expect_number<int>(tok, it->second.second, "line index");
      if (l < 0 || l >= grid.line_count()) {
        throw Error(ErrorKind::UnknownId, "flow on unknown line index " + std::to_string(l));
      }
      flow_lines.push_back(l);
    }
  }

  std::vector<int> phasor_buses;
  if (auto it = entries.find("phasors"); it != entries.end()) {
    if (is_word(it->second.first, "all")) {
      for (int b = 0; b < grid.bus_count(); ++b) phasor_buses.push_back(b);
    } else if (!is_word(it->second.first, "none")) {
      for (auto tok : it->second.first) {
        int id = expect_number<int>(tok, it->second.second, "bus id");
        auto idx = grid.index_of(id);
        if (!idx) throw Error(ErrorKind::UnknownId, "phasor on unknown bus " + std::to_string(id));
        phasor_buses.push_back(*idx);
      }
    }
  }

  Scenario scenario;
  for (int l : flow_lines) {
    scenario.measurements.push_back(
        Measurement::flow(static_cast<int>(scenario.measurements.size()), l));
  }
  for (int b : phasor_buses) {
    scenario.measurements.push_back(
        Measurement::phasor(static_cast<int>(scenario.measurements.size()), b));
  }

  if (auto it = entries.find("secure"); it != entries.end() && !is_word(it->second.first, "none")) {
    const int m = static_cast<int>(scenario.measurements.size());
    if (is_word(it->second.first, "all")) {
      for (auto& meas : scenario.measurements) meas.secure = true;
    } else {
      for (auto tok : it->second.first) {
        int id = expect_number<int>(tok, it->second.second, "measurement id");
        if (id < 0 || id >= m) {
          throw Error(ErrorKind::UnknownId, "secure id " + std::to_string(id) + " is not a measurement");
        }
        scenario.measurements[id].secure = true;
      }
    }
  }

  if (auto v = scalar("p_I")) scenario.params.p_inject = expect_number<double>(v->first, v->second, "p_I");
  if (auto v = scalar("p_J")) scenario.params.p_jam = expect_number<double>(v->first, v->second, "p_J");
  if (auto v = scalar("seed")) scenario.params.seed = expect_number<std::uint64_t>(v->first, v->second, "seed");
  if (auto v = scalar("gamma")) scenario.params.gamma = expect_number<double>(v->first, v->second, "gamma");
  if (auto v = scalar("beta")) {
    if (v->first == "finite") {
      scenario.params.beta_mode = BetaMode::Finite;
    } else if (v->first == "inf") {
      scenario.params.beta_mode = BetaMode::Infinite;
    } else {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(v->second) + ": beta must be finite|inf",
                  v->second);
    }
  }
  if (auto v = scalar("lambda")) {
    double lambda = expect_number<double>(v->first, v->second, "lambda");
    if (!(lambda > 0.0)) throw Error(ErrorKind::ValidationError, "lambda must be positive");
    scenario.lambda = lambda;
  }
  scenario.params.validate();
  return scenario;
}

Scenario parse_scenario(const std::filesystem::path& path, const Grid& grid) {
  return parse_scenario_text(read_file(path), grid);
}

std::string format_results(const std::vector<ResultRow>& rows) {
  std::string out(kResultHeader);
  out += '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  for (const ResultRow& r : rows) {
    out += r.system + ',' + format_double(r.secure_fraction) + ',' + r.attack + ',' + opt(r.p_jam) +
           ',' + r.beta + ',' + std::to_string(r.trials) + ',' + opt(r.mean_cost) + ',' +
           format_double(r.feasible_fraction) + ',' + format_double(r.mean_runtime_ms) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_results(std::string_view csv) {
  std::vector<ResultRow> rows;
  bool header_seen = false;
  for_each_line(csv, [&](std::string_view raw, int line_no) {
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (raw.empty()) return;
    if (!header_seen) {
      if (raw != kResultHeader) throw Error(ErrorKind::ParseError, "unexpected CSV header", line_no);
      header_seen = true;
      return;
    }
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    for (;;) {
      auto comma = raw.find(',', pos);
      f.push_back(raw.substr(pos, comma == std::string_view::npos ? raw.npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 9) throw Error(ErrorKind::ParseError, "expected 9 CSV fields", line_no);
    auto opt = [&](std::string_view s) -> std::optional<double> {
      if (s == "NA") return std::nullopt;
      return expect_number<double>(s, line_no, "number");
    };
    ResultRow r;
    r.system = std::string(f[0]);
    r.secure_fraction = expect_number<double>(f[1], line_no, "secure_fraction");
    r.attack = std::string(f[2]);
    r.p_jam = opt(f[3]);
    r.beta = std::string(f[4]);
    r.trials = expect_number<int>(f[5], line_no, "trials");
    r.mean_cost = opt(f[6]);
    r.feasible_fraction = expect_number<double>(f[7], line_no, "feasible_fraction");
    r.mean_runtime_ms = expect_number<double>(f[8], line_no, "mean_runtime_ms");
    rows.push_back(std::move(r));
  });
  if (!header_seen) throw Error(ErrorKind::ParseError, "missing CSV header");
  return rows;
}

void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << format_results(rows);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace gridjam
