#include "aamkit/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "aamkit/error.hpp"

namespace aamkit::io {

namespace {

constexpr const char* kColumns =
    "n\tcost\tcross_cost\teps\tgamma\tdrift_ok\tdrift_slack\toracle_cross\tproof_a\tp\tq";
constexpr std::size_t kColumnCount = 11;

void put_real(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
  } else if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
  } else {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
  }
}

void put_point(std::string& out, const Point& p) {
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j > 0) out += ',';
    put_real(out, p[j]);
  }
}

void put_optional(std::string& out, const std::optional<double>& v) {
  if (v) {
    put_real(out, *v);
  } else {
    out += '-';
  }
}

std::string clean(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Parser {
  std::size_t row;

  [[noreturn]] void fail(const std::string& what) const {
    throw CorruptTraceError(row, what);
  }

  double real(const std::string& s) const {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail("bad real '" + s + "'");
    }
    return v;
  }

  std::uint64_t integer(const std::string& s, int base = 10) const {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail("bad integer '" + s + "'");
    }
    return v;
  }

  std::optional<double> optional_real(const std::string& s) const {
    if (s == "-") return std::nullopt;
    return real(s);
  }

  Point point(const std::string& s) const {
    Point p;
    if (s.empty()) return p;
    for (const auto& part : split(s, ',')) p.push_back(real(part));
    return p;
  }

  bool flag(const std::string& s) const {
    if (s == "1") return true;
    if (s == "0") return false;
    fail("bad flag '" + s + "'");
  }
};

}  // namespace

void write_trace(std::ostream& out, const AamTrace& trace, const TraceHeader& header) {
  std::string buf;
  buf += "# ";
  buf += kTraceSchema;
  buf += "\n# scenario\t" + clean(header.scenario) + "\n";
  char hex[17];
  const auto res = std::to_chars(hex, hex + 16, header.scenario_hash, 16);
  buf += "# scenario_hash\t" + std::string(16 - (res.ptr - hex), '0') +
         std::string(hex, res.ptr) + "\n";
  buf += "# seed\t" + std::to_string(header.seed) + "\n";
  buf += "# status\t" + to_string(trace.status) + "\n";
  buf += std::string("# eps_available\t") + (trace.eps_available ? "1" : "0") + "\n";
  buf += std::string("# eps_estimated\t") + (trace.eps_estimated ? "1" : "0") + "\n";
  buf += "# liminf\t";
  put_real(buf, trace.liminf_estimate);
  buf += '\n';
  for (const auto& c : trace.limit_candidates) {
    buf += "# candidate\t" + std::to_string(c.n) + '\t';
    put_real(buf, c.cost);
    buf += '\t';
    put_point(buf, c.p);
    buf += '\t';
    put_point(buf, c.q);
    buf += '\n';
  }
  buf += "# columns\t";
  buf += kColumns;
  buf += '\n';
  out << buf;

  for (const auto& r : trace.records) {
    buf.clear();
    buf += std::to_string(r.n) + '\t';
    put_real(buf, r.cost);
    buf += '\t';
    put_real(buf, r.cross_cost);
    buf += '\t';
    put_real(buf, r.eps);
    buf += '\t';
    put_real(buf, r.gamma);
    buf += '\t';
    buf += r.drift_ok ? (*r.drift_ok ? "1" : "0") : "-";
    buf += '\t';
    put_optional(buf, r.drift_slack);
    buf += '\t';
    put_optional(buf, r.oracle_cross);
    buf += '\t';
    put_optional(buf, r.proof_a);
    buf += '\t';
    put_point(buf, r.p);
    buf += '\t';
    put_point(buf, r.q);
    buf += '\n';
    out << buf;
  }
  out << "# end rows=" << trace.records.size() << '\n';
}

void write_trace(const std::string& path, const AamTrace& trace,
                 const TraceHeader& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open trace file '" + path + "' for writing");
  write_trace(out, trace, header);
  out.flush();
  if (!out) throw IoError("failed writing trace file '" + path + "'");
}

TraceFile read_trace(std::istream& in) {
  TraceFile file;
  auto& trace = file.trace;
  Parser parse{0};
  std::string line;

  if (!std::getline(in, line) || line != std::string("# ") + kTraceSchema) {
    parse.fail("missing schema line '# " + std::string(kTraceSchema) + "'");
  }
  bool columns_seen = false;
  bool ended = false;
  while (std::getline(in, line)) {
    parse.row = trace.records.size();
    if (ended) parse.fail("content after the end marker");
    if (line.rfind("# ", 0) == 0) {
      const auto fields = split(line.substr(2), '\t');
      const auto& key = fields[0];
      if (key.rfind("end rows=", 0) == 0) {
        if (parse.integer(key.substr(9)) != trace.records.size()) {
          parse.fail("end marker row count does not match");
        }
        ended = true;
        continue;
      }
      if (columns_seen) parse.fail("header line after the column line");
      if (key == "columns") {
        if (line.substr(2 + 8) != kColumns) parse.fail("unexpected column layout");
        columns_seen = true;
        continue;
      }
      if (key == "candidate") {
        if (fields.size() != 5) parse.fail("bad candidate line");
        trace.limit_candidates.push_back({parse.point(fields[3]), parse.point(fields[4]),
                                          parse.real(fields[2]),
                                          static_cast<std::size_t>(parse.integer(fields[1]))});
        continue;
      }
      if (fields.size() != 2) parse.fail("bad header line '" + key + "'");
      const auto& value = fields[1];
      if (key == "scenario") {
        file.header.scenario = value;
      } else if (key == "scenario_hash") {
        file.header.scenario_hash = parse.integer(value, 16);
      } else if (key == "seed") {
        file.header.seed = parse.integer(value);
      } else if (key == "status") {
        try {
          trace.status = run_status_from_string(value);
        } catch (const DomainError& e) {
          parse.fail(e.what());
        }
      } else if (key == "eps_available") {
        trace.eps_available = parse.flag(value);
      } else if (key == "eps_estimated") {
        trace.eps_estimated = parse.flag(value);
      } else if (key == "liminf") {
        trace.liminf_estimate = parse.real(value);
      } else {
        parse.fail("unknown header key '" + key + "'");
      }
      continue;
    }
    if (!columns_seen) parse.fail("data row before the column line");
    const auto f = split(line, '\t');
    if (f.size() != kColumnCount) {
      parse.fail("expected " + std::to_string(kColumnCount) + " fields, found " +
                 std::to_string(f.size()));
    }
    TraceRecord r;
    r.n = static_cast<std::size_t>(parse.integer(f[0]));
    if (r.n != trace.records.size()) parse.fail("row index is not contiguous");
    r.cost = parse.real(f[1]);
    r.cross_cost = parse.real(f[2]);
    r.eps = parse.real(f[3]);
    r.gamma = parse.real(f[4]);
    if (f[5] != "-") r.drift_ok = parse.flag(f[5]);
    r.drift_slack = parse.optional_real(f[6]);
    r.oracle_cross = parse.optional_real(f[7]);
    r.proof_a = parse.optional_real(f[8]);
    r.p = parse.point(f[9]);
    r.q = parse.point(f[10]);
    trace.records.push_back(std::move(r));
  }
  if (!ended) {
    parse.row = trace.records.size();
    parse.fail("file is truncated (no end marker)");
  }
  return file;
}

TraceFile read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

}  // namespace aamkit::io
