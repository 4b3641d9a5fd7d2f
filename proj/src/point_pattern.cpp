#include "ppsynth/point_pattern.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ppsynth/errors.hpp"

namespace ppsynth {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

void write_pattern_csv(std::ostream& os, const PointPattern& p) {
  if (p.on_network()) {
    os << "seg,offset,x,y\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
      os << p.net_locs[i].seg << ',' << format_double(p.net_locs[i].offset) << ','
         << format_double(p.points[i].x) << ',' << format_double(p.points[i].y) << '\n';
    }
  } else {
    os << "x,y\n";
    for (const Point2& q : p.points) {
      os << format_double(q.x) << ',' << format_double(q.y) << '\n';
    }
  }
}

void write_pattern_csv(const std::string& path, const PointPattern& p) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open for writing: " + path);
  write_pattern_csv(os, p);
}

PointPattern read_pattern_csv(std::istream& is) {
  PointPattern out;
  std::string line;
  bool network = false;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 4 && fields[0] == "seg") {
        network = true;
        continue;
      }
      if (fields.size() == 2 && fields[0] == "x") continue;
      // Headerless file: fall through and parse this line as data.
      network = fields.size() == 4;
    }
    double vals[4] = {0, 0, 0, 0};
    const std::size_t want = network ? 4 : 2;
    if (fields.size() != want) {
      throw ParseError("pattern CSV line " + std::to_string(lineno) + ": expected " +
                       std::to_string(want) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < want; ++i) {
      if (!parse_double(fields[i], vals[i])) {
        throw ParseError("pattern CSV line " + std::to_string(lineno) + ": bad number '" +
                         fields[i] + "'");
      }
    }
    if (network) {
      out.net_locs.push_back(NetworkLoc{static_cast<int>(vals[0]), vals[1]});
      out.points.push_back(Point2{vals[2], vals[3]});
    } else {
      out.points.push_back(Point2{vals[0], vals[1]});
    }
  }
  return out;
}

PointPattern read_pattern_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open: " + path);
  return read_pattern_csv(is);
}

}  // namespace ppsynth
