#include "ppsynth/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ppsynth/errors.hpp"

namespace ppsynth {
namespace {

constexpr double kEarthRadius = 6371000.0;  // meters
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (const char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(trim(field));
  return out;
}

std::optional<double> parse_num(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": invalid JSON (" + e.what() + ")");
  }
  return j;
}

// Finds the column pair to read; returns true when the first row is a header.
bool detect_point_columns(const std::vector<std::string>& header, int& cx, int& cy) {
  if (header.size() >= 2 && parse_num(header[0]) && parse_num(header[1])) return false;
  cx = -1;
  cy = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    if (cx < 0 && (name == "x" || name == "lon" || name == "lng" || name == "longitude")) {
      cx = static_cast<int>(i);
    }
    if (cy < 0 && (name == "y" || name == "lat" || name == "latitude")) {
      cy = static_cast<int>(i);
    }
  }
  if (cx < 0 || cy < 0) {
    cx = 0;
    cy = 1;
  }
  return true;
}

void collect_point_geometry(const nlohmann::json& g, std::vector<Point2>& out,
                            std::size_t& skipped) {
  if (!g.is_object() || !g.contains("type")) {
    ++skipped;
    return;
  }
  const std::string type = g.value("type", "");
  if (type == "Feature") {
    if (g.contains("geometry") && !g["geometry"].is_null()) {
      collect_point_geometry(g["geometry"], out, skipped);
    } else {
      ++skipped;
    }
  } else if (type == "FeatureCollection") {
    for (const auto& f : g.value("features", nlohmann::json::array())) {
      collect_point_geometry(f, out, skipped);
    }
  } else if (type == "GeometryCollection") {
    for (const auto& sub : g.value("geometries", nlohmann::json::array())) {
      collect_point_geometry(sub, out, skipped);
    }
  } else if (type == "Point") {
    const auto& c = g["coordinates"];
    if (c.is_array() && c.size() >= 2 && c[0].is_number() && c[1].is_number()) {
      out.push_back(Point2{c[0].get<double>(), c[1].get<double>()});
    } else {
      ++skipped;
    }
  } else if (type == "MultiPoint") {
    for (const auto& c : g.value("coordinates", nlohmann::json::array())) {
      if (c.is_array() && c.size() >= 2 && c[0].is_number() && c[1].is_number()) {
        out.push_back(Point2{c[0].get<double>(), c[1].get<double>()});
      } else {
        ++skipped;
      }
    }
  } else {
    ++skipped;
  }
}

void append_line_coords(const nlohmann::json& coords, std::vector<std::vector<Point2>>& out,
                        std::size_t& skipped) {
  std::vector<Point2> line;
  for (const auto& c : coords) {
    if (c.is_array() && c.size() >= 2 && c[0].is_number() && c[1].is_number()) {
      line.push_back(Point2{c[0].get<double>(), c[1].get<double>()});
    }
  }
  if (line.size() >= 2) {
    out.push_back(std::move(line));
  } else {
    ++skipped;
  }
}

void collect_line_geometry(const nlohmann::json& g, std::vector<std::vector<Point2>>& out,
                           std::size_t& skipped) {
  if (!g.is_object() || !g.contains("type")) {
    ++skipped;
    return;
  }
  const std::string type = g.value("type", "");
  if (type == "Feature") {
    if (g.contains("geometry") && !g["geometry"].is_null()) {
      collect_line_geometry(g["geometry"], out, skipped);
    } else {
      ++skipped;
    }
  } else if (type == "FeatureCollection") {
    for (const auto& f : g.value("features", nlohmann::json::array())) {
      collect_line_geometry(f, out, skipped);
    }
  } else if (type == "GeometryCollection") {
    for (const auto& sub : g.value("geometries", nlohmann::json::array())) {
      collect_line_geometry(sub, out, skipped);
    }
  } else if (type == "LineString") {
    append_line_coords(g.value("coordinates", nlohmann::json::array()), out, skipped);
  } else if (type == "MultiLineString") {
    for (const auto& part : g.value("coordinates", nlohmann::json::array())) {
      append_line_coords(part, out, skipped);
    }
  } else {
    ++skipped;
  }
}

std::string fmt_pt(const Point2& p) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", p.x, p.y);
  return buf;
}

std::string reject_summary(const char* what, const std::vector<Point2>& pts) {
  std::ostringstream os;
  os << what << ' ' << pts.size() << " point" << (pts.size() == 1 ? "" : "s") << ": ";
  const std::size_t show = std::min<std::size_t>(pts.size(), 5);
  for (std::size_t i = 0; i < show; ++i) {
    if (i) os << ", ";
    os << fmt_pt(pts[i]);
  }
  if (pts.size() > show) os << ", ... (" << pts.size() - show << " more)";
  return os.str();
}

std::vector<Point2> dedup_exact(const std::vector<Point2>& raw, std::size_t& duplicates) {
  std::vector<Point2> out;
  std::map<std::pair<double, double>, bool> seen;
  for (const Point2& p : raw) {
    if (seen.emplace(std::make_pair(p.x, p.y), true).second) {
      out.push_back(p);
    } else {
      ++duplicates;
    }
  }
  return out;
}

}  // namespace

FileFormat format_from_path(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  return (ext == "geojson" || ext == "json") ? FileFormat::geojson : FileFormat::csv;
}

RawPoints read_points_file(const std::string& path, FileFormat format) {
  RawPoints out;
  if (format == FileFormat::geojson) {
    std::size_t skipped = 0;
    collect_point_geometry(read_json(path), out.pts, skipped);
    if (skipped > 0) {
      out.warnings.push_back(path + ": skipped " + std::to_string(skipped) +
                             " non-point or malformed geometries");
    }
  } else {
    const std::vector<std::string> lines = read_lines(path);
    int cx = 0, cy = 1;
    bool header_checked = false;
    std::size_t bad_rows = 0;
    for (const std::string& line : lines) {
      if (trim(line).empty()) continue;
      const std::vector<std::string> fields = split_csv(line);
      if (!header_checked) {
        header_checked = true;
        if (detect_point_columns(fields, cx, cy)) continue;
      }
      if (static_cast<int>(fields.size()) <= std::max(cx, cy)) {
        ++bad_rows;
        continue;
      }
      const auto x = parse_num(fields[cx]);
      const auto y = parse_num(fields[cy]);
      if (!x || !y) {
        ++bad_rows;
        continue;
      }
      out.pts.push_back(Point2{*x, *y});
    }
    if (bad_rows > 0) {
      out.warnings.push_back(path + ": skipped " + std::to_string(bad_rows) +
                             " rows with missing or non-numeric coordinates");
    }
  }
  if (out.pts.empty()) out.warnings.push_back(path + ": no points found (empty pattern)");
  return out;
}

RawPolylines read_polylines_file(const std::string& path, FileFormat format) {
  RawPolylines out;
  if (format == FileFormat::geojson) {
    std::size_t skipped = 0;
    collect_line_geometry(read_json(path), out.lines, skipped);
    if (skipped > 0) {
      out.warnings.push_back(path + ": skipped " + std::to_string(skipped) +
                             " non-line or malformed geometries");
    }
  } else {
    const std::vector<std::string> lines = read_lines(path);
    bool header_checked = false;
    std::size_t bad_rows = 0;
    for (const std::string& line : lines) {
      if (trim(line).empty()) continue;
      const std::vector<std::string> fields = split_csv(line);
      if (!header_checked) {
        header_checked = true;
        if (fields.size() < 4 || !parse_num(fields[0]) || !parse_num(fields[1]) ||
            !parse_num(fields[2]) || !parse_num(fields[3])) {
          continue;  // header row
        }
      }
      if (fields.size() < 4) {
        ++bad_rows;
        continue;
      }
      const auto x1 = parse_num(fields[0]), y1 = parse_num(fields[1]);
      const auto x2 = parse_num(fields[2]), y2 = parse_num(fields[3]);
      if (!x1 || !y1 || !x2 || !y2) {
        ++bad_rows;
        continue;
      }
      out.lines.push_back({Point2{*x1, *y1}, Point2{*x2, *y2}});
    }
    if (bad_rows > 0) {
      out.warnings.push_back(path + ": skipped " + std::to_string(bad_rows) +
                             " rows with missing or non-numeric coordinates");
    }
  }
  if (out.lines.empty()) throw ParseError(path + ": no line geometry found");
  return out;
}

Point2 LonLatProjection::apply(double lon, double lat) const {
  return Point2{kEarthRadius * std::cos(lat0 * kDegToRad) * (lon - lon0) * kDegToRad,
                kEarthRadius * (lat - lat0) * kDegToRad};
}

void BBox::add(const Point2& p) {
  if (!valid) {
    x_min = x_max = p.x;
    y_min = y_max = p.y;
    valid = true;
    return;
  }
  x_min = std::min(x_min, p.x);
  x_max = std::max(x_max, p.x);
  y_min = std::min(y_min, p.y);
  y_max = std::max(y_max, p.y);
}

BBox bbox_of(const std::vector<Point2>& pts) {
  BBox b;
  for (const Point2& p : pts) b.add(p);
  return b;
}

BBox bbox_of(const std::vector<std::vector<Point2>>& lines) {
  BBox b;
  for (const auto& line : lines) {
    for (const Point2& p : line) b.add(p);
  }
  return b;
}

BBox merge(const BBox& a, const BBox& b) {
  if (!a.valid) return b;
  BBox out = a;
  if (b.valid) {
    out.add(Point2{b.x_min, b.y_min});
    out.add(Point2{b.x_max, b.y_max});
  }
  return out;
}

LonLatProjection projection_about(const BBox& box) {
  if (!box.valid) throw std::invalid_argument("projection_about: empty bounding box");
  return LonLatProjection{0.5 * (box.x_min + box.x_max), 0.5 * (box.y_min + box.y_max)};
}

void project_in_place(std::vector<Point2>& pts, const LonLatProjection& proj) {
  for (Point2& p : pts) p = proj.apply(p.x, p.y);
}

void project_in_place(std::vector<std::vector<Point2>>& lines, const LonLatProjection& proj) {
  for (auto& line : lines) project_in_place(line, proj);
}

PointIngestResult ingest_points_planar(const RawPoints& raw, const RectDomain* clip) {
  PointIngestResult out;
  out.warnings = raw.warnings;
  const std::vector<Point2> unique = dedup_exact(raw.pts, out.duplicates);
  if (out.duplicates > 0) {
    out.warnings.push_back("removed " + std::to_string(out.duplicates) + " duplicate rows");
  }
  for (const Point2& p : unique) {
    if (clip != nullptr && !clip->contains(p)) {
      ++out.out_of_domain;
      out.rejects.push_back(p);
    } else {
      out.pattern.push_planar(p);
    }
  }
  if (out.out_of_domain > 0) {
    out.warnings.push_back(reject_summary("clipped", out.rejects));
  }
  return out;
}

PointIngestResult ingest_points_network(const RawPoints& raw, const LinearNetwork& net,
                                        double tolerance) {
  PointIngestResult out;
  out.warnings = raw.warnings;
  const std::vector<Point2> unique = dedup_exact(raw.pts, out.duplicates);
  if (out.duplicates > 0) {
    out.warnings.push_back("removed " + std::to_string(out.duplicates) + " duplicate rows");
  }
  for (const Point2& p : unique) {
    double d = 0.0;
    const NetworkLoc loc = net.snap(p, &d);
    if (d <= tolerance) {
      out.pattern.push_network(net, loc);
    } else {
      ++out.snap_rejected;
      out.rejects.push_back(p);
    }
  }
  if (out.snap_rejected > 0) {
    out.warnings.push_back(
        reject_summary("snap tolerance exceeded, rejected", out.rejects));
  }
  return out;
}

NetworkIngestResult build_network(const RawPolylines& raw, bool largest_component,
                                  double node_tolerance) {
  // Merge endpoints within tolerance via a bucketed neighbor lookup.
  std::vector<Point2> nodes;
  std::map<std::pair<long long, long long>, std::vector<int>> buckets;
  const double cell = std::max(node_tolerance, 1e-300);
  std::size_t merged = 0;
  const auto node_id = [&](const Point2& p) {
    const long long kx = static_cast<long long>(std::floor(p.x / cell));
    const long long ky = static_cast<long long>(std::floor(p.y / cell));
    for (long long dx = -1; dx <= 1; ++dx) {
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find({kx + dx, ky + dy});
        if (it == buckets.end()) continue;
        for (const int id : it->second) {
          if (dist(nodes[id], p) <= node_tolerance) {
            ++merged;
            return id;
          }
        }
      }
    }
    nodes.push_back(p);
    const int id = static_cast<int>(nodes.size()) - 1;
    buckets[{kx, ky}].push_back(id);
    return id;
  };

  std::vector<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, bool> seen_edges;
  std::size_t dropped_edges = 0;
  for (const auto& line : raw.lines) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const int a = node_id(line[i]);
      const int b = node_id(line[i + 1]);
      if (a == b) {
        ++dropped_edges;  // collapsed to zero length by node merging
        continue;
      }
      const auto key = std::minmax(a, b);
      if (!seen_edges.emplace(std::make_pair(key.first, key.second), true).second) {
        ++dropped_edges;  // exact duplicate edge
        continue;
      }
      edges.emplace_back(a, b);
    }
  }
  if (edges.empty()) throw ParseError("network has no usable segments");

  // Connected components over nodes that carry edges.
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  const std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);

  std::map<int, double> comp_length;
  for (const auto& [a, b] : edges) comp_length[find(a)] += dist(nodes[a], nodes[b]);
  int best = -1;
  for (const auto& [root, len] : comp_length) {
    if (best < 0 || len > comp_length[best]) best = root;
  }

  std::size_t dropped_segments = 0;
  double dropped_length = 0.0;
  std::vector<std::pair<int, int>> kept;
  for (const auto& [a, b] : edges) {
    if (find(a) == best) {
      kept.emplace_back(a, b);
    } else {
      ++dropped_segments;
      dropped_length += dist(nodes[a], nodes[b]);
    }
  }
  if (dropped_segments > 0 && !largest_component) {
    throw ParseError("network is disconnected (" + std::to_string(comp_length.size()) +
                     " components); enable largest-component selection to proceed");
  }

  // Compact node indices to the kept edges.
  std::vector<int> remap(nodes.size(), -1);
  std::vector<Point2> kept_nodes;
  for (auto& [a, b] : kept) {
    for (int* v : {&a, &b}) {
      if (remap[*v] < 0) {
        remap[*v] = static_cast<int>(kept_nodes.size());
        kept_nodes.push_back(nodes[*v]);
      }
      *v = remap[*v];
    }
  }

  NetworkIngestResult out{LinearNetwork(std::move(kept_nodes), kept), merged, dropped_edges,
                          dropped_segments, raw.warnings};
  if (merged > 0) {
    out.warnings.push_back("merged " + std::to_string(merged) + " coincident endpoints");
  }
  if (dropped_edges > 0) {
    out.warnings.push_back("dropped " + std::to_string(dropped_edges) +
                           " zero-length or duplicate segments");
  }
  if (dropped_segments > 0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", dropped_length);
    out.warnings.push_back("kept the largest component; dropped " +
                           std::to_string(dropped_segments) + " segments totalling " + buf +
                           " length units");
  }
  return out;
}

}  // namespace ppsynth
