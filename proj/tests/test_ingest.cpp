#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <ppsynth/errors.hpp>
#include <ppsynth/ingest.hpp>
#include <ppsynth/point_pattern.hpp>

using namespace ppsynth;

namespace {

// Writes `content` to a scratch file and returns its path.
std::string scratch(const std::string& name, const std::string& content) {
  const std::string path =
      (std::filesystem::temp_directory_path() / ("ppsynth_ingest_" + name)).string();
  std::ofstream out(path);
  out << content;
  return path;
}

bool has_warning(const std::vector<std::string>& warnings, const std::string& needle) {
  for (const std::string& w : warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("file format follows the extension") {
  CHECK(format_from_path("points.geojson") == FileFormat::geojson);
  CHECK(format_from_path("POINTS.JSON") == FileFormat::geojson);
  CHECK(format_from_path("points.csv") == FileFormat::csv);
  CHECK(format_from_path("points.txt") == FileFormat::csv);
  CHECK(format_from_path("noextension") == FileFormat::csv);
}

TEST_CASE("point CSV: header variants, column picking, bad rows") {
  // Plain x,y header.
  const std::string p1 = scratch("pts1.csv", "x,y\n1,2\n3.5,4.5\n");
  const RawPoints r1 = read_points_file(p1, FileFormat::csv);
  REQUIRE(r1.pts.size() == 2);
  CHECK(r1.pts[0].x == 1.0);
  CHECK(r1.pts[1].y == 4.5);
  CHECK(r1.warnings.empty());

  // Case-insensitive lon/lat naming, extra columns, shuffled order.
  const std::string p2 = scratch("pts2.csv", "id,LAT,Lon\n7,52.0,13.4\n8,52.1,13.5\n");
  const RawPoints r2 = read_points_file(p2, FileFormat::csv);
  REQUIRE(r2.pts.size() == 2);
  CHECK(r2.pts[0].x == 13.4);  // lon is x
  CHECK(r2.pts[0].y == 52.0);  // lat is y
  CHECK(r2.pts[1].x == 13.5);

  // Headerless numeric file: the first row is data.
  const std::string p3 = scratch("pts3.csv", "0.5,0.25\n1.5,1.25\n");
  const RawPoints r3 = read_points_file(p3, FileFormat::csv);
  REQUIRE(r3.pts.size() == 2);
  CHECK(r3.pts[0].x == 0.5);

  // Unrecognized header names fall back to the first two columns.
  const std::string p4 = scratch("pts4.csv", "east,north\n10,20\n");
  const RawPoints r4 = read_points_file(p4, FileFormat::csv);
  REQUIRE(r4.pts.size() == 1);
  CHECK(r4.pts[0].x == 10.0);

  // Missing and non-numeric rows are skipped with a counted warning; blank
  // lines are ignored.
  const std::string p5 = scratch("pts5.csv", "x,y\n1,2\n\n3,oops\n4\n5,6\n");
  const RawPoints r5 = read_points_file(p5, FileFormat::csv);
  REQUIRE(r5.pts.size() == 2);
  CHECK(has_warning(r5.warnings, "skipped 2 rows"));

  // Empty file: empty pattern plus a warning, not an error.
  const std::string p6 = scratch("pts6.csv", "");
  const RawPoints r6 = read_points_file(p6, FileFormat::csv);
  CHECK(r6.pts.empty());
  CHECK(has_warning(r6.warnings, "no points"));

  CHECK_THROWS_AS(read_points_file("/nonexistent/nowhere.csv", FileFormat::csv), ParseError);
}

TEST_CASE("point GeoJSON: geometries, wrappers, skip counting") {
  const std::string body = R"({
    "type": "FeatureCollection",
    "features": [
      {"type": "Feature", "geometry": {"type": "Point", "coordinates": [1.0, 2.0]}},
      {"type": "Feature", "geometry": {"type": "MultiPoint", "coordinates": [[3, 4], [5, 6]]}},
      {"type": "Feature", "geometry": {"type": "GeometryCollection", "geometries": [
          {"type": "Point", "coordinates": [7, 8]},
          {"type": "LineString", "coordinates": [[0,0],[1,1]]}]}},
      {"type": "Feature", "geometry": null},
      {"type": "Feature", "geometry": {"type": "Point", "coordinates": ["a", "b"]}}
    ]
  })";
  const std::string path = scratch("pts.geojson", body);
  const RawPoints r = read_points_file(path, FileFormat::geojson);
  REQUIRE(r.pts.size() == 4);
  CHECK(r.pts[0].x == 1.0);
  CHECK(r.pts[1].x == 3.0);
  CHECK(r.pts[2].x == 5.0);
  CHECK(r.pts[3].x == 7.0);
  // Skipped: the LineString, the null geometry, the malformed Point.
  CHECK(has_warning(r.warnings, "skipped 3"));

  // A bare geometry without wrappers works too.
  const std::string bare = scratch("bare.geojson", R"({"type":"Point","coordinates":[9,10]})");
  const RawPoints rb = read_points_file(bare, FileFormat::geojson);
  REQUIRE(rb.pts.size() == 1);
  CHECK(rb.pts[0].y == 10.0);

  const std::string broken = scratch("broken.geojson", "{not json");
  CHECK_THROWS_AS(read_points_file(broken, FileFormat::geojson), ParseError);
}

TEST_CASE("planar ingest: duplicate collapse and window clipping") {
  RawPoints raw;
  raw.pts = {{0.1, 0.1}, {0.2, 0.2}, {0.1, 0.1}, {0.9, 0.9}, {0.2, 0.2}, {1.5, 0.5}, {-0.1, 0.0}};
  const RectDomain dom(0.0, 0.0, 1.0, 1.0);

  const PointIngestResult res = ingest_points_planar(raw, &dom);
  CHECK(res.duplicates == 2);
  CHECK(res.out_of_domain == 2);
  REQUIRE(res.pattern.size() == 3);
  // First occurrences survive in order.
  CHECK(res.pattern.points[0].x == 0.1);
  CHECK(res.pattern.points[1].x == 0.2);
  CHECK(res.pattern.points[2].x == 0.9);
  REQUIRE(res.rejects.size() == 2);
  CHECK(res.rejects[0].x == 1.5);
  CHECK(has_warning(res.warnings, "removed 2 duplicate"));
  CHECK(has_warning(res.warnings, "clipped 2 points"));

  // Without a clip window everything unique is kept.
  const PointIngestResult all = ingest_points_planar(raw, nullptr);
  CHECK(all.pattern.size() == 5);
  CHECK(all.out_of_domain == 0);
}

TEST_CASE("network ingest: snapping with a tolerance") {
  std::vector<Point2> nodes{{0.0, 0.0}, {3.0, 0.0}, {3.0, 4.0}};
  const LinearNetwork net(nodes, {{0, 1}, {1, 2}});

  RawPoints raw;
  raw.pts = {{1.0, 0.05},   // snaps onto the horizontal segment
             {3.02, 2.0},   // snaps onto the vertical segment
             {1.0, 2.0}};   // 2 units away: rejected at tolerance 0.1
  const PointIngestResult res = ingest_points_network(raw, net, 0.1);
  CHECK(res.snap_rejected == 1);
  REQUIRE(res.pattern.size() == 2);
  CHECK(res.pattern.on_network());
  CHECK(res.pattern.net_locs[0].seg == 0);
  CHECK(res.pattern.net_locs[0].offset == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.pattern.net_locs[1].seg == 1);
  CHECK(res.pattern.net_locs[1].offset == doctest::Approx(2.0).epsilon(1e-12));
  // Snapped coordinates are the on-network ones.
  CHECK(res.pattern.points[0].y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.pattern.points[1].x == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(has_warning(res.warnings, "snap tolerance exceeded"));

  // Generous tolerance accepts everything.
  const PointIngestResult loose = ingest_points_network(raw, net, 10.0);
  CHECK(loose.snap_rejected == 0);
  CHECK(loose.pattern.size() == 3);
}

TEST_CASE("polyline CSV: segment rows with a tolerated header") {
  const std::string p1 = scratch("seg1.csv", "x1,y1,x2,y2\n0,0,1,0\n1,0,1,1\n");
  const RawPolylines r1 = read_polylines_file(p1, FileFormat::csv);
  REQUIRE(r1.lines.size() == 2);
  CHECK(r1.lines[0][0].x == 0.0);
  CHECK(r1.lines[0][1].x == 1.0);
  CHECK(r1.lines[1][1].y == 1.0);

  // Headerless numeric rows parse directly; bad rows are counted.
  const std::string p2 = scratch("seg2.csv", "0,0,2,0\n1,2,3\nbad,0,1,1\n2,0,2,2\n");
  const RawPolylines r2 = read_polylines_file(p2, FileFormat::csv);
  REQUIRE(r2.lines.size() == 2);
  CHECK(has_warning(r2.warnings, "skipped 2 rows"));

  const std::string p3 = scratch("seg3.csv", "x1,y1,x2,y2\n");
  CHECK_THROWS_AS(read_polylines_file(p3, FileFormat::csv), ParseError);
}

TEST_CASE("polyline GeoJSON: line strings and wrappers") {
  const std::string body = R"({
    "type": "FeatureCollection",
    "features": [
      {"type": "Feature", "geometry": {"type": "LineString",
        "coordinates": [[0,0],[1,0],[1,1]]}},
      {"type": "Feature", "geometry": {"type": "MultiLineString",
        "coordinates": [[[2,2],[3,2]],[[4,4],[5,4]]]}},
      {"type": "Feature", "geometry": {"type": "Point", "coordinates": [9,9]}}
    ]
  })";
  const std::string path = scratch("lines.geojson", body);
  const RawPolylines r = read_polylines_file(path, FileFormat::geojson);
  REQUIRE(r.lines.size() == 3);
  CHECK(r.lines[0].size() == 3);  // chain of three coordinates
  CHECK(r.lines[1].size() == 2);
  CHECK(r.lines[2][0].x == 4.0);
  CHECK(has_warning(r.warnings, "skipped 1"));
}

TEST_CASE("network assembly: merging, duplicate drop, component selection") {
  RawPolylines raw;
  // A connected L: the shared corner appears twice with a tiny offset.
  raw.lines.push_back({{0.0, 0.0}, {1.0, 0.0}});
  raw.lines.push_back({{1.0, 1e-12}, {1.0, 1.0}});
  // The same first segment again: exact duplicate edge after merging.
  raw.lines.push_back({{0.0, 0.0}, {1.0, 0.0}});
  // A zero-length segment: both endpoints merge into one node.
  raw.lines.push_back({{1.0, 0.0}, {1.0, 1e-13}});

  const NetworkIngestResult res = build_network(raw, false, 1e-9);
  CHECK(res.net.node_count() == 3);
  CHECK(res.net.segment_count() == 2);
  CHECK(res.merged_nodes >= 3);
  CHECK(res.dropped_edges == 2);
  CHECK(res.net.total_length() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(has_warning(res.warnings, "merged"));
  CHECK(has_warning(res.warnings, "zero-length or duplicate"));

  // A second, shorter component far away.
  RawPolylines split = raw;
  split.lines.push_back({{10.0, 10.0}, {10.0, 10.5}});
  CHECK_THROWS_AS(build_network(split, false, 1e-9), ParseError);
  const NetworkIngestResult largest = build_network(split, true, 1e-9);
  CHECK(largest.net.segment_count() == 2);
  CHECK(largest.dropped_segments == 1);
  CHECK(has_warning(largest.warnings, "largest component"));

  // A chain polyline contributes one edge per consecutive pair.
  RawPolylines chain;
  chain.lines.push_back({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {2.0, 3.0}});
  const NetworkIngestResult c = build_network(chain, false, 1e-9);
  CHECK(c.net.node_count() == 4);
  CHECK(c.net.segment_count() == 3);
  CHECK(c.net.total_length() == doctest::Approx(5.0).epsilon(1e-12));

  RawPolylines empty;
  CHECK_THROWS_AS(build_network(empty, false, 1e-9), ParseError);
}

TEST_CASE("lon/lat projection: meters about the box centroid") {
  // One degree of latitude on the chosen sphere.
  const double meters_per_deg = 6371000.0 * M_PI / 180.0;  // ~111194.93

  const LonLatProjection equator{0.0, 0.0};
  const Point2 north = equator.apply(0.0, 1.0);
  CHECK(north.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(north.y == doctest::Approx(meters_per_deg).epsilon(1e-9));
  const Point2 east = equator.apply(1.0, 0.0);
  CHECK(east.x == doctest::Approx(meters_per_deg).epsilon(1e-9));

  // Away from the equator, longitude degrees shrink by cos(lat0).
  const LonLatProjection mid{10.0, 60.0};
  const Point2 p = mid.apply(11.0, 60.0);
  CHECK(p.x == doctest::Approx(meters_per_deg * std::cos(60.0 * M_PI / 180.0)).epsilon(1e-9));
  CHECK(p.y == doctest::Approx(0.0).epsilon(1e-12));

  // The projection centre maps to the origin.
  std::vector<Point2> pts{{13.0, 52.0}, {13.4, 52.2}};
  const BBox box = bbox_of(pts);
  REQUIRE(box.valid);
  const LonLatProjection proj = projection_about(box);
  const Point2 centre = proj.apply(13.2, 52.1);
  CHECK(centre.x == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(centre.y == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  project_in_place(pts, proj);
  CHECK(pts[0].x < 0.0);
  CHECK(pts[1].x > 0.0);

  // Boxes merge coordinate-wise and an empty box cannot anchor a projection.
  BBox a = bbox_of(std::vector<Point2>{{0.0, 0.0}});
  BBox b = bbox_of(std::vector<Point2>{{2.0, -1.0}});
  const BBox m = merge(a, b);
  CHECK(m.x_max == 2.0);
  CHECK(m.y_min == -1.0);
  CHECK_THROWS_AS(projection_about(BBox{}), std::invalid_argument);

  std::vector<std::vector<Point2>> lines{{{13.0, 52.0}, {13.4, 52.2}}};
  const BBox lb = bbox_of(lines);
  CHECK(lb.valid);
  project_in_place(lines, proj);
  CHECK(lines[0][0].x < 0.0);
}

TEST_CASE("pattern CSV round trip preserves coordinates exactly") {
  PointPattern planar;
  planar.push_planar({0.12345678901234567, 0.5});
  planar.push_planar({1.0 / 3.0, 2.0 / 7.0});
  std::ostringstream os;
  write_pattern_csv(os, planar);
  std::istringstream is(os.str());
  const PointPattern back = read_pattern_csv(is);
  REQUIRE(back.size() == 2);
  CHECK_FALSE(back.on_network());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.points[i].x == planar.points[i].x);
    CHECK(back.points[i].y == planar.points[i].y);
  }

  std::vector<Point2> nodes{{0.0, 0.0}, {3.0, 0.0}, {3.0, 4.0}};
  const LinearNetwork net(nodes, {{0, 1}, {1, 2}});
  PointPattern onnet;
  onnet.push_network(net, {0, 1.0 / 3.0});
  onnet.push_network(net, {1, 3.9999999999});
  std::ostringstream os2;
  write_pattern_csv(os2, onnet);
  std::istringstream is2(os2.str());
  const PointPattern back2 = read_pattern_csv(is2);
  REQUIRE(back2.size() == 2);
  REQUIRE(back2.on_network());
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back2.net_locs[i].seg == onnet.net_locs[i].seg);
    CHECK(back2.net_locs[i].offset == onnet.net_locs[i].offset);
    CHECK(back2.points[i].x == onnet.points[i].x);
  }

  // Malformed rows are rejected with the line number.
  std::istringstream bad("x,y\n1,2\n3\n");
  CHECK_THROWS_AS(read_pattern_csv(bad), ParseError);
}
