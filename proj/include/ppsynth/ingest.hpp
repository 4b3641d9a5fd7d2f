#pragma once

#include <string>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"
#include "ppsynth/point_pattern.hpp"

namespace ppsynth {

enum class FileFormat { csv, geojson };

// .geojson / .json extensions select GeoJSON; everything else is CSV.
FileFormat format_from_path(const std::string& path);

// Raw coordinates straight from a file, before any cleaning.
struct RawPoints {
  std::vector<Point2> pts;
  std::vector<std::string> warnings;
};

// Raw polylines (each a coordinate chain of length >= 2).
struct RawPolylines {
  std::vector<std::vector<Point2>> lines;
  std::vector<std::string> warnings;
};

// Point files: CSV with a tolerated header row (columns named x/y or
// lon(gitude)/lat(itude) are recognized; otherwise the first two columns are
// used) or GeoJSON Point/MultiPoint geometries, optionally wrapped in
// Feature/FeatureCollection/GeometryCollection.  Rows with missing or
// non-numeric coordinates are skipped with a counted warning; an empty file
// yields an empty list plus a warning.  Throws ParseError when the file
// cannot be opened or the JSON is malformed.
RawPoints read_points_file(const std::string& path, FileFormat format);

// Network files: CSV edge lists with columns x1,y1,x2,y2 (header row
// tolerated) or GeoJSON LineString/MultiLineString geometries with the same
// wrappers as above.  Non-line geometries are skipped with a counted
// warning.
RawPolylines read_polylines_file(const std::string& path, FileFormat format);

// Local equirectangular projection (meters) about a reference lon/lat, for
// data shipped in degrees.  x = R cos(lat0) dlon, y = R dlat.
struct LonLatProjection {
  double lon0 = 0.0;
  double lat0 = 0.0;
  Point2 apply(double lon, double lat) const;
};

struct BBox {
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  bool valid = false;
  void add(const Point2& p);
};
BBox bbox_of(const std::vector<Point2>& pts);
BBox bbox_of(const std::vector<std::vector<Point2>>& lines);
BBox merge(const BBox& a, const BBox& b);

// Projection centered on the box midpoint.  The box must be valid.
LonLatProjection projection_about(const BBox& box);
void project_in_place(std::vector<Point2>& pts, const LonLatProjection& proj);
void project_in_place(std::vector<std::vector<Point2>>& lines, const LonLatProjection& proj);

// Cleaned planar pattern: exact duplicate rows collapse to one (first
// occurrence kept, order preserved), then points outside the clip window
// (when given) are dropped and counted.
struct PointIngestResult {
  PointPattern pattern;
  std::size_t duplicates = 0;
  std::size_t out_of_domain = 0;
  std::size_t snap_rejected = 0;
  std::vector<Point2> rejects;  // coordinates dropped by clipping or snapping
  std::vector<std::string> warnings;
};

PointIngestResult ingest_points_planar(const RawPoints& raw, const RectDomain* clip);

// Cleaned network pattern: exact dedup, then each point snaps to the nearest
// network location; points farther than `tolerance` are rejected, listed
// (up to a few) and counted.
PointIngestResult ingest_points_network(const RawPoints& raw, const LinearNetwork& net,
                                        double tolerance);

// Network assembly from polylines: endpoints within `node_tolerance` of an
// existing node merge into it, zero-length and exactly duplicated edges are
// dropped and counted, isolated nodes are discarded.  With
// `largest_component` the component of greatest total length survives and
// the rest is dropped with a counted warning; otherwise a disconnected
// input throws ParseError.
struct NetworkIngestResult {
  LinearNetwork net;
  std::size_t merged_nodes = 0;
  std::size_t dropped_edges = 0;     // zero-length + duplicates
  std::size_t dropped_segments = 0;  // off the selected component
  std::vector<std::string> warnings;
};

NetworkIngestResult build_network(const RawPolylines& raw, bool largest_component,
                                  double node_tolerance = 1e-9);

}  // namespace ppsynth
