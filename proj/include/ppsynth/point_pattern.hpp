#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppsynth/geometry.hpp"
#include "ppsynth/network.hpp"

namespace ppsynth {

// A finite point pattern.  Planar coordinates are always populated; patterns
// living on a linear network additionally carry the (segment, offset)
// location of every point, kept parallel to `points`.
struct PointPattern {
  std::vector<Point2> points;
  std::vector<NetworkLoc> net_locs;

  std::size_t size() const { return points.size(); }
  bool on_network() const { return !net_locs.empty(); }

  void push_planar(const Point2& p) { points.push_back(p); }
  void push_network(const LinearNetwork& net, const NetworkLoc& loc) {
    net_locs.push_back(loc);
    points.push_back(net.point_at(loc));
  }
};

// CSV round trip.  Planar patterns use columns `x,y`; network patterns use
// `seg,offset,x,y`.
void write_pattern_csv(std::ostream& os, const PointPattern& p);
void write_pattern_csv(const std::string& path, const PointPattern& p);
PointPattern read_pattern_csv(std::istream& is);
PointPattern read_pattern_csv(const std::string& path);

}  // namespace ppsynth
