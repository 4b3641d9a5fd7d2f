#pragma once

#include <utility>
#include <vector>

#include "ppsynth/geometry.hpp"

namespace ppsynth {

// A location on a linear network: segment index plus arc-length offset from
// the segment's first endpoint (0 <= offset <= segment length).
struct NetworkLoc {
  int seg = 0;
  double offset = 0.0;
};

// Undirected linear network embedded in the plane.  Segments are straight;
// shortest-path distances are measured along the segments.  The graph must be
// connected: construction fails otherwise.
class LinearNetwork {
 public:
  struct Segment {
    int a = 0, b = 0;
    double length = 0.0;
  };

  LinearNetwork(std::vector<Point2> nodes, const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int segment_count() const { return static_cast<int>(segments_.size()); }
  const Point2& node(int i) const { return nodes_[i]; }
  const Segment& segment(int i) const { return segments_[i]; }
  const std::vector<Segment>& segments() const { return segments_; }
  double total_length() const { return total_length_; }

  Point2 point_at(const NetworkLoc& loc) const;
  bool valid_loc(const NetworkLoc& loc) const;

  // Nearest network location to an arbitrary planar point; *out_dist (if
  // given) receives the Euclidean snap distance.
  NetworkLoc snap(const Point2& p, double* out_dist = nullptr) const;

  // Shortest-path distance from a node to every node.
  std::vector<double> node_distances_from(int node) const;
  // Shortest-path distance from an arbitrary location to every node.
  std::vector<double> distances_from(const NetworkLoc& loc) const;
  // Shortest-path distance between two locations.
  double distance(const NetworkLoc& a, const NetworkLoc& b) const;

  // Largest shortest-path distance over node pairs (lower bound on the true
  // diameter; used to scale evaluation grids).
  double diameter() const;

 private:
  struct Arc {
    int to;
    int seg;
    double length;
  };

  std::vector<double> dijkstra(const std::vector<std::pair<int, double>>& sources) const;

  std::vector<Point2> nodes_;
  std::vector<Segment> segments_;
  std::vector<std::vector<Arc>> adj_;
  double total_length_ = 0.0;
};

// Result of splitting every segment into pieces no longer than `resolution`.
// Piece nodes lie on the original geometry and the total length is preserved.
struct DiscretizedNetwork {
  LinearNetwork net;
  std::vector<int> first_piece;   // per original segment
  std::vector<int> piece_count;   // per original segment

  // Express a location on the original network on the refined one.
  NetworkLoc map(const LinearNetwork& original, const NetworkLoc& loc) const;
};

DiscretizedNetwork discretize_network(const LinearNetwork& net, double resolution);

}  // namespace ppsynth
