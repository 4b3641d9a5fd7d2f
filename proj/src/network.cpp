#include "ppsynth/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace ppsynth {

LinearNetwork::LinearNetwork(std::vector<Point2> nodes,
                             const std::vector<std::pair<int, int>>& edges)
    : nodes_(std::move(nodes)) {
  const int n = static_cast<int>(nodes_.size());
  if (n < 2 || edges.empty()) {
    throw std::invalid_argument("LinearNetwork: need at least one segment");
  }
  adj_.resize(n);
  segments_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) {
      throw std::invalid_argument("LinearNetwork: segment endpoint index out of range");
    }
    const double len = dist(nodes_[a], nodes_[b]);
    if (!(len > 0.0)) {
      throw std::invalid_argument("LinearNetwork: zero-length segment between nodes " +
                                  std::to_string(a) + " and " + std::to_string(b));
    }
    const int seg = static_cast<int>(segments_.size());
    segments_.push_back(Segment{a, b, len});
    adj_[a].push_back(Arc{b, seg, len});
    adj_[b].push_back(Arc{a, seg, len});
    total_length_ += len;
  }

  // Connectivity check (every node reachable from node 0).
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const Arc& arc : adj_[u]) {
      if (!seen[arc.to]) {
        seen[arc.to] = 1;
        ++reached;
        stack.push_back(arc.to);
      }
    }
  }
  if (reached != n) {
    throw std::invalid_argument("LinearNetwork: graph is disconnected (" +
                                std::to_string(n - reached) + " unreachable nodes)");
  }
}

Point2 LinearNetwork::point_at(const NetworkLoc& loc) const {
  const Segment& s = segments_[loc.seg];
  const double t = loc.offset / s.length;
  const Point2& a = nodes_[s.a];
  const Point2& b = nodes_[s.b];
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

bool LinearNetwork::valid_loc(const NetworkLoc& loc) const {
  return loc.seg >= 0 && loc.seg < segment_count() && loc.offset >= 0.0 &&
         loc.offset <= segments_[loc.seg].length;
}

NetworkLoc LinearNetwork::snap(const Point2& p, double* out_dist) const {
  NetworkLoc best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < segment_count(); ++i) {
    const Segment& s = segments_[i];
    const Point2& a = nodes_[s.a];
    const Point2& b = nodes_[s.b];
    const double vx = b.x - a.x, vy = b.y - a.y;
    double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / (s.length * s.length);
    t = std::clamp(t, 0.0, 1.0);
    const double d = std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
    if (d < best_d) {
      best_d = d;
      best = NetworkLoc{i, t * s.length};
    }
  }
  if (out_dist) *out_dist = best_d;
  return best;
}

std::vector<double> LinearNetwork::dijkstra(
    const std::vector<std::pair<int, double>>& sources) const {
  std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& [node, d] : sources) {
    if (d < dist[node]) {
      dist[node] = d;
      heap.emplace(d, node);
    }
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Arc& arc : adj_[u]) {
      const double nd = d + arc.length;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.emplace(nd, arc.to);
      }
    }
  }
  return dist;
}

std::vector<double> LinearNetwork::node_distances_from(int node) const {
  if (node < 0 || node >= node_count()) {
    throw std::invalid_argument("node_distances_from: node index out of range");
  }
  return dijkstra({{node, 0.0}});
}

std::vector<double> LinearNetwork::distances_from(const NetworkLoc& loc) const {
  if (!valid_loc(loc)) {
    throw std::invalid_argument("distances_from: invalid network location");
  }
  const Segment& s = segments_[loc.seg];
  return dijkstra({{s.a, loc.offset}, {s.b, s.length - loc.offset}});
}

double LinearNetwork::distance(const NetworkLoc& a, const NetworkLoc& b) const {
  if (!valid_loc(a) || !valid_loc(b)) {
    throw std::invalid_argument("distance: invalid network location");
  }
  const std::vector<double> d = distances_from(a);
  const Segment& sb = segments_[b.seg];
  double best = std::min(d[sb.a] + b.offset, d[sb.b] + sb.length - b.offset);
  if (a.seg == b.seg) best = std::min(best, std::abs(a.offset - b.offset));
  return best;
}

double LinearNetwork::diameter() const {
  double best = 0.0;
  for (int i = 0; i < node_count(); ++i) {
    const std::vector<double> d = node_distances_from(i);
    for (double v : d) best = std::max(best, v);
  }
  for (const Segment& s : segments_) best = std::max(best, s.length);
  return best;
}

DiscretizedNetwork discretize_network(const LinearNetwork& net, double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("discretize_network: resolution must be positive");
  }
  std::vector<Point2> nodes;
  nodes.reserve(net.node_count());
  for (int i = 0; i < net.node_count(); ++i) nodes.push_back(net.node(i));

  std::vector<std::pair<int, int>> edges;
  std::vector<int> first_piece(net.segment_count());
  std::vector<int> piece_count(net.segment_count());

  for (int i = 0; i < net.segment_count(); ++i) {
    const auto& s = net.segment(i);
    const int k = std::max(1, static_cast<int>(std::ceil(s.length / resolution - 1e-12)));
    first_piece[i] = static_cast<int>(edges.size());
    piece_count[i] = k;
    int prev = s.a;
    for (int j = 1; j < k; ++j) {
      const double t = static_cast<double>(j) / k;
      const Point2& a = net.node(s.a);
      const Point2& b = net.node(s.b);
      nodes.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      const int nid = static_cast<int>(nodes.size()) - 1;
      edges.emplace_back(prev, nid);
      prev = nid;
    }
    edges.emplace_back(prev, s.b);
  }
  return DiscretizedNetwork{LinearNetwork(std::move(nodes), edges), std::move(first_piece),
                            std::move(piece_count)};
}

NetworkLoc DiscretizedNetwork::map(const LinearNetwork& original, const NetworkLoc& loc) const {
  if (!original.valid_loc(loc)) {
    throw std::invalid_argument("DiscretizedNetwork::map: invalid location");
  }
  const double seg_len = original.segment(loc.seg).length;
  const int k = piece_count[loc.seg];
  const double piece_len = seg_len / k;
  int idx = std::min(static_cast<int>(loc.offset / piece_len), k - 1);
  double off = loc.offset - idx * piece_len;
  // Guard against roundoff pushing the offset past the piece end.
  off = std::clamp(off, 0.0, net.segment(first_piece[loc.seg] + idx).length);
  return NetworkLoc{first_piece[loc.seg] + idx, off};
}

}  // namespace ppsynth
