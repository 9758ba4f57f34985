#pragma once

// Reference implementations used only to check the library.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "dterm/admm.hpp"
#include "dterm/graph.hpp"

namespace oracle {

using dterm::AgentId;
using dterm::Edge;

inline std::vector<std::vector<std::uint64_t>> floyd_warshall(std::size_t n, const std::vector<Edge>& edges) {
  const std::uint64_t inf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::vector<std::uint64_t>> d(n, std::vector<std::uint64_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [a, b] : edges) d[a][b] = d[b][a] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

/// Connected components of the graph after deleting `removed`.
inline std::size_t components_without(std::size_t n, const std::vector<Edge>& edges,
                                      const std::set<AgentId>& removed) {
  UnionFind uf(n);
  for (auto [a, b] : edges) {
    if (!removed.count(a) && !removed.count(b)) uf.unite(a, b);
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed.count(i)) roots.insert(uf.find(i));
  }
  return roots.size();
}

/// Minimiser of the sum of all local objectives with shared copies merged into one
/// variable, mapped back to every agent's local vector.
inline std::vector<Eigen::VectorXd> pooled_solve(const dterm::AdmmProblem& p) {
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  for (const auto& a : p.agents) {
    offset.push_back(total);
    total += static_cast<std::size_t>(a.c.size());
  }
  UnionFind uf(total);
  for (const auto& s : p.shared) uf.unite(offset[s.a] + s.a_index, offset[s.b] + s.b_index);
  std::vector<long> slot(total, -1);
  long vars = 0;
  for (std::size_t v = 0; v < total; ++v) {
    auto r = uf.find(v);
    if (slot[r] < 0) slot[r] = vars++;
  }
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(vars, vars);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
  for (std::size_t i = 0; i < p.agents.size(); ++i) {
    const auto& a = p.agents[i];
    for (long r = 0; r < a.c.size(); ++r) {
      const long gr = slot[uf.find(offset[i] + r)];
      c(gr) += a.c(r);
      for (long s = 0; s < a.c.size(); ++s) q(gr, slot[uf.find(offset[i] + s)]) += a.q(r, s);
    }
  }
  Eigen::VectorXd x = q.ldlt().solve(-c);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < p.agents.size(); ++i) {
    Eigen::VectorXd xi(p.agents[i].c.size());
    for (long r = 0; r < xi.size(); ++r) xi(r) = x(slot[uf.find(offset[i] + r)]);
    out.push_back(xi);
  }
  return out;
}

}  // namespace oracle
