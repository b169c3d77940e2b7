#include "depkit/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace depkit::decode {

namespace {

constexpr double kForbid = -1e18;  // candidate-root iteration / penalties

// Chu-Liu-Edmonds on a dense score matrix over nodes 0..m-1 (0 = root).
// Returns the best in-arc per node (heads[0] = -1). Ties in arc selection
// break toward the lower head index.
std::vector<int> cle_recurse(const Eigen::MatrixXd& S) {
  const int m = static_cast<int>(S.rows());
  std::vector<int> best(m, -1);
  for (int v = 1; v < m; ++v) {
    double bs = -std::numeric_limits<double>::infinity();
    for (int u = 0; u < m; ++u) {
      if (u == v) continue;
      if (S(u, v) > bs) {
        bs = S(u, v);
        best[v] = u;
      }
    }
  }

  // Look for a cycle among the greedy in-arcs.
  std::vector<int> color(m, 0);  // 0 new, 1 on path, 2 done
  color[0] = 2;
  std::vector<int> cycle;
  for (int s = 1; s < m && cycle.empty(); ++s) {
    if (color[s]) continue;
    int v = s;
    std::vector<int> path;
    while (color[v] == 0) {
      color[v] = 1;
      path.push_back(v);
      v = best[v];
    }
    if (color[v] == 1) {
      auto it = std::find(path.begin(), path.end(), v);
      cycle.assign(it, path.end());
    }
    for (int u : path) color[u] = 2;
  }
  if (cycle.empty()) return best;

  // Contract the cycle into one supernode and recurse.
  std::vector<char> in_cycle(m, 0);
  for (int v : cycle) in_cycle[v] = 1;
  std::vector<int> old2new(m, -1), new2old;
  for (int u = 0; u < m; ++u)
    if (!in_cycle[u]) {
      old2new[u] = static_cast<int>(new2old.size());
      new2old.push_back(u);
    }
  const int c_idx = static_cast<int>(new2old.size());
  const int m2 = c_idx + 1;

  double cycle_sum = 0.0;
  for (int v : cycle) cycle_sum += S(best[v], v);

  Eigen::MatrixXd S2 = Eigen::MatrixXd::Constant(m2, m2, kForbid);
  std::vector<int> enter_at(m2, -1);  // u' -> cycle node its arc enters
  std::vector<int> leave_from(m2, -1);  // w' -> cycle node whose arc leaves
  for (int u = 0; u < m; ++u) {
    if (in_cycle[u]) continue;
    for (int w = 0; w < m; ++w) {
      if (in_cycle[w] || u == w) continue;
      S2(old2new[u], old2new[w]) = S(u, w);
    }
    double bs = -std::numeric_limits<double>::infinity();
    int bv = -1;
    for (int v : cycle) {
      double val = S(u, v) - S(best[v], v);
      if (val > bs) {
        bs = val;
        bv = v;
      }
    }
    S2(old2new[u], c_idx) = bs + cycle_sum;
    enter_at[old2new[u]] = bv;
  }
  for (int w = 0; w < m; ++w) {
    if (in_cycle[w]) continue;
    double bs = -std::numeric_limits<double>::infinity();
    int bv = -1;
    for (int v : cycle) {
      if (S(v, w) > bs) {
        bs = S(v, w);
        bv = v;
      }
    }
    S2(c_idx, old2new[w]) = bs;
    leave_from[old2new[w]] = bv;
  }

  std::vector<int> heads2 = cle_recurse(S2);

  std::vector<int> heads(m, -1);
  for (int v2 = 1; v2 < m2; ++v2) {
    if (v2 == c_idx) continue;
    int v = new2old[v2];
    int h2 = heads2[v2];
    heads[v] = h2 == c_idx ? leave_from[v2] : new2old[h2];
  }
  for (int v : cycle) heads[v] = best[v];
  int hc = heads2[c_idx];           // arc entering the contracted node
  heads[enter_at[hc]] = new2old[hc];  // breaks the cycle at the entry point
  return heads;
}

std::vector<int> strip_root(const std::vector<int>& heads_with_root) {
  return {heads_with_root.begin() + 1, heads_with_root.end()};
}

int count_root_arcs(const std::vector<int>& heads) {
  int c = 0;
  for (int h : heads) c += h == 0 ? 1 : 0;
  return c;
}

}  // namespace

ArcScoreMatrix ArcScoreMatrix::zeros(int n) {
  ArcScoreMatrix m;
  m.n = n;
  m.scores = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.apply_mask();
  return m;
}

void ArcScoreMatrix::apply_mask() {
  for (int i = 0; i < scores.rows(); ++i) {
    scores(i, 0) = kMask;
    scores(i, i) = kMask;
  }
}

std::vector<int> cle_mst(const ArcScoreMatrix& m, bool single_root) {
  if (!m.shape_ok()) throw Error("cle_mst: malformed score matrix");
  const int n = m.n;
  if (n == 1) return {0};

  std::vector<int> plain = strip_root(cle_recurse(m.scores));
  if (!single_root || count_root_arcs(plain) == 1) return plain;

  if (n <= 64) {
    // Re-solve with every other root arc forbidden, keep the best total.
    std::vector<int> best_heads;
    double best_total = -std::numeric_limits<double>::infinity();
    for (int r = 1; r <= n; ++r) {
      Eigen::MatrixXd s = m.scores;
      for (int d = 1; d <= n; ++d)
        if (d != r) s(0, d) = kForbid;
      std::vector<int> heads = strip_root(cle_recurse(s));
      double total = 0.0;
      for (int d = 1; d <= n; ++d) total += m.scores(heads[d - 1], d);
      if (total > best_total) {
        best_total = total;
        best_heads = std::move(heads);
      }
    }
    return best_heads;
  }

  // Large sentences: penalize every root arc by more than the total score
  // range, so the optimum uses as few root arcs as possible, i.e. one.
  double lo = 0.0, hi = 0.0;
  for (int d = 1; d <= n; ++d) {
    double cmax = -std::numeric_limits<double>::infinity();
    double cmin = std::numeric_limits<double>::infinity();
    for (int h = 0; h <= n; ++h) {
      if (h == d) continue;
      cmax = std::max(cmax, m.scores(h, d));
      cmin = std::min(cmin, m.scores(h, d));
    }
    hi += cmax;
    lo += cmin;
  }
  const double penalty = hi - lo + 1.0;
  Eigen::MatrixXd s = m.scores;
  for (int d = 1; d <= n; ++d) s(0, d) -= penalty;
  std::vector<int> heads = strip_root(cle_recurse(s));
  return heads;
}

std::vector<int> greedy_heads(const ArcScoreMatrix& m) {
  if (!m.shape_ok()) throw Error("greedy_heads: malformed score matrix");
  std::vector<int> heads(m.n);
  for (int d = 1; d <= m.n; ++d) {
    double bs = -std::numeric_limits<double>::infinity();
    int bh = 0;
    for (int h = 0; h <= m.n; ++h) {
      if (h == d) continue;
      if (m.scores(h, d) > bs) {
        bs = m.scores(h, d);
        bh = h;
      }
    }
    heads[d - 1] = bh;
  }
  return heads;
}

std::vector<int> assign_labels(const Eigen::MatrixXd& logits) {
  std::vector<int> labels(logits.rows());
  for (int i = 0; i < logits.rows(); ++i) {
    double bs = -std::numeric_limits<double>::infinity();
    int bl = 0;
    for (int l = 0; l < logits.cols(); ++l) {
      if (logits(i, l) > bs) {
        bs = logits(i, l);
        bl = l;
      }
    }
    labels[i] = bl;
  }
  return labels;
}

Eigen::MatrixXd head_distribution(const ArcScoreMatrix& m) {
  const int n = m.n;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int d = 1; d <= n; ++d) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int h = 0; h <= n; ++h)
      if (m.scores(h, d) > ArcScoreMatrix::kMask / 2)
        mx = std::max(mx, m.scores(h, d));
    double z = 0.0;
    for (int h = 0; h <= n; ++h)
      if (m.scores(h, d) > ArcScoreMatrix::kMask / 2)
        z += std::exp(m.scores(h, d) - mx);
    for (int h = 0; h <= n; ++h)
      if (m.scores(h, d) > ArcScoreMatrix::kMask / 2)
        p(h, d) = std::exp(m.scores(h, d) - mx) / z;
  }
  return p;
}

double tree_score(const ArcScoreMatrix& m, const std::vector<int>& heads) {
  double total = 0.0;
  for (int d = 1; d <= m.n; ++d) total += m.scores(heads[d - 1], d);
  return total;
}

}  // namespace depkit::decode
