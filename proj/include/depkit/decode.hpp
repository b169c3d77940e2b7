#ifndef DEPKIT_DECODE_HPP
#define DEPKIT_DECODE_HPP

#include <Eigen/Core>
#include <vector>

#include "depkit/error.hpp"

namespace depkit::decode {

// (n+1) x (n+1) head->dependent scores; row 0 is the artificial ROOT.
// Column 0 and the diagonal are masked with kMask (no tree can use them).
struct ArcScoreMatrix {
  int n = 0;
  Eigen::MatrixXd scores;

  static constexpr double kMask = -1e9;

  static ArcScoreMatrix zeros(int n);
  void apply_mask();  // sets column 0 and the diagonal to kMask
  bool shape_ok() const {
    return n >= 1 && scores.rows() == n + 1 && scores.cols() == n + 1;
  }
};

// Maximum spanning arborescence rooted at 0 (Chu-Liu-Edmonds). Returns
// heads[d-1] for d = 1..n. With single_root, exactly one token attaches to
// ROOT: candidate-root iteration up to n = 64, a root-arc penalty inside the
// contraction beyond. Ties break toward the lowest head index.
std::vector<int> cle_mst(const ArcScoreMatrix& m, bool single_root = true);

// Per-column argmax; fast diagnostic path with no validity guarantee.
std::vector<int> greedy_heads(const ArcScoreMatrix& m);

// Per-dependent argmax over label logits (n x num_labels); ties break to the
// lowest label id.
std::vector<int> assign_labels(const Eigen::MatrixXd& logits);

// Column-wise softmax over unmasked entries: probability of each head for
// every dependent. Diagnostic companion to the score matrix.
Eigen::MatrixXd head_distribution(const ArcScoreMatrix& m);

// Total score of a head assignment under m.
double tree_score(const ArcScoreMatrix& m, const std::vector<int>& heads);

}  // namespace depkit::decode

#endif
