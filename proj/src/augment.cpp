#include "depkit/augment.hpp"

#include <algorithm>
#include <cassert>

namespace depkit::augment {

using conllu::kAbsentHead;
using conllu::Sentence;
using conllu::Token;
using conllu::Treebank;

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Cropping: return "cropping";
    case Strategy::Rotation: return "rotation";
    case Strategy::Nonce: return "nonce";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "cropping") return Strategy::Cropping;
  if (name == "rotation") return Strategy::Rotation;
  if (name == "nonce") return Strategy::Nonce;
  throw Error("unknown augmentation strategy '" + name +
              "' (expected cropping|rotation|nonce)");
}

void AugmentConfig::validate() const {
  if (target_count < 0) throw Error("augment: target_count must be >= 0");
  if (nonce_rate < 0.0 || nonce_rate > 1.0)
    throw Error("augment: nonce_rate must be in [0, 1]");
  if (strategy == Strategy::Cropping && crop_relations.empty())
    throw Error("augment: crop_relations must be non-empty");
  if (strategy == Strategy::Rotation && rotation_relations.empty())
    throw Error("augment: rotation_relations must be non-empty");
  if (strategy == Strategy::Nonce && nonce_upos.empty())
    throw Error("augment: nonce_upos must be non-empty");
}

namespace {

std::string source_label(const Sentence& s) {
  std::string sid = s.sent_id();
  return sid.empty() ? "?" : sid;
}

// children[h] = ids of tokens whose head is h, ascending.
std::vector<std::vector<int>> child_index(const Sentence& s) {
  std::vector<std::vector<int>> children(s.size() + 1);
  for (const Token& t : s.tokens) children[t.head].push_back(t.id);
  return children;
}

void collect_subtree(const std::vector<std::vector<int>>& children, int id,
                     std::vector<int>& out) {
  out.push_back(id);
  for (int c : children[id]) collect_subtree(children, c, out);
}

// Builds a sentence from the given original ids (any order); tokens are
// re-indexed 1..m in surface order and heads remapped. Heads pointing
// outside the kept set must only occur for the designated root token.
Sentence extract(const Sentence& s, std::vector<int> keep_ids, int root_id) {
  std::sort(keep_ids.begin(), keep_ids.end());
  std::vector<int> old2new(s.size() + 1, 0);
  for (std::size_t i = 0; i < keep_ids.size(); ++i)
    old2new[keep_ids[i]] = static_cast<int>(i) + 1;
  Sentence out;
  for (int old_id : keep_ids) {
    Token t = s.tokens[old_id - 1];
    t.id = old2new[old_id];
    t.head = old_id == root_id ? 0 : old2new[t.head];
    out.tokens.push_back(std::move(t));
  }
  return out;
}

}  // namespace

NonceLexicon NonceLexicon::build(const Treebank& tb) {
  NonceLexicon lex;
  for (const Sentence& s : tb.sentences) {
    for (const Token& t : s.tokens) {
      auto& bucket = lex.buckets_[{t.upos, t.feats_string()}];
      Entry e{t.form, t.lemma};
      if (std::find(bucket.begin(), bucket.end(), e) == bucket.end())
        bucket.push_back(std::move(e));
    }
  }
  return lex;
}

const std::vector<NonceLexicon::Entry>* NonceLexicon::bucket(
    const std::string& upos, const std::string& feats) const {
  auto it = buckets_.find({upos, feats});
  return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<Sentence> crop(const Sentence& s, const AugmentConfig& cfg) {
  std::vector<Sentence> out;
  auto children = child_index(s);
  if (children[0].size() != 1) return out;  // pre: valid tree
  const int root_id = children[0][0];
  for (int child : children[root_id]) {
    const Token& ct = s.tokens[child - 1];
    if (!cfg.crop_relations.count(ct.deprel)) continue;
    std::vector<int> keep{root_id};
    collect_subtree(children, child, keep);
    Sentence piece = extract(s, std::move(keep), root_id);
    piece.comments.push_back("# augmented_from = " + source_label(s) +
                             " strategy = cropping relation = " + ct.deprel);
    out.push_back(std::move(piece));
  }
  return out;
}

std::vector<Sentence> rotate(const Sentence& s, const AugmentConfig& cfg,
                             RngStream& rng) {
  const int n = static_cast<int>(s.size());
  auto children = child_index(s);
  if (children[0].size() != 1) return {};
  const int root_id = children[0][0];

  // Eligible root children must govern a contiguous token span.
  std::vector<int> span_of(n + 1, -1);  // token id -> eligible span index
  std::vector<std::vector<int>> spans;
  for (int child : children[root_id]) {
    if (!cfg.rotation_relations.count(s.tokens[child - 1].deprel)) continue;
    std::vector<int> sub;
    collect_subtree(children, child, sub);
    auto [mn, mx] = std::minmax_element(sub.begin(), sub.end());
    if (*mx - *mn + 1 != static_cast<int>(sub.size())) continue;  // gappy
    std::sort(sub.begin(), sub.end());
    for (int id : sub) span_of[id] = static_cast<int>(spans.size());
    spans.push_back(std::move(sub));
  }
  const int k = static_cast<int>(spans.size());
  if (k < 2) return {};

  std::vector<int> perm = rng.permutation(k);
  bool identity = true;
  for (int i = 0; i < k; ++i)
    if (perm[i] != i) identity = false;
  if (identity) return {};  // original order is never emitted

  // Rebuild the surface order: fixed material keeps its slots, the i-th
  // eligible slot receives span perm[i].
  std::vector<int> new_order;
  new_order.reserve(n);
  int slot = 0;
  for (int id = 1; id <= n; ++id) {
    int sp = span_of[id];
    if (sp < 0) {
      new_order.push_back(id);
    } else if (id == spans[sp].front()) {  // slot begins here
      for (int sid : spans[perm[slot]]) new_order.push_back(sid);
      ++slot;
    }
  }

  std::vector<int> old2new(n + 1, 0);
  for (int i = 0; i < n; ++i) old2new[new_order[i]] = i + 1;
  Sentence out;
  for (int pos = 0; pos < n; ++pos) {
    Token t = s.tokens[new_order[pos] - 1];
    t.id = pos + 1;
    t.head = t.head == 0 ? 0 : old2new[t.head];
    out.tokens.push_back(std::move(t));
  }
  out.comments.push_back("# augmented_from = " + source_label(s) +
                         " strategy = rotation");
  return {std::move(out)};
}

Sentence nonce(const Sentence& s, const NonceLexicon& lexicon,
               const AugmentConfig& cfg, RngStream& rng, int* changed) {
  Sentence out = s;
  int n_changed = 0;
  for (Token& t : out.tokens) {
    if (!cfg.nonce_upos.count(t.upos)) continue;
    if (!rng.bernoulli(cfg.nonce_rate)) continue;
    const auto* bucket = lexicon.bucket(t.upos, t.feats_string());
    if (!bucket) continue;
    std::vector<const NonceLexicon::Entry*> alternatives;
    for (const auto& e : *bucket)
      if (e.first != t.form) alternatives.push_back(&e);
    if (alternatives.empty()) continue;
    const auto* pick = alternatives[rng.uniform_int(
        static_cast<int>(alternatives.size()))];
    t.form = pick->first;
    t.lemma = pick->second;
    ++n_changed;
  }
  if (changed) *changed = n_changed;
  return out;
}

Treebank augment_treebank(const Treebank& tb, const AugmentConfig& cfg) {
  cfg.validate();
  for (const Sentence& s : tb.sentences) {
    auto v = conllu::validate_tree(s);
    if (!v.ok())
      throw ValidationError("augment_treebank: invalid input: " + v.to_string(),
                            s.sent_id());
  }
  Treebank out;
  out.name = tb.name + "-" + strategy_name(cfg.strategy);
  NonceLexicon lexicon;
  if (cfg.strategy == Strategy::Nonce) lexicon = NonceLexicon::build(tb);

  long emitted = 0;
  const std::string sname = strategy_name(cfg.strategy);
  // Cropping is deterministic per source, so one empty round proves nothing
  // more is achievable; the sampled strategies get a few retries.
  const int max_empty_rounds = cfg.strategy == Strategy::Cropping ? 1 : 5;
  int empty_rounds = 0;
  for (std::uint64_t round = 0; emitted < cfg.target_count; ++round) {
    long emitted_this_round = 0;
    for (std::size_t i = 0;
         i < tb.size() && emitted < cfg.target_count; ++i) {
      const Sentence& src = tb.sentences[i];
      RngStream rng(derive_seed(cfg.seed, "augment",
                                round * 0x100000 + static_cast<std::uint64_t>(i)));
      std::vector<Sentence> produced;
      switch (cfg.strategy) {
        case Strategy::Cropping:
          produced = crop(src, cfg);
          break;
        case Strategy::Rotation:
          produced = rotate(src, cfg, rng);
          break;
        case Strategy::Nonce: {
          int changed = 0;
          Sentence cand = nonce(src, lexicon, cfg, rng, &changed);
          if (changed > 0) {
            cand.comments.push_back("# augmented_from = " + source_label(src) +
                                    " strategy = nonce");
            produced.push_back(std::move(cand));
          }
          break;
        }
      }
      for (Sentence& p : produced) {
        if (emitted >= cfg.target_count) break;
        // Extras (multiword ranges, empty nodes) reference source positions
        // that no longer exist after rewriting; they do not carry over.
        p.extras.clear();
        std::vector<std::string> comments;
        comments.push_back("# sent_id = " + source_label(src) + "." + sname +
                           std::to_string(emitted + 1));
        for (std::string& c : p.comments)
          if (c.rfind("# augmented_from", 0) == 0) comments.push_back(std::move(c));
        p.comments = std::move(comments);
        assert(conllu::validate_tree(p).ok());
        out.sentences.push_back(std::move(p));
        ++emitted;
        ++emitted_this_round;
      }
    }
    empty_rounds = emitted_this_round == 0 ? empty_rounds + 1 : 0;
    if (empty_rounds >= max_empty_rounds) break;  // achievable count exhausted
  }
  return out;
}

}  // namespace depkit::augment
