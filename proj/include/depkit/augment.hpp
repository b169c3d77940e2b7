#ifndef DEPKIT_AUGMENT_HPP
#define DEPKIT_AUGMENT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "depkit/conllu.hpp"
#include "depkit/rng.hpp"

namespace depkit::augment {

enum class Strategy { Cropping, Rotation, Nonce };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct AugmentConfig {
  Strategy strategy = Strategy::Nonce;
  int target_count = 1000;
  std::set<std::string> crop_relations = {"nsubj", "obj", "iobj", "obl"};
  std::set<std::string> rotation_relations = {"nsubj", "obj", "iobj", "obl"};
  std::set<std::string> nonce_upos = {"NOUN", "VERB", "ADJ"};
  double nonce_rate = 0.3;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error on out-of-range fields
};

// (upos, serialized feats) -> candidate (form, lemma) pairs, collected from a
// training treebank. Buckets keep first-occurrence order and are de-duplicated.
class NonceLexicon {
 public:
  using Key = std::pair<std::string, std::string>;
  using Entry = std::pair<std::string, std::string>;

  static NonceLexicon build(const conllu::Treebank& tb);

  const std::vector<Entry>* bucket(const std::string& upos,
                                   const std::string& feats) const;
  bool empty() const { return buckets_.empty(); }
  std::size_t bucket_count() const { return buckets_.size(); }

 private:
  std::map<Key, std::vector<Entry>> buckets_;
};

// One cropped sentence per eligible root child: the root token plus that
// child's complete subtree, re-indexed in surface order. Each output carries
// a provenance comment naming the source and the kept relation.
std::vector<conllu::Sentence> crop(const conllu::Sentence& s,
                                   const AugmentConfig& cfg);

// Reorders the contiguous spans of the root's eligible children by a sampled
// permutation. The identity permutation is dropped, so the result is empty
// or a single reordered sentence. Dependency structure is unchanged up to
// renumbering.
std::vector<conllu::Sentence> rotate(const conllu::Sentence& s,
                                     const AugmentConfig& cfg, RngStream& rng);

// Replaces content words with lexicon entries of identical (upos, feats)
// signature at nonce_rate. Ids, heads, deprels, upos and feats are untouched.
// The number of substituted tokens is reported through `changed` when given.
conllu::Sentence nonce(const conllu::Sentence& s, const NonceLexicon& lexicon,
                       const AugmentConfig& cfg, RngStream& rng,
                       int* changed = nullptr);

// Emits min(target_count, achievable) augmented sentences by round-robin
// over the source treebank; deterministic in cfg.seed. Nonce outputs with no
// substitution are not emitted. Every output passes validate_tree.
conllu::Treebank augment_treebank(const conllu::Treebank& tb,
                                  const AugmentConfig& cfg);

}  // namespace depkit::augment

#endif
