#ifndef DEPKIT_VOCAB_HPP
#define DEPKIT_VOCAB_HPP

#include <Eigen/Core>
#include <string>
#include <unordered_map>
#include <vector>

#include "depkit/conllu.hpp"
#include "depkit/utf8.hpp"

namespace depkit::nn {

// Insertion-ordered string<->id map, frozen after vocabulary construction.
class Dict {
 public:
  int add(const std::string& s) {
    auto it = index_.find(s);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(items_.size());
    items_.push_back(s);
    index_.emplace(s, id);
    return id;
  }
  int get(const std::string& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
  }
  // Falls back to id 0; open-class dicts keep the unknown symbol there.
  int get_or_unk(const std::string& s) const {
    int id = get(s);
    return id < 0 ? 0 : id;
  }
  int get_or_throw(const std::string& s) const {
    int id = get(s);
    if (id < 0) throw Error("label '" + s + "' not in vocabulary");
    return id;
  }
  const std::string& item(int id) const { return items_.at(id); }
  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<std::string>& items() const { return items_; }
  bool operator==(const Dict& o) const { return items_ == o.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
};

enum class TagTask { Morph, Case, Deprel };

std::string tag_task_name(TagTask t);
TagTask tag_task_from_name(const std::string& name);

// Case attribute value of a token, "NoCase" when absent.
std::string case_label(const conllu::Token& t);

// Index maps frozen from the training treebank: word forms, characters,
// UPOS tags, serialized morphological tags, case values, deprel labels.
struct Vocab {
  static constexpr const char* kUnk = "<unk>";
  static constexpr const char* kRoot = "<root>";

  Dict words;    // [<unk>, <root>, ...]
  Dict chars;    // [<unk>, <root>, ...]
  Dict upos;     // [<unk>, ...]
  Dict morph;    // [<unk>, ...serialized feats incl. "_"]
  Dict cases;    // [<unk>, NoCase, ...]
  Dict deprels;  // exact label space, no unknown

  static Vocab build(const conllu::Treebank& train);

  const Dict& task_labels(TagTask t) const {
    switch (t) {
      case TagTask::Morph: return morph;
      case TagTask::Case: return cases;
      case TagTask::Deprel: return deprels;
    }
    throw Error("bad task");
  }

  // Gold label id of a token under a tagging task.
  int task_label_id(TagTask t, const conllu::Token& tok) const;

  bool operator==(const Vocab& o) const {
    return words == o.words && chars == o.chars && upos == o.upos &&
           morph == o.morph && cases == o.cases && deprels == o.deprels;
  }
};

// Vocabulary-indexed view of a sentence; position 0 is the ROOT symbol.
struct EncodedSentence {
  int n = 0;
  std::vector<int> word_ids;               // n+1
  std::vector<std::vector<int>> char_ids;  // n+1
  Eigen::MatrixXd external;                // optional (n+1) x d_ext
  bool has_external = false;
};

EncodedSentence encode_tokens(const Vocab& v, const conllu::Sentence& s);

}  // namespace depkit::nn

#endif
