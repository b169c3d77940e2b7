#ifndef DEPKIT_CONLLU_HPP
#define DEPKIT_CONLLU_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depkit/error.hpp"

namespace depkit::conllu {

// HEAD value for tokens without dependency annotation (protocol_split
// output, raw tagged corpora). Distinct from 0, which means ROOT.
constexpr int kAbsentHead = -1;

struct Token {
  int id = 0;                // 1-based position
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::map<std::string, std::string> feats;  // attribute-sorted
  int head = kAbsentHead;    // 0 = ROOT, kAbsentHead = unannotated
  std::string deprel = "_";
  std::string deps = "_";    // enhanced-dependency column, kept verbatim
  std::string misc = "_";

  bool has_head() const { return head != kAbsentHead; }
  // "Case=Nom|Number=Sing" (sorted, pipe-joined), "_" when empty.
  std::string feats_string() const;

  bool operator==(const Token&) const = default;
};

// Multiword-token ranges ("3-4") and empty nodes ("3.1") are kept as raw
// lines anchored after a word id (0 = before the first word). They round-trip
// verbatim but are never parsed or scored.
struct ExtraLine {
  int after_id = 0;
  std::string text;
  bool operator==(const ExtraLine&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;           // ids 1..n contiguous
  std::vector<std::string> comments;   // verbatim, including leading '#'
  std::vector<ExtraLine> extras;

  std::size_t size() const { return tokens.size(); }
  // Value of the "# sent_id = ..." comment, or "" when absent.
  std::string sent_id() const;
  bool all_heads_absent() const;
  bool any_head_absent() const;

  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::string name;
  bool unlabeled = false;  // set by protocol_split / detected on parse

  std::size_t size() const { return sentences.size(); }
  bool operator==(const Treebank&) const = default;
};

struct TreeVerdict {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Non-throwing structural check: single root, no cycles, every token
// reachable from ROOT, heads in range.
TreeVerdict validate_tree(const Sentence& s);

// Parses CoNLL-U text. Throws ParseError on malformed lines (with line
// number) and ValidationError (with sent_id) on head/tree violations.
// Fully unannotated sentences (every HEAD "_") are accepted and the
// resulting treebank is flagged unlabeled.
Treebank parse_conllu(std::string_view text, std::string name = "");
Treebank read_conllu_file(const std::filesystem::path& path);

// Inverse of parse_conllu. Refuses (ValidationError) to serialize a sentence
// that neither passes validate_tree nor is fully unannotated.
std::string serialize(const Treebank& tb);
void write_conllu_file(const Treebank& tb, const std::filesystem::path& path);

// Seeded disjoint sampling of the paper-style data protocol: n_train gold
// sentences plus n_unlabeled sentences whose heads are replaced by the
// absent sentinel and deprels cleared (upos/feats retained).
std::pair<Treebank, Treebank> protocol_split(const Treebank& tb,
                                             int n_train = 500,
                                             int n_unlabeled = 1000,
                                             std::uint64_t seed = 0);

}  // namespace depkit::conllu

#endif
