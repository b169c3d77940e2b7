#include "depkit/conllu.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "depkit/rng.hpp"
#include "depkit/utf8.hpp"

namespace depkit::conllu {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool parse_int_strict(std::string_view s, int& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-') {
    neg = true;
    i = 1;
    if (s.size() == 1) return false;
  }
  long v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
    if (v > 1000000000L) return false;
  }
  out = static_cast<int>(neg ? -v : v);
  return true;
}

void parse_feats(std::string_view col, std::map<std::string, std::string>& feats,
                 long line_no) {
  if (col == "_") return;
  std::size_t start = 0;
  while (start <= col.size()) {
    std::size_t bar = col.find('|', start);
    std::string_view item = col.substr(
        start, bar == std::string_view::npos ? std::string_view::npos : bar - start);
    std::size_t eq = item.find('=');
    if (item.empty() || eq == std::string_view::npos || eq == 0)
      throw ParseError("FEATS item '" + std::string(item) +
                           "' is not of the form Attribute=Value",
                       line_no);
    std::string attr(item.substr(0, eq));
    std::string value(item.substr(eq + 1));
    if (!feats.emplace(std::move(attr), std::move(value)).second)
      throw ParseError("duplicate FEATS attribute '" +
                           std::string(item.substr(0, eq)) + "'",
                       line_no);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
}

// Finishes one sentence block: id contiguity, head range, tree shape.
void finish_sentence(Sentence& s, long first_line) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].id != i + 1)
      throw ParseError("token ids are not contiguous from 1 (found " +
                           std::to_string(s.tokens[i].id) + " at position " +
                           std::to_string(i + 1) + ")",
                       first_line);
  }
  const std::string sid = s.sent_id();
  bool any_absent = s.any_head_absent();
  bool all_absent = s.all_heads_absent();
  if (any_absent && !all_absent)
    throw ValidationError("mixes annotated and unannotated heads", sid);
  if (all_absent) return;  // unlabeled sentence, nothing more to check
  for (const Token& t : s.tokens) {
    if (t.head < 0 || t.head > n)
      throw ValidationError("token " + std::to_string(t.id) + " has head " +
                                std::to_string(t.head) + " out of range [0, " +
                                std::to_string(n) + "]",
                            sid);
  }
  TreeVerdict v = validate_tree(s);
  if (!v.ok()) throw ValidationError(v.to_string(), sid);
}

}  // namespace

std::string Token::feats_string() const {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += '|';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

std::string Sentence::sent_id() const {
  for (const std::string& c : comments) {
    std::string_view sv(c);
    if (sv.rfind("# sent_id", 0) != 0) continue;
    std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos) continue;
    std::size_t b = eq + 1;
    while (b < sv.size() && sv[b] == ' ') ++b;
    std::size_t e = sv.size();
    while (e > b && (sv[e - 1] == ' ' || sv[e - 1] == '\r')) --e;
    return std::string(sv.substr(b, e - b));
  }
  return "";
}

bool Sentence::all_heads_absent() const {
  if (tokens.empty()) return false;
  return std::all_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return !t.has_head(); });
}

bool Sentence::any_head_absent() const {
  return std::any_of(tokens.begin(), tokens.end(),
                     [](const Token& t) { return !t.has_head(); });
}

std::string TreeVerdict::to_string() const {
  std::string out;
  for (const std::string& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out.empty() ? "OK" : out;
}

TreeVerdict validate_tree(const Sentence& s) {
  TreeVerdict verdict;
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) {
    verdict.violations.push_back("empty sentence");
    return verdict;
  }
  for (int i = 0; i < n; ++i)
    if (s.tokens[i].id != i + 1) {
      verdict.violations.push_back("token ids not contiguous from 1");
      return verdict;
    }
  bool heads_usable = true;
  int roots = 0;
  for (const Token& t : s.tokens) {
    if (!t.has_head()) {
      verdict.violations.push_back("token " + std::to_string(t.id) +
                                   " has no head");
      heads_usable = false;
    } else if (t.head < 0 || t.head > n) {
      verdict.violations.push_back("token " + std::to_string(t.id) +
                                   " head out of range");
      heads_usable = false;
    } else if (t.head == t.id) {
      verdict.violations.push_back("token " + std::to_string(t.id) +
                                   " is its own head");
      heads_usable = false;
    } else if (t.head == 0) {
      ++roots;
    }
  }
  if (heads_usable) {
    if (roots == 0) verdict.violations.push_back("no root");
    if (roots > 1) verdict.violations.push_back("multiple roots");
    // Walk ancestors with memoization; any walk not ending at 0 is a cycle.
    std::vector<int> state(n + 1, 0);  // 0 unknown, 1 reaches root, 2 on path
    state[0] = 1;
    for (int start = 1; start <= n; ++start) {
      int v = start;
      std::vector<int> path;
      while (state[v] == 0) {
        state[v] = 2;
        path.push_back(v);
        v = s.tokens[v - 1].head;
      }
      bool ok = state[v] == 1;
      for (int u : path) state[u] = ok ? 1 : 3;
      if (!ok && state[start] == 3)
        verdict.violations.push_back("token " + std::to_string(start) +
                                     " is unreachable from root (cycle)");
    }
  }
  return verdict;
}

Treebank parse_conllu(std::string_view text, std::string name) {
  Treebank tb;
  tb.name = std::move(name);
  Sentence cur;
  bool in_block = false;
  long first_line_of_block = 0;
  long line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (nl == std::string_view::npos && line.empty() && pos == text.size()) break;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    long bad = utf8_find_invalid(line);
    if (bad >= 0)
      throw ParseError("invalid UTF-8 at byte " + std::to_string(bad), line_no);

    bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (blank) {
      if (in_block) {
        finish_sentence(cur, first_line_of_block);
        tb.sentences.push_back(std::move(cur));
        cur = Sentence{};
        in_block = false;
      }
    } else if (line[0] == '#') {
      if (!in_block) {
        in_block = true;
        first_line_of_block = line_no;
      }
      cur.comments.emplace_back(line);
    } else {
      if (!in_block) {
        in_block = true;
        first_line_of_block = line_no;
      }
      auto cols = split_tabs(line);
      if (cols.size() != 10)
        throw ParseError("expected 10 tab-separated columns, got " +
                             std::to_string(cols.size()),
                         line_no);
      for (std::size_t c = 0; c < 10; ++c)
        if (cols[c].empty())
          throw ParseError("column " + std::to_string(c + 1) + " is empty",
                           line_no);
      std::string_view idcol = cols[0];
      if (idcol.find('-') != std::string_view::npos ||
          idcol.find('.') != std::string_view::npos) {
        // Multiword-token range or empty node: preserved verbatim, anchored
        // after the previous word so serialization restores the exact spot.
        cur.extras.push_back(
            {static_cast<int>(cur.tokens.size()), std::string(line)});
      } else {
        Token t;
        if (!parse_int_strict(idcol, t.id) || t.id < 1)
          throw ParseError("ID '" + std::string(idcol) +
                               "' is not a positive integer",
                           line_no);
        t.form = std::string(cols[1]);
        t.lemma = std::string(cols[2]);
        t.upos = std::string(cols[3]);
        t.xpos = std::string(cols[4]);
        parse_feats(cols[5], t.feats, line_no);
        if (cols[6] == "_") {
          t.head = kAbsentHead;
        } else if (!parse_int_strict(cols[6], t.head)) {
          throw ParseError("HEAD '" + std::string(cols[6]) +
                               "' is not an integer or '_'",
                           line_no);
        }
        t.deprel = std::string(cols[7]);
        t.deps = std::string(cols[8]);
        t.misc = std::string(cols[9]);
        cur.tokens.push_back(std::move(t));
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (in_block) {
    finish_sentence(cur, first_line_of_block);
    tb.sentences.push_back(std::move(cur));
  }
  tb.unlabeled =
      !tb.sentences.empty() &&
      std::all_of(tb.sentences.begin(), tb.sentences.end(),
                  [](const Sentence& s) { return s.all_heads_absent(); });
  return tb;
}

Treebank read_conllu_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_conllu(buf.str(), path.stem().string());
}

std::string serialize(const Treebank& tb) {
  std::string out;
  for (const Sentence& s : tb.sentences) {
    if (!s.all_heads_absent()) {
      TreeVerdict v = validate_tree(s);
      if (!v.ok())
        throw ValidationError("refusing to serialize: " + v.to_string(),
                              s.sent_id());
    }
    for (const std::string& c : s.comments) {
      out += c;
      out += '\n';
    }
    std::size_t next_extra = 0;
    auto emit_extras = [&](int after_id) {
      while (next_extra < s.extras.size() &&
             s.extras[next_extra].after_id == after_id) {
        out += s.extras[next_extra].text;
        out += '\n';
        ++next_extra;
      }
    };
    emit_extras(0);
    for (const Token& t : s.tokens) {
      out += std::to_string(t.id);
      out += '\t';
      out += t.form;
      out += '\t';
      out += t.lemma;
      out += '\t';
      out += t.upos;
      out += '\t';
      out += t.xpos;
      out += '\t';
      out += t.feats_string();
      out += '\t';
      out += t.has_head() ? std::to_string(t.head) : std::string("_");
      out += '\t';
      out += t.deprel;
      out += '\t';
      out += t.deps;
      out += '\t';
      out += t.misc;
      out += '\n';
      emit_extras(t.id);
    }
    out += '\n';
  }
  return out;
}

void write_conllu_file(const Treebank& tb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << serialize(tb);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::pair<Treebank, Treebank> protocol_split(const Treebank& tb, int n_train,
                                             int n_unlabeled,
                                             std::uint64_t seed) {
  const long need = static_cast<long>(n_train) + n_unlabeled;
  if (static_cast<long>(tb.size()) < need)
    throw Error("protocol_split: need " + std::to_string(need) +
                " sentences, have " + std::to_string(tb.size()));
  RngStream rng(derive_seed(seed, "protocol_split"));
  std::vector<int> order = rng.permutation(static_cast<int>(tb.size()));
  std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  std::vector<int> unl_idx(order.begin() + n_train,
                           order.begin() + n_train + n_unlabeled);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(unl_idx.begin(), unl_idx.end());

  Treebank train;
  train.name = tb.name + "-train";
  for (int i : train_idx) train.sentences.push_back(tb.sentences[i]);

  Treebank unl;
  unl.name = tb.name + "-unlabeled";
  unl.unlabeled = true;
  for (int i : unl_idx) {
    Sentence s = tb.sentences[i];
    for (Token& t : s.tokens) {
      t.head = kAbsentHead;
      t.deprel = "_";
    }
    unl.sentences.push_back(std::move(s));
  }
  return {std::move(train), std::move(unl)};
}

}  // namespace depkit::conllu
