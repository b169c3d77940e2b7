#ifndef DEPKIT_EVAL_HPP
#define DEPKIT_EVAL_HPP

#include <string>
#include <vector>

#include "depkit/conllu.hpp"

namespace depkit::eval {

enum class Metric { UAS, LAS };

// Sentence-level scores in percent; macro values are the unweighted means
// of the per-sentence lists below. Sentences with no countable tokens
// (all-PUNCT under exclusion) are dropped from both lists and the macro.
struct EvalReport {
  std::vector<double> sent_uas;
  std::vector<double> sent_las;
  double macro_uas = 0.0;
  double macro_las = 0.0;
  long token_count = 0;         // gold tokens seen
  long scored_token_count = 0;  // tokens entering the metric
  int sentences_scored = 0;
  int sentences_dropped = 0;
  bool include_punct = true;

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

// Sentence-level macro-averaged attachment scores. gold and pred must be
// aligned 1:1 by position with equal sentence lengths. With include_punct
// off, tokens whose gold UPOS is PUNCT are excluded entirely.
EvalReport uas_las(const conllu::Treebank& gold, const conllu::Treebank& pred,
                   bool include_punct = true);

// Two-sided paired t-test over per-sentence metric differences (a - b).
// Zero-variance differences give p = 1.0 by convention; n = 1 is an error.
double paired_ttest(const EvalReport& a, const EvalReport& b, Metric metric);

// Aligned text table: one row per system, UAS/LAS columns, 2 decimals.
struct TableRow {
  std::string label;
  double uas = 0.0;
  double las = 0.0;
};
std::string render_table(const std::vector<TableRow>& rows,
                         const std::string& title = "");

// 2-decimal presentation rounding ("79.33"); internal values stay full
// precision.
std::string format_pct(double v);

}  // namespace depkit::eval

#endif
