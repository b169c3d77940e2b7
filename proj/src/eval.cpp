#include "depkit/eval.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>

namespace depkit::eval {

using conllu::Sentence;
using conllu::Token;
using conllu::Treebank;
using nlohmann::json;

EvalReport uas_las(const Treebank& gold, const Treebank& pred,
                   bool include_punct) {
  if (gold.size() != pred.size())
    throw Error("uas_las: gold has " + std::to_string(gold.size()) +
                " sentences, pred has " + std::to_string(pred.size()));
  EvalReport r;
  r.include_punct = include_punct;
  for (std::size_t si = 0; si < gold.size(); ++si) {
    const Sentence& gs = gold.sentences[si];
    const Sentence& ps = pred.sentences[si];
    if (gs.size() != ps.size())
      throw Error("uas_las: sentence " + std::to_string(si + 1) + " ('" +
                  gs.sent_id() + "'): gold length " + std::to_string(gs.size()) +
                  " != pred length " + std::to_string(ps.size()));
    long countable = 0, head_ok = 0, both_ok = 0;
    for (std::size_t ti = 0; ti < gs.size(); ++ti) {
      const Token& gt = gs.tokens[ti];
      const Token& pt = ps.tokens[ti];
      if (!gt.has_head())
        throw Error("uas_las: gold sentence " + std::to_string(si + 1) +
                    " has unannotated heads");
      ++r.token_count;
      if (!include_punct && gt.upos == "PUNCT") continue;
      ++countable;
      if (pt.head == gt.head) {
        ++head_ok;
        if (pt.deprel == gt.deprel) ++both_ok;
      }
    }
    if (countable == 0) {
      ++r.sentences_dropped;
      continue;
    }
    r.scored_token_count += countable;
    r.sent_uas.push_back(100.0 * double(head_ok) / double(countable));
    r.sent_las.push_back(100.0 * double(both_ok) / double(countable));
    ++r.sentences_scored;
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  };
  r.macro_uas = mean(r.sent_uas);
  r.macro_las = mean(r.sent_las);
  return r;
}

double paired_ttest(const EvalReport& a, const EvalReport& b, Metric metric) {
  const std::vector<double>& xs = metric == Metric::UAS ? a.sent_uas : a.sent_las;
  const std::vector<double>& ys = metric == Metric::UAS ? b.sent_uas : b.sent_las;
  if (xs.size() != ys.size())
    throw Error("paired_ttest: reports have " + std::to_string(xs.size()) +
                " vs " + std::to_string(ys.size()) + " scored sentences");
  const std::size_t n = xs.size();
  if (n < 2) throw Error("paired_ttest: needs at least 2 paired sentences");
  double dbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) dbar += xs[i] - ys[i];
  dbar /= double(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = xs[i] - ys[i] - dbar;
    ss += d * d;
  }
  double sd = std::sqrt(ss / double(n - 1));
  if (sd == 0.0) return 1.0;
  double t = dbar / (sd / std::sqrt(double(n)));
  boost::math::students_t dist(double(n - 1));
  double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  return std::min(1.0, std::max(0.0, p));
}

std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string render_table(const std::vector<TableRow>& rows,
                         const std::string& title) {
  std::size_t w = 6;  // "System"
  for (const TableRow& r : rows) w = std::max(w, r.label.size());
  std::string out;
  if (!title.empty()) out += title + "\n";
  auto pad = [&](const std::string& s, std::size_t width) {
    std::string p = s;
    p.resize(width, ' ');
    return p;
  };
  out += pad("System", w) + "  " + "   UAS" + "  " + "   LAS" + "\n";
  out += std::string(w + 16, '-') + "\n";
  for (const TableRow& r : rows) {
    auto num = [](double v) {
      std::string s = format_pct(v);
      return std::string(6 - std::min<std::size_t>(6, s.size()), ' ') + s;
    };
    out += pad(r.label, w) + "  " + num(r.uas) + "  " + num(r.las) + "\n";
  }
  return out;
}

std::string EvalReport::to_json() const {
  json j;
  j["macro_uas"] = macro_uas;
  j["macro_las"] = macro_las;
  j["sent_uas"] = sent_uas;
  j["sent_las"] = sent_las;
  j["token_count"] = token_count;
  j["scored_token_count"] = scored_token_count;
  j["sentences_scored"] = sentences_scored;
  j["sentences_dropped"] = sentences_dropped;
  j["include_punct"] = include_punct;
  return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
  json j = json::parse(text);
  EvalReport r;
  r.macro_uas = j.at("macro_uas").get<double>();
  r.macro_las = j.at("macro_las").get<double>();
  r.sent_uas = j.at("sent_uas").get<std::vector<double>>();
  r.sent_las = j.at("sent_las").get<std::vector<double>>();
  r.token_count = j.at("token_count").get<long>();
  r.scored_token_count = j.at("scored_token_count").get<long>();
  r.sentences_scored = j.at("sentences_scored").get<int>();
  r.sentences_dropped = j.at("sentences_dropped").get<int>();
  r.include_punct = j.at("include_punct").get<bool>();
  return r;
}

}  // namespace depkit::eval
