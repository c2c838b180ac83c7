#pragma once

// Propositional rule learner in the RIPPER family: IREP* grow/prune per
// class, a description-length stopping rule, and rule-set optimization.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mll/learners/learner.hpp"
#include "mll/log.hpp"
#include "mll/random.hpp"

namespace mll {

/// p1 * (log2(p1/(p1+n1)) - log2(p0/(p0+n0))); -inf when p1 = 0.
inline double foil_gain(double p0, double n0, double p1, double n1) {
  if (!(p1 > 0)) return -std::numeric_limits<double>::infinity();
  return p1 * (std::log2(p1 / (p1 + n1)) - std::log2(p0 / (p0 + n0)));
}

/// (p - n) / (p + n); 0 for an empty cover.
inline double prune_metric(double p, double n) { return p + n > 0 ? (p - n) / (p + n) : 0.0; }

struct Condition {
  enum class Op { Eq, Le, Ge };
  std::size_t attribute = 0;
  Op op = Op::Eq;
  double value = 0;  // category index for Eq, threshold for Le/Ge

  bool matches(std::span<const Cell> row) const {
    const Cell& c = row[attribute];
    if (c.is_missing()) return false;
    switch (op) {
      case Op::Eq: return c.category() == static_cast<std::size_t>(value);
      case Op::Le: return c.number() <= value;
      case Op::Ge: return c.number() >= value;
    }
    return false;
  }

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  std::size_t consequent = 0;
  std::vector<double> coverage;  // class counts of the training rows this rule matched first

  bool covers(std::span<const Cell> row) const {
    for (const auto& c : conditions)
      if (!c.matches(row)) return false;
    return true;
  }
};

namespace detail {

inline double subset_dl(double t, double k, double p) {
  double bits = 0;
  if (k > 0) bits -= k * std::log2(p);
  if (t - k > 0) bits -= (t - k) * std::log2(1 - p);
  return bits;
}

inline double theory_dl(std::size_t k, double all_conditions) {
  if (k == 0) return 0.0;
  const double kd = static_cast<double>(k);
  double kbits = std::log2(kd);
  if (kbits > 1) kbits += 2 * std::log2(kbits);
  const double t = std::max(all_conditions, kd);
  return 0.5 * (kbits + subset_dl(t, kd, kd / t));
}

inline double data_dl(double cover, double uncover, double fp, double fn) {
  double bits = std::log2(cover + uncover + 1);
  if (cover > 0) bits += subset_dl(cover, fp, fp / cover);
  if (uncover > 0) bits += subset_dl(uncover, fn, fn / uncover);
  return bits;
}

inline bool all_match(const std::vector<Condition>& conds, std::span<const Cell> row) {
  for (const auto& c : conds)
    if (!c.matches(row)) return false;
  return true;
}

class RipperBuilder {
 public:
  static constexpr double kMaxDlSurplus = 64.0;

  struct Accepted {
    std::size_t consequent;
    double grow_positives;
  };

  RipperBuilder(const SingleLabelView& view, const RipperParams& params, std::uint64_t seed)
      : v_(view), p_(params), rng_(seed) {
    // Size of the condition space, used by the theory cost of a rule.
    for (std::size_t f = 0; f < v_.feature_count(); ++f) {
      const auto& a = v_.features()[f];
      if (a.is_nominal()) {
        all_conditions_ += static_cast<double>(a.categories.size());
      } else {
        std::vector<double> vals;
        for (std::size_t i = 0; i < v_.size(); ++i)
          if (!v_.cell(i, f).is_missing()) vals.push_back(v_.cell(i, f).number());
        std::sort(vals.begin(), vals.end());
        all_conditions_ += 2.0 * static_cast<double>(std::unique(vals.begin(), vals.end()) - vals.begin());
      }
    }
  }

  std::vector<Rule> rules;
  std::vector<Accepted> trace;
  std::vector<double> default_counts;

  void run() {
    const auto C = v_.class_count();
    const auto counts = v_.class_counts();
    const std::size_t default_class = argmax(counts);
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < C; ++c)
      if (c != default_class) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return counts[a] < counts[b]; });

    std::vector<std::size_t> remaining(v_.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

    for (auto c : order) {
      if (counts[c] < 3) {
        log::warn("Ripper: class '" + v_.target().categories[c] + "' has fewer than 3 instances; left to the default rule");
        continue;
      }
      cls_ = c;
      rows_ = remaining;
      bool any_positive = false;
      for (auto r : rows_) any_positive = any_positive || v_.target_of(r) == cls_;
      if (!any_positive) continue;
      auto learned = learn_class();
      std::vector<std::size_t> next;
      for (auto r : remaining) {
        bool hit = false;
        for (const auto& conds : learned) hit = hit || all_match(conds, v_.row(r));
        if (!hit) next.push_back(r);
      }
      remaining = std::move(next);
      for (auto& conds : learned) rules.push_back(Rule{std::move(conds), c, {}});
    }

    // First-match coverage over the full training data.
    for (auto& r : rules) r.coverage.assign(C, 0.0);
    default_counts.assign(C, 0.0);
    for (std::size_t i = 0; i < v_.size(); ++i) {
      auto row = v_.row(i);
      bool hit = false;
      for (auto& r : rules)
        if (r.covers(row)) {
          r.coverage[v_.target_of(i)] += 1.0;
          hit = true;
          break;
        }
      if (!hit) default_counts[v_.target_of(i)] += 1.0;
    }
    double uncovered = 0;
    for (double d : default_counts) uncovered += d;
    if (uncovered == 0) default_counts = counts;
  }

 private:
  using Conds = std::vector<Condition>;
  using Coverage = std::vector<std::uint8_t>;  // over positions in rows_

  const SingleLabelView& v_;
  RipperParams p_;
  Rng rng_;
  double all_conditions_ = 0;
  std::size_t cls_ = 0;
  std::vector<std::size_t> rows_;

  bool positive(std::size_t pos) const { return v_.target_of(rows_[pos]) == cls_; }
  std::span<const Cell> row_at(std::size_t pos) const { return v_.row(rows_[pos]); }

  Coverage coverage_of(const Conds& conds) const {
    Coverage cov(rows_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) cov[i] = all_match(conds, row_at(i)) ? 1 : 0;
    return cov;
  }

  std::pair<double, double> counts_on(const Conds& conds, const std::vector<std::size_t>& positions) const {
    double p = 0, n = 0;
    for (auto i : positions)
      if (all_match(conds, row_at(i))) (positive(i) ? p : n) += 1;
    return {p, n};
  }

  double total_dl(const std::vector<Conds>& rs, const std::vector<const Coverage*>& covs) const {
    double bits = 0;
    for (const auto& r : rs) bits += theory_dl(r.size(), all_conditions_);
    double cover = 0, uncover = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      bool hit = false;
      for (const auto* c : covs) hit = hit || (*c)[i];
      if (hit) {
        cover += 1;
        fp += positive(i) ? 0 : 1;
      } else {
        uncover += 1;
        fn += positive(i) ? 1 : 0;
      }
    }
    return bits + data_dl(cover, uncover, fp, fn);
  }

  double total_dl(const std::vector<Conds>& rs, const std::vector<Coverage>& covs) const {
    std::vector<const Coverage*> ptrs;
    for (const auto& c : covs) ptrs.push_back(&c);
    return total_dl(rs, ptrs);
  }

  /// Stratified grow/prune partition of the given positions.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(std::vector<std::size_t> P,
                                                                          std::vector<std::size_t> N) {
    rng_.shuffle(P);
    rng_.shuffle(N);
    const double folds = static_cast<double>(p_.folds_for_prune);
    auto grow_part = [&](std::size_t n) {
      return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (folds - 1) / folds));
    };
    std::vector<std::size_t> grow, prune;
    const auto gp = grow_part(P.size()), gn = grow_part(N.size());
    grow.insert(grow.end(), P.begin(), P.begin() + static_cast<std::ptrdiff_t>(gp));
    prune.insert(prune.end(), P.begin() + static_cast<std::ptrdiff_t>(gp), P.end());
    grow.insert(grow.end(), N.begin(), N.begin() + static_cast<std::ptrdiff_t>(gn));
    prune.insert(prune.end(), N.begin() + static_cast<std::ptrdiff_t>(gn), N.end());
    return {std::move(grow), std::move(prune)};
  }

  /// Greedily appends the condition with the highest FOIL gain until the
  /// rule covers no negatives or nothing improves.
  Conds grow(Conds conds, const std::vector<std::size_t>& grow_set) const {
    std::vector<std::size_t> covered;
    for (auto i : grow_set)
      if (all_match(conds, row_at(i))) covered.push_back(i);
    std::vector<bool> used(v_.feature_count(), false);
    for (const auto& c : conds)
      if (c.op == Condition::Op::Eq) used[c.attribute] = true;

    while (true) {
      double p0 = 0, n0 = 0;
      for (auto i : covered) (positive(i) ? p0 : n0) += 1;
      if (n0 == 0 || p0 == 0) break;
      double best_gain = 0;
      std::optional<Condition> best;
      auto consider = [&](const Condition& c, double p1, double n1) {
        if (p1 < p_.min_coverage) return;
        double g = foil_gain(p0, n0, p1, n1);
        if (g > best_gain) {
          best_gain = g;
          best = c;
        }
      };
      for (std::size_t f = 0; f < v_.feature_count(); ++f) {
        const auto& attr = v_.features()[f];
        if (attr.is_nominal()) {
          if (used[f]) continue;
          const auto V = attr.categories.size();
          std::vector<double> pc(V, 0.0), nc(V, 0.0);
          for (auto i : covered) {
            const auto& cell = row_at(i)[f];
            if (cell.is_missing()) continue;
            (positive(i) ? pc : nc)[cell.category()] += 1;
          }
          for (std::size_t val = 0; val < V; ++val)
            consider({f, Condition::Op::Eq, static_cast<double>(val)}, pc[val], nc[val]);
        } else {
          std::vector<std::pair<double, bool>> vals;
          vals.reserve(covered.size());
          double tp = 0, tn = 0;
          for (auto i : covered) {
            const auto& cell = row_at(i)[f];
            if (cell.is_missing()) continue;
            bool pos = positive(i);
            vals.emplace_back(cell.number(), pos);
            (pos ? tp : tn) += 1;
          }
          std::sort(vals.begin(), vals.end());
          double lp = 0, ln = 0;
          for (std::size_t j = 0; j + 1 < vals.size(); ++j) {
            (vals[j].second ? lp : ln) += 1;
            if (vals[j].first == vals[j + 1].first) continue;
            const double t = vals[j].first + (vals[j + 1].first - vals[j].first) / 2;
            consider({f, Condition::Op::Le, t}, lp, ln);
            consider({f, Condition::Op::Ge, t}, tp - lp, tn - ln);
          }
        }
      }
      if (!best) break;
      conds.push_back(*best);
      if (best->op == Condition::Op::Eq) used[best->attribute] = true;
      std::erase_if(covered, [&](std::size_t i) { return !best->matches(row_at(i)); });
    }
    return conds;
  }

  /// Number of leading conditions of each prune row that match.
  std::vector<std::size_t> leading_matches(const Conds& conds, const std::vector<std::size_t>& positions) const {
    std::vector<std::size_t> out;
    out.reserve(positions.size());
    for (auto i : positions) {
      auto row = row_at(i);
      std::size_t m = 0;
      while (m < conds.size() && conds[m].matches(row)) ++m;
      out.push_back(m);
    }
    return out;
  }

  /// Keeps the prefix maximizing the prune metric; ties go to the shorter rule.
  std::size_t prune_single(const Conds& conds, const std::vector<std::size_t>& prune_set) const {
    if (conds.size() <= 1 || prune_set.empty()) return conds.size();
    const auto m = leading_matches(conds, prune_set);
    std::size_t best_len = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t len = 1; len <= conds.size(); ++len) {
      double p = 0, n = 0;
      for (std::size_t j = 0; j < prune_set.size(); ++j)
        if (m[j] >= len) (positive(prune_set[j]) ? p : n) += 1;
      const double v = prune_metric(p, n);
      if (v > best) {
        best = v;
        best_len = len;
      }
    }
    return best_len;
  }

  /// Keeps the prefix maximizing the accuracy of the whole rule set on the
  /// prune data, where `others` are the rules that remain alongside it.
  std::size_t prune_in_ruleset(const Conds& conds, const std::vector<std::size_t>& prune_set,
                               const std::vector<const Coverage*>& others) const {
    if (conds.size() <= 1 || prune_set.empty()) return conds.size();
    const auto m = leading_matches(conds, prune_set);
    std::vector<bool> other_hit(prune_set.size(), false);
    for (std::size_t j = 0; j < prune_set.size(); ++j)
      for (const auto* c : others) other_hit[j] = other_hit[j] || (*c)[prune_set[j]];
    std::size_t best_len = 1;
    double best = -1;
    for (std::size_t len = 1; len <= conds.size(); ++len) {
      double correct = 0;
      for (std::size_t j = 0; j < prune_set.size(); ++j) {
        bool predicted = other_hit[j] || m[j] >= len;
        correct += predicted == positive(prune_set[j]) ? 1 : 0;
      }
      if (correct > best) {
        best = correct;
        best_len = len;
      }
    }
    return best_len;
  }

  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> uncovered(const std::vector<Coverage>& covs) const {
    std::vector<std::size_t> P, N;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      bool hit = false;
      for (const auto& c : covs) hit = hit || c[i];
      if (!hit) (positive(i) ? P : N).push_back(i);
    }
    return {std::move(P), std::move(N)};
  }

  /// IREP*: add rules for uncovered positives until a stopping rule fires.
  void irep(std::vector<Conds>& rs, std::vector<Coverage>& covs, double min_dl) {
    while (true) {
      auto [P, N] = uncovered(covs);
      if (P.empty()) break;
      auto [grow_set, prune_set] = partition(std::move(P), std::move(N));
      auto conds = grow({}, grow_set);
      conds.resize(prune_single(conds, prune_set));
      auto [pp, pn] = counts_on(conds, prune_set);
      const auto [gp, gn] = counts_on(conds, grow_set);
      if (pp + pn == 0) std::tie(pp, pn) = std::pair{gp, gn};
      if (gp == 0 || pp + pn == 0 || pn / (pp + pn) > 0.5) break;
      trace.push_back({cls_, gp});
      covs.push_back(coverage_of(conds));
      rs.push_back(std::move(conds));
      const double dl = total_dl(rs, covs);
      if (dl > min_dl + kMaxDlSurplus) break;
      min_dl = std::min(min_dl, dl);
    }
  }

  /// Deletes rules, last first, whenever that lowers the total description length.
  void reduce_by_dl(std::vector<Conds>& rs, std::vector<Coverage>& covs) const {
    double current = total_dl(rs, covs);
    for (std::size_t i = rs.size(); i-- > 0;) {
      auto trial_rs = rs;
      auto trial_covs = covs;
      trial_rs.erase(trial_rs.begin() + static_cast<std::ptrdiff_t>(i));
      trial_covs.erase(trial_covs.begin() + static_cast<std::ptrdiff_t>(i));
      const double dl = total_dl(trial_rs, trial_covs);
      if (dl < current) {
        rs = std::move(trial_rs);
        covs = std::move(trial_covs);
        current = dl;
      }
    }
  }

  void optimize(std::vector<Conds>& rs, std::vector<Coverage>& covs) {
    std::vector<Conds> out_rs;
    std::vector<Coverage> out_covs;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      auto [P, N] = uncovered(out_covs);
      if (P.empty()) break;
      auto [grow_set, prune_set] = partition(std::move(P), std::move(N));
      std::vector<const Coverage*> rest;
      for (std::size_t j = i + 1; j < covs.size(); ++j) rest.push_back(&covs[j]);

      auto replacement = grow({}, grow_set);
      replacement.resize(prune_in_ruleset(replacement, prune_set, rest));
      auto revision = grow(rs[i], grow_set);
      revision.resize(prune_in_ruleset(revision, prune_set, rest));

      std::vector<Conds> candidates = {rs[i], std::move(replacement), std::move(revision)};
      std::size_t chosen = 0;
      double best_dl = std::numeric_limits<double>::infinity();
      Coverage chosen_cov;
      for (std::size_t v = 0; v < candidates.size(); ++v) {
        if (v > 0 && candidates[v].empty()) continue;
        Coverage cov = v == 0 ? covs[i] : coverage_of(candidates[v]);
        std::vector<Conds> trial = out_rs;
        trial.push_back(candidates[v]);
        trial.insert(trial.end(), rs.begin() + static_cast<std::ptrdiff_t>(i + 1), rs.end());
        std::vector<const Coverage*> ptrs;
        for (const auto& c : out_covs) ptrs.push_back(&c);
        ptrs.push_back(&cov);
        ptrs.insert(ptrs.end(), rest.begin(), rest.end());
        const double dl = total_dl(trial, ptrs);
        if (dl < best_dl) {
          best_dl = dl;
          chosen = v;
          chosen_cov = std::move(cov);
        }
      }
      out_rs.push_back(std::move(candidates[chosen]));
      out_covs.push_back(std::move(chosen_cov));
    }
    rs = std::move(out_rs);
    covs = std::move(out_covs);
    irep(rs, covs, total_dl(rs, covs));
    reduce_by_dl(rs, covs);
  }

  std::vector<Conds> learn_class() {
    std::vector<Conds> rs;
    std::vector<Coverage> covs;
    irep(rs, covs, total_dl(rs, covs));
    reduce_by_dl(rs, covs);
    for (std::size_t pass = 0; pass < p_.optimization_passes && !rs.empty(); ++pass) optimize(rs, covs);
    return rs;
  }
};

}  // namespace detail

/// Ordered rule list plus a default rule. Predictions come from the first
/// matching rule's Laplace-corrected training coverage.
class Ripper final : public TrainedLearner {
 public:
  using Accepted = detail::RipperBuilder::Accepted;

  Ripper(LearnerSpec spec, std::vector<Attribute> features, Attribute target, std::vector<Rule> rules,
         std::vector<double> default_counts, std::vector<Accepted> trace = {})
      : TrainedLearner(std::move(spec), std::move(features), std::move(target)),
        rules_(std::move(rules)),
        default_counts_(std::move(default_counts)),
        trace_(std::move(trace)) {}

  static std::shared_ptr<Ripper> train_rules(const SingleLabelView& view, const LearnerSpec& spec) {
    spec.validate();
    if (view.empty()) throw TrainingError("Ripper: empty training view");
    detail::RipperBuilder b(view, std::get<RipperParams>(spec.params), spec.seed);
    b.run();
    return std::make_shared<Ripper>(spec, view.features(), view.target(), std::move(b.rules),
                                    std::move(b.default_counts), std::move(b.trace));
  }

  static LearnerPtr train(const SingleLabelView& view, const LearnerSpec& spec) { return train_rules(view, spec); }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t default_class() const { return argmax(default_counts_); }

  /// Grow-set positive coverage of each rule when IREP* accepted it, in
  /// acceptance order. Not persisted.
  const std::vector<Accepted>& acceptance_trace() const { return trace_; }

  std::string describe() const {
    std::ostringstream out;
    auto counts = [](const std::vector<double>& c) {
      double total = 0;
      for (double x : c) total += x;
      return total;
    };
    for (const auto& r : rules_) {
      for (std::size_t i = 0; i < r.conditions.size(); ++i) {
        const auto& c = r.conditions[i];
        const auto& a = features()[c.attribute];
        out << (i ? " and " : "") << '(' << a.name;
        if (c.op == Condition::Op::Eq)
          out << " = " << a.categories[static_cast<std::size_t>(c.value)];
        else
          out << (c.op == Condition::Op::Le ? " <= " : " >= ") << format_number(c.value);
        out << ')';
      }
      out << " => " << target().name << '=' << classes()[r.consequent] << " (" << format_number(counts(r.coverage))
          << ")\n";
    }
    out << " => " << target().name << '=' << classes()[default_class()] << " (" << format_number(counts(default_counts_))
        << ")\n";
    return out.str();
  }

  json state_json() const override {
    json rs = json::array();
    for (const auto& r : rules_) {
      json conds = json::array();
      for (const auto& c : r.conditions)
        conds.push_back({c.attribute, c.op == Condition::Op::Eq ? "=" : c.op == Condition::Op::Le ? "<=" : ">=", c.value});
      rs.push_back({{"conditions", conds}, {"consequent", r.consequent}, {"coverage", r.coverage}});
    }
    return {{"rules", rs}, {"default_counts", default_counts_}};
  }

  static LearnerPtr from_state(LearnerSpec spec, std::vector<Attribute> features, Attribute target, const json& state) {
    std::vector<Rule> rules;
    for (const auto& jr : state.at("rules")) {
      Rule r;
      for (const auto& jc : jr.at("conditions")) {
        Condition c;
        c.attribute = jc.at(0).get<std::size_t>();
        const auto op = jc.at(1).get<std::string>();
        c.op = op == "=" ? Condition::Op::Eq : op == "<=" ? Condition::Op::Le : Condition::Op::Ge;
        c.value = jc.at(2).get<double>();
        if (c.attribute >= features.size()) throw ParseError("Ripper rule references a missing attribute");
        r.conditions.push_back(c);
      }
      r.consequent = jr.at("consequent").get<std::size_t>();
      r.coverage = jr.at("coverage").get<std::vector<double>>();
      rules.push_back(std::move(r));
    }
    return std::make_shared<Ripper>(std::move(spec), std::move(features), std::move(target), std::move(rules),
                                    state.at("default_counts").get<std::vector<double>>());
  }

 protected:
  std::vector<double> distribution(std::span<const Cell> row) const override {
    for (const auto& r : rules_)
      if (r.covers(row)) return laplace(r.coverage);
    return laplace(default_counts_);
  }

 private:
  static std::vector<double> laplace(const std::vector<double>& counts) {
    std::vector<double> out(counts.size());
    double total = 0;
    for (double c : counts) total += c;
    for (std::size_t i = 0; i < counts.size(); ++i)
      out[i] = (counts[i] + 1.0) / (total + static_cast<double>(counts.size()));
    return out;
  }

  std::vector<Rule> rules_;
  std::vector<double> default_counts_;
  std::vector<Accepted> trace_;
};

}  // namespace mll
