#include "adaptive/pathway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <fmt/format.h>

#include "adaptive/errors.hpp"

namespace adaptive {

namespace {

constexpr double kFitWeight = 0.5;
constexpr double kPreferenceWeight = 0.3;
constexpr double kNoveltyWeight = 0.2;

// Summation in sorted order so permutations of one item set score
// bit-identically. Sorts in place.
double mean_term(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(terms.size());
}

double quality_value(std::size_t ok, std::size_t n, std::size_t covered,
                     std::size_t denom) {
  if (n == 0 || denom == 0) return 0.0;
  double fraction = static_cast<double>(ok) / static_cast<double>(n);
  double coverage = std::min(
      1.0, static_cast<double>(covered) / static_cast<double>(denom));
  return fraction * coverage;
}

double reward_value(const RewardConfig& cfg, double e, double q) {
  return cfg.beta * e + cfg.gamma * q;
}

struct ItemFacts {
  double fit = 0.0;
  double preference = 0.0;
  double novelty = 1.0;
  double term = 0.0;
};

// Everything needed to score pathways for one learner snapshot, flattened to
// catalog indices.
class Scorer {
 public:
  Scorer(const LearnerProfile& profile, const Curriculum* curriculum,
         const Catalog& catalog, const RewardConfig& cfg)
      : catalog_(catalog), cfg_(cfg) {
    const auto& skills = catalog.skills();
    mastery_.resize(skills.size());
    for (std::size_t s = 0; s < skills.size(); ++s) {
      mastery_[s] = profile.mastery_of(skills[s]);
    }
    std::vector<int> seen(catalog.items().size(), 0);
    for (const auto& rec : profile.history) {
      if (auto idx = catalog.index_of(rec.item_id)) ++seen[*idx];
    }
    open_target_.assign(skills.size(), false);
    std::size_t open = 0;
    if (curriculum) {
      for (const auto& u : curriculum->units) {
        auto s = catalog.skill_index(u.target_skill);
        if (!s || open_target_[*s]) continue;
        if (mastery_[*s] < u.mastery_threshold) {
          open_target_[*s] = true;
          ++open;
        }
      }
    }
    denom_ = std::min(cfg.horizon, open);

    facts_.resize(catalog.items().size());
    for (std::size_t i = 0; i < facts_.size(); ++i) {
      const ContentItem& it = catalog.item(i);
      ItemFacts& f = facts_[i];
      double wsum = 0.0, msum = 0.0;
      for (const auto& [s, w] : catalog.indexed(i).skills) {
        wsum += w;
        msum += w * mastery_[s];
      }
      double mbar = wsum > 0.0 ? msum / wsum : 0.0;
      f.fit = difficulty_fit(it.difficulty, mbar, cfg.stretch, cfg.kernel_width);
      f.preference = cfg.fixed_preference
                         ? *cfg.fixed_preference
                         : profile.preference_of(it.modality);
      f.novelty = std::pow(0.5, seen[i]);
      f.term = kFitWeight * f.fit + kPreferenceWeight * f.preference +
               kNoveltyWeight * f.novelty;
    }
  }

  const ItemFacts& facts(std::size_t i) const { return facts_[i]; }

  // Calls fn(skill) for every open target skill the item teaches.
  template <typename Fn>
  void for_targets(std::size_t item, Fn&& fn) const {
    for (const auto& [s, w] : catalog_.indexed(item).skills) {
      if (w > 0.0 && open_target_[s]) fn(s);
    }
  }
  const std::vector<double>& mastery() const { return mastery_; }
  std::size_t denom() const { return denom_; }

  bool eligible(const std::vector<double>& projected, std::size_t item) const {
    for (const auto& [s, threshold] : catalog_.indexed(item).prerequisites) {
      if (projected[s] < threshold) return false;
    }
    return true;
  }

  void project(std::vector<double>& projected, std::size_t item) const {
    const double fit = facts_[item].fit;
    for (const auto& [s, w] : catalog_.indexed(item).skills) {
      if (w <= 0.0) continue;
      projected[s] = projected[s] + cfg_.projected_gain * fit * (1.0 - projected[s]);
    }
  }

  double engagement(const std::vector<std::size_t>& items) const {
    std::vector<double> terms;
    terms.reserve(items.size());
    for (auto i : items) terms.push_back(facts_[i].term);
    return mean_term(terms);
  }

  double quality(const std::vector<std::size_t>& items) const {
    if (items.empty()) return 0.0;
    std::vector<double> projected = mastery_;
    std::size_t ok = 0;
    std::vector<std::uint32_t> covered;
    for (auto i : items) {
      if (eligible(projected, i)) ++ok;
      project(projected, i);
      for_targets(i, [&](std::uint32_t s) {
        if (std::find(covered.begin(), covered.end(), s) == covered.end()) {
          covered.push_back(s);
        }
      });
    }
    return quality_value(ok, items.size(), covered.size(), denom_);
  }

  ScoredPathway score(const std::vector<std::size_t>& items) const {
    ScoredPathway out;
    out.pathway.items.reserve(items.size());
    for (auto i : items) out.pathway.items.push_back(catalog_.item(i).id);
    out.engagement = engagement(items);
    out.quality = quality(items);
    out.reward = reward_value(cfg_, out.engagement, out.quality);
    return out;
  }

  // Distinct pool of the curriculum, ascending catalog index.
  std::vector<std::size_t> pool(const Curriculum& curriculum) const {
    std::vector<bool> in(catalog_.items().size(), false);
    for (const auto& u : curriculum.units) {
      for (const auto& id : u.item_pool) {
        if (auto idx = catalog_.index_of(id)) in[*idx] = true;
      }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i]) out.push_back(i);
    }
    return out;
  }

  const RewardConfig& cfg() const { return cfg_; }

 private:
  const Catalog& catalog_;
  const RewardConfig& cfg_;
  std::vector<double> mastery_;
  std::vector<bool> open_target_;
  std::size_t denom_ = 0;
  std::vector<ItemFacts> facts_;
};

std::vector<std::size_t> resolve(const Pathway& pathway,
                                 const Catalog& catalog) {
  std::vector<std::size_t> out;
  out.reserve(pathway.items.size());
  for (const auto& id : pathway.items) {
    auto idx = catalog.index_of(id);
    if (!idx) {
      throw ValidationError(fmt::format("unknown item '{}'", id), "pathway");
    }
    if (std::find(out.begin(), out.end(), *idx) != out.end()) {
      throw ValidationError(fmt::format("duplicate item '{}' in pathway", id),
                            "pathway");
    }
    out.push_back(*idx);
  }
  return out;
}

struct Beam {
  std::vector<std::size_t> items;
  std::vector<double> projected;
  std::vector<std::uint32_t> covered;
  double reward = 0.0;
};

// Better-first ordering: higher reward, then smaller item sequence. Items are
// catalog indices and the catalog is id-sorted, so index order is id order.
bool better(double ra, const std::vector<std::size_t>& a, double rb,
            const std::vector<std::size_t>& b) {
  if (ra != rb) return ra > rb;
  return a < b;
}

}  // namespace

void validate(const RewardConfig& cfg) {
  if (!(cfg.beta >= 0.0) || !(cfg.gamma >= 0.0)) {
    throw ValidationError("beta and gamma must be non-negative", "beta");
  }
  if (!(cfg.beta + cfg.gamma > 0.0)) {
    throw ValidationError("beta + gamma must be positive", "gamma");
  }
  if (cfg.horizon == 0) throw ValidationError("horizon must be positive", "horizon");
  if (cfg.beam_width == 0) {
    throw ValidationError("beam_width must be positive", "beam_width");
  }
  if (!(cfg.kernel_width > 0.0)) {
    throw ValidationError("kernel_width must be positive", "kernel_width");
  }
  if (!(cfg.projected_gain >= 0.0 && cfg.projected_gain <= 1.0)) {
    throw ValidationError("projected_gain out of [0,1]", "projected_gain");
  }
  if (cfg.fixed_preference &&
      !(*cfg.fixed_preference >= 0.0 && *cfg.fixed_preference <= 1.0)) {
    throw ValidationError("fixed_preference out of [0,1]", "fixed_preference");
  }
}

double difficulty_fit(double difficulty, double mastery, double stretch,
                      double width) {
  double gap = difficulty - (mastery + stretch);
  return std::exp(-(gap * gap) / (2.0 * width * width));
}

double weighted_mastery(const ContentItem& item,
                        const LearnerProfile& profile) {
  double wsum = 0.0, msum = 0.0;
  for (const auto& [skill, w] : item.skills) {
    wsum += w;
    msum += w * profile.mastery_of(skill);
  }
  return wsum > 0.0 ? msum / wsum : 0.0;
}

bool prerequisites_met(const ContentItem& item, const LearnerProfile& profile) {
  for (const auto& [skill, threshold] : item.prerequisites) {
    if (profile.mastery_of(skill) < threshold) return false;
  }
  return true;
}

std::vector<ItemBreakdown> engagement_breakdown(const Pathway& pathway,
                                                const LearnerProfile& profile,
                                                const Catalog& catalog,
                                                const RewardConfig& cfg) {
  auto items = resolve(pathway, catalog);
  Scorer scorer(profile, nullptr, catalog, cfg);
  std::vector<ItemBreakdown> out;
  for (auto i : items) {
    const auto& f = scorer.facts(i);
    out.push_back({catalog.item(i).id, f.fit, f.preference, f.novelty, f.term});
  }
  return out;
}

double estimate_engagement(const Pathway& pathway,
                           const LearnerProfile& profile,
                           const Catalog& catalog, const RewardConfig& cfg) {
  if (pathway.empty()) throw DomainError("engagement of an empty pathway");
  auto items = resolve(pathway, catalog);
  return Scorer(profile, nullptr, catalog, cfg).engagement(items);
}

double pathway_quality(const Pathway& pathway, const LearnerContext& ctx,
                       const Catalog& catalog, const RewardConfig& cfg) {
  if (pathway.empty()) return 0.0;
  auto items = resolve(pathway, catalog);
  return Scorer(ctx.profile, &ctx.curriculum, catalog, cfg).quality(items);
}

ScoredPathway reward(const Pathway& pathway, const LearnerContext& ctx,
                     const Catalog& catalog, const RewardConfig& cfg) {
  if (pathway.empty()) throw DomainError("reward of an empty pathway");
  auto items = resolve(pathway, catalog);
  return Scorer(ctx.profile, &ctx.curriculum, catalog, cfg).score(items);
}

std::vector<Pathway> enumerate_candidates(const LearnerContext& ctx,
                                          const Catalog& catalog,
                                          const RewardConfig& cfg) {
  validate(cfg);
  if (ctx.curriculum.empty()) return {};
  Scorer scorer(ctx.profile, &ctx.curriculum, catalog, cfg);
  const auto pool = scorer.pool(ctx.curriculum);
  const std::size_t denom = scorer.denom();

  struct Expansion {
    std::size_t parent;
    std::size_t item;
    std::size_t covered;
    double reward;
  };

  std::vector<Beam> beams(1);
  beams[0].projected = scorer.mastery();
  std::vector<Beam> completed;
  std::vector<Expansion> expansions;
  std::vector<double> terms;

  for (std::size_t depth = 1; depth <= cfg.horizon; ++depth) {
    expansions.clear();
    for (std::size_t b = 0; b < beams.size(); ++b) {
      const Beam& beam = beams[b];
      for (std::size_t item : pool) {
        if (std::find(beam.items.begin(), beam.items.end(), item) !=
            beam.items.end()) {
          continue;
        }
        if (!scorer.eligible(beam.projected, item)) continue;
        const ItemFacts& f = scorer.facts(item);
        std::size_t covered = beam.covered.size();
        scorer.for_targets(item, [&](std::uint32_t s) {
          if (std::find(beam.covered.begin(), beam.covered.end(), s) ==
              beam.covered.end()) {
            ++covered;
          }
        });
        terms.clear();
        for (auto i : beam.items) terms.push_back(scorer.facts(i).term);
        terms.push_back(f.term);
        double e = mean_term(terms);
        std::size_t n = beam.items.size() + 1;
        double q = quality_value(n, n, covered, denom);
        expansions.push_back({b, item, covered, reward_value(cfg, e, q)});
      }
    }
    if (expansions.empty()) break;
    auto seq_less = [&](const Expansion& a, const Expansion& b) {
      const auto& pa = beams[a.parent].items;
      const auto& pb = beams[b.parent].items;
      std::size_t n = pa.size();
      for (std::size_t i = 0; i < n; ++i) {
        if (pa[i] != pb[i]) return pa[i] < pb[i];
      }
      return a.item < b.item;
    };
    auto keep = std::min(cfg.beam_width, expansions.size());
    std::partial_sort(expansions.begin(), expansions.begin() + keep,
                      expansions.end(),
                      [&](const Expansion& a, const Expansion& b) {
                        if (a.reward != b.reward) return a.reward > b.reward;
                        return seq_less(a, b);
                      });
    std::vector<Beam> next;
    next.reserve(keep);
    for (std::size_t x = 0; x < keep; ++x) {
      const Expansion& ex = expansions[x];
      const Beam& parent = beams[ex.parent];
      Beam child;
      child.items = parent.items;
      child.items.push_back(ex.item);
      child.projected = parent.projected;
      scorer.project(child.projected, ex.item);
      child.covered = parent.covered;
      scorer.for_targets(ex.item, [&](std::uint32_t s) {
        if (std::find(child.covered.begin(), child.covered.end(), s) ==
            child.covered.end()) {
          child.covered.push_back(s);
        }
      });
      child.reward = ex.reward;
      next.push_back(std::move(child));
    }
    // Every kept prefix is itself a candidate pathway.
    completed.insert(completed.end(), next.begin(), next.end());
    beams = std::move(next);
  }

  std::sort(completed.begin(), completed.end(),
            [](const Beam& a, const Beam& b) {
              return better(a.reward, a.items, b.reward, b.items);
            });
  completed.erase(std::unique(completed.begin(), completed.end(),
                              [](const Beam& a, const Beam& b) {
                                return a.items == b.items;
                              }),
                  completed.end());
  if (completed.size() > cfg.beam_width) completed.resize(cfg.beam_width);

  std::vector<Pathway> out;
  out.reserve(completed.size());
  for (const auto& b : completed) {
    Pathway p;
    for (auto i : b.items) p.items.push_back(catalog.item(i).id);
    out.push_back(std::move(p));
  }
  return out;
}

ScoredPathway select_optimal(const std::vector<Pathway>& candidates,
                             const LearnerContext& ctx, const Catalog& catalog,
                             const RewardConfig& cfg) {
  if (candidates.empty()) throw DomainError("no eligible content");
  Scorer scorer(ctx.profile, &ctx.curriculum, catalog, cfg);
  std::optional<ScoredPathway> best;
  for (const auto& c : candidates) {
    if (c.empty()) throw DomainError("reward of an empty pathway");
    ScoredPathway s = scorer.score(resolve(c, catalog));
    if (!best || s.reward > best->reward ||
        (s.reward == best->reward && s.pathway.items < best->pathway.items)) {
      best = std::move(s);
    }
  }
  return *best;
}

std::optional<ScoredPathway> recommend(const LearnerContext& ctx,
                                       const Catalog& catalog,
                                       const RewardConfig& cfg) {
  auto candidates = enumerate_candidates(ctx, catalog, cfg);
  if (candidates.empty()) return std::nullopt;
  return select_optimal(candidates, ctx, catalog, cfg);
}

}  // namespace adaptive
