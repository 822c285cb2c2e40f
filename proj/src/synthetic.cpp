#include "claimwise/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "claimwise/decompose.hpp"
#include "claimwise/hash.hpp"

namespace claimwise::sim {

namespace {

struct ProtoClaim {
  double relevance;
  double helpfulness;
};

struct ProtoLink {
  std::size_t truth_index;  // index into the ground-truth side
  std::size_t other_index;
  double similarity;
};

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

SyntheticWorld generate_world(const SyntheticSpec& spec) {
  SyntheticWorld world;
  world.judge_transcript = std::make_shared<Transcript>();
  const auto judge_template = default_prompt(ProviderKind::HelpfulnessJudge);

  auto record_score = [&](const std::string& query, const std::string& text, double score) {
    score = round4(std::clamp(score, 0.0, 1.0));
    world.scores[{query, text}] = score;
    world.judge_transcript->put(transcript_key(make_judge_request(judge_template, query, text)),
                                nlohmann::json(score).dump());
  };

  for (std::size_t inst = 0; inst < spec.instances; ++inst) {
    SplitMix64 rng(hash64("synthetic:" + std::to_string(spec.seed) + ":" + std::to_string(inst)));
    const Side truth = rng.uniform() < 0.5 ? Side::A : Side::B;
    auto count = [&] {
      return spec.min_claims + rng.below(spec.max_claims - spec.min_claims + 1);
    };
    auto relevant_score = [&] { return rng.uniform(spec.relevance_threshold, 1.0); };
    auto irrelevant_score = [&] { return rng.uniform(0.0, spec.relevance_threshold - 1e-6); };
    auto noise_claim = [&] {
      return ProtoClaim{irrelevant_score(),
                        spec.irrelevant_mean + rng.uniform(-spec.irrelevant_noise,
                                                           spec.irrelevant_noise)};
    };
    const double lo = 0.25;
    const double hi = 0.75;

    // Ground-truth side.
    std::vector<ProtoClaim> good(count());
    for (auto& c : good) {
      if (rng.uniform() < spec.relevant_fraction) {
        c = {relevant_score(), rng.uniform(lo + spec.relevant_advantage, hi + spec.relevant_advantage)};
      } else {
        c = noise_claim();
      }
    }

    // Other side: weak counterparts of some relevant ground-truth claims,
    // then ordinary claims; narrative order is shuffled.
    const std::size_t n_other = count();
    std::vector<ProtoClaim> other;
    std::vector<std::size_t> counterpart_of;  // ground-truth index per weak counterpart
    for (std::size_t g = 0; g < good.size(); ++g) {
      if (good[g].relevance >= spec.relevance_threshold && other.size() + 2 < n_other &&
          rng.uniform() < spec.counterpart_rate) {
        other.push_back({irrelevant_score(), rng.uniform(0.05, 0.35)});
        counterpart_of.push_back(g);
      }
    }
    const std::size_t n_weak = other.size();
    while (other.size() < n_other) {
      if (rng.uniform() < spec.relevant_fraction) {
        other.push_back({relevant_score(), rng.uniform(lo, hi)});
      } else {
        other.push_back(noise_claim());
      }
    }
    std::vector<std::size_t> perm(other.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<std::size_t> position(other.size());  // proto index -> narrative position
    std::vector<ProtoClaim> other_ordered(other.size());
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
      other_ordered[pos] = other[perm[pos]];
      position[perm[pos]] = pos;
    }

    std::vector<ProtoLink> links;
    for (std::size_t w = 0; w < n_weak; ++w) {
      links.push_back({counterpart_of[w], position[w], rng.uniform(0.72, 0.95)});
    }
    std::vector<std::size_t> good_relevant;
    std::vector<std::size_t> good_irrelevant;
    for (std::size_t g = 0; g < good.size(); ++g) {
      (good[g].relevance >= spec.relevance_threshold ? good_relevant : good_irrelevant).push_back(g);
    }
    for (std::size_t o = n_weak; o < other.size(); ++o) {
      const bool relevant = other[o].relevance >= spec.relevance_threshold;
      const auto& pool = relevant ? good_relevant : good_irrelevant;
      if (pool.empty()) continue;
      const double u = rng.uniform();
      const std::size_t g = pool[rng.below(pool.size())];
      if (relevant && u < 0.3) {
        links.push_back({g, position[o], rng.uniform(spec.link_threshold, 0.95)});
      } else if (!relevant && u < 0.15) {
        links.push_back({g, position[o], rng.uniform(spec.link_threshold, 0.9)});
      } else if (u > 0.9) {
        links.push_back({g, position[o], rng.uniform(0.5, spec.link_threshold - 0.01)});
      }
    }

    // Materialize texts, claims and judge scores.
    ResponsePair pair;
    pair.pair_id = "syn-" + std::to_string(spec.seed) + "-" + std::to_string(1000 + inst).substr(1);
    pair.query = "Human: Synthetic question " + std::to_string(inst) + "?";
    pair.ground_truth = truth;
    pair.rounds = 1;
    pair.source = "synthetic";

    DecompositionResult doc;
    doc.pair_id = pair.pair_id;
    const Side other_side = truth == Side::A ? Side::B : Side::A;
    auto build_side = [&](Side side, const std::vector<ProtoClaim>& protos) {
      std::string response;
      std::vector<Claim> claims;
      double sum = 0.0;
      for (std::size_t k = 0; k < protos.size(); ++k) {
        if (!response.empty()) response += ' ';
        Claim c;
        c.text = "Point " + std::to_string(k + 1) + " of response " + std::string(to_string(side)) +
                 " to question " + std::to_string(inst) + ".";
        c.id = claim_id(pair.pair_id, side, k, 0);
        c.side = side;
        c.sentence_index = k;
        c.source_span = {response.size(), response.size() + c.text.size()};
        c.narrative_rank = k;
        c.relevance = round4(protos[k].relevance);
        c.fidelity = 1.0;
        response += c.text;
        record_score(pair.query, c.text, protos[k].helpfulness);
        sum += world.scores[{pair.query, c.text}];
        claims.push_back(std::move(c));
      }
      const double full = sum / static_cast<double>(protos.size()) +
                          rng.uniform(-spec.full_text_noise, spec.full_text_noise);
      record_score(pair.query, response, full);
      (side == Side::A ? pair.response_a : pair.response_b) = response;
      doc.claims(side) = std::move(claims);
    };
    build_side(truth, good);
    build_side(other_side, other_ordered);

    for (const auto& l : links) {
      const auto& truth_claim = doc.claims(truth)[l.truth_index];
      const auto& other_claim = doc.claims(other_side)[l.other_index];
      Link link;
      link.claim_a_id = truth == Side::A ? truth_claim.id : other_claim.id;
      link.claim_b_id = truth == Side::A ? other_claim.id : truth_claim.id;
      link.similarity = round4(l.similarity);
      link.keyword = "topic " + std::to_string(l.truth_index + 1);
      doc.links.push_back(std::move(link));
    }
    doc.provenance.stages["extraction"] = {"synthetic", ""};
    doc.provenance.stages["ranking"] = {"synthetic", ""};
    doc.provenance.stages["linking"] = {"synthetic", ""};
    doc.provenance.stages["labeling"] = {"synthetic", ""};

    world.pairs.push_back(std::move(pair));
    world.decompositions.push_back(std::move(doc));
  }
  return world;
}

}  // namespace claimwise::sim
