#include "keyopt/stats.hpp"

#include <algorithm>

#include "keyopt/error.hpp"

namespace keyopt {

BigramStats::BigramStats(const LetterMatrix& letter, const SpaceMatrix& space)
    : letter_(letter), space_(space) {
  for (int a = 0; a < kLetterCount; ++a) {
    for (int b = 0; b < kLetterCount; ++b) {
      if (letter_[a][b] < 0) throw Error("bigram stats: negative letter count");
      total_ += letter_[a][b];
    }
    for (int b = 0; b <= kEnd; ++b) {
      if (space_[a][b] < 0) throw Error("bigram stats: negative space count");
      total_ += (b == kEnd ? 1 : 2) * space_[a][b];
    }
  }
}

BigramStats count_bigrams(const KeySequence& seq) {
  BigramStats::LetterMatrix letter{};
  BigramStats::SpaceMatrix space{};
  const auto& tokens = seq.tokens();
  int prev = -1;
  int word_final = -1;  // set while the previous token was a space
  for (auto t : tokens) {
    if (t == KeySequence::kSpace) {
      word_final = prev;
      prev = -1;
      continue;
    }
    if (word_final >= 0) {
      ++space[word_final][t];
      word_final = -1;
    } else if (prev >= 0) {
      ++letter[prev][t];
    }
    prev = t;
  }
  if (word_final >= 0) ++space[word_final][BigramStats::kEnd];
  return BigramStats(letter, space);
}

void to_json(nlohmann::json& j, const BigramStats& stats) {
  std::string legend;
  for (int a = 0; a < kLetterCount; ++a) legend += letter_char(a);
  j = nlohmann::json{
      {"letters", legend},
      {"letter_letter", stats.letter_matrix()},
      {"letter_space", stats.space_matrix()},
      {"total_transitions", stats.total_transitions()},
  };
}

BigramStats bigram_stats_from_json(const nlohmann::json& j) {
  try {
    const auto letter = j.at("letter_letter").get<BigramStats::LetterMatrix>();
    const auto space = j.at("letter_space").get<BigramStats::SpaceMatrix>();
    BigramStats stats(letter, space);
    if (j.contains("total_transitions") &&
        j.at("total_transitions").get<std::int64_t>() != stats.total_transitions()) {
      throw Error("bigram stats: total_transitions does not match the matrices");
    }
    return stats;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bigram stats: ") + e.what());
  }
}

std::string PairKey::label() const {
  switch (kind) {
    case Kind::LetterLetter:
      return std::string{letter_char(first), '-', letter_char(second)};
    case Kind::LetterSpace:
      return std::string{letter_char(first)} + "-sp";
    case Kind::SpaceLetter:
      return "sp-" + std::string{letter_char(second)};
  }
  return {};
}

double mean_pair_distance(const BigramStats& stats, const KeyboardGeometry& g,
                          const Layout& layout, const PairKey& key) {
  switch (key.kind) {
    case PairKey::Kind::LetterLetter:
      return g.distance(layout.slot_of(int{key.first}), layout.slot_of(int{key.second}));
    case PairKey::Kind::LetterSpace: {
      const Slot from = layout.slot_of(int{key.first});
      return g.distance(from, g.nearest_space_slot(from));
    }
    case PairKey::Kind::SpaceLetter: {
      const Slot to = layout.slot_of(int{key.second});
      double weighted = 0.0;
      std::int64_t n = 0;
      for (int a = 0; a < kLetterCount; ++a) {
        const std::int64_t c = stats.space(a, key.second);
        if (c == 0) continue;
        weighted += static_cast<double>(c) *
                    g.distance(g.nearest_space_slot(layout.slot_of(a)), to);
        n += c;
      }
      return n == 0 ? 0.0 : weighted / static_cast<double>(n);
    }
  }
  return 0.0;
}

std::vector<PairUsage> pair_usage(const BigramStats& stats, const KeyboardGeometry& g,
                                  const Layout& layout) {
  if (stats.empty()) throw Error("pair_usage: empty stats");

  std::vector<std::pair<PairKey, std::int64_t>> counts;
  for (int a = 0; a < kLetterCount; ++a) {
    std::int64_t final_count = 0;
    std::int64_t initial_count = 0;
    for (int b = 0; b < kLetterCount; ++b) {
      if (const auto c = stats.letter(a, b); c > 0) {
        counts.push_back({{PairKey::Kind::LetterLetter, static_cast<std::int8_t>(a),
                           static_cast<std::int8_t>(b)},
                          c});
      }
      initial_count += stats.space(b, a);
    }
    for (int b = 0; b <= BigramStats::kEnd; ++b) final_count += stats.space(a, b);
    if (final_count > 0) {
      counts.push_back({{PairKey::Kind::LetterSpace, static_cast<std::int8_t>(a), 0}, final_count});
    }
    if (initial_count > 0) {
      counts.push_back(
          {{PairKey::Kind::SpaceLetter, 0, static_cast<std::int8_t>(a)}, initial_count});
    }
  }

  const auto total = static_cast<double>(stats.total_transitions());
  std::vector<PairUsage> out;
  out.reserve(counts.size());
  for (const auto& [key, c] : counts) {
    out.push_back({key, key.label(), c, 100.0 * static_cast<double>(c) / total,
                   mean_pair_distance(stats, g, layout, key)});
  }
  std::sort(out.begin(), out.end(), [](const PairUsage& x, const PairUsage& y) {
    if (x.count != y.count) return x.count > y.count;
    return x.label < y.label;
  });
  return out;
}

}  // namespace keyopt
