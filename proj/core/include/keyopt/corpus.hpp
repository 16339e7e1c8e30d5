#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace keyopt {

struct IngestPolicy {
  std::size_t max_raw_chars = 1200;
  bool drop_retweets = true;
  bool strip_urls = true;
  bool diacritic_folding = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const IngestPolicy& policy);
void from_json(const nlohmann::json& j, IngestPolicy& policy);

struct TweetRecord {
  std::string text;
  bool retweeted = false;
};

/// Reads `.jsonl` ({"text": ..., "retweeted": bool}) or plain text, one
/// tweet per line. Records stay in file order.
std::vector<TweetRecord> read_tweet_file(const std::filesystem::path& path);

/// Drops retweets, excises URLs, joins with single spaces and truncates to
/// `max_raw_chars` code points. Throws EmptyCorpusError when nothing remains.
std::string ingest_tweets(std::span<const TweetRecord> records, const IngestPolicy& policy);

/// Letters a-z and word boundaries. Never starts with a space and never
/// holds two spaces in a row.
class KeySequence {
 public:
  using Token = std::uint8_t;
  static constexpr Token kSpace = 26;

  KeySequence() = default;
  /// Throws keyopt::Error when the tokens break the sequence invariants.
  explicit KeySequence(std::vector<Token> tokens);

  /// Strict inverse of render(): only 'a'-'z' and ' ' are accepted, plus
  /// one optional trailing newline.
  static KeySequence parse(std::string_view text);

  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  std::string render() const;

  bool operator==(const KeySequence&) const = default;

 private:
  std::vector<Token> tokens_;
};

KeySequence normalize(std::string_view raw, const IngestPolicy& policy = {});

std::size_t usable_letter_count(const KeySequence& seq);

}  // namespace keyopt
