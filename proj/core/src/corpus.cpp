#include "keyopt/corpus.hpp"

#include <fstream>
#include <memory>
#include <regex>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "keyopt/error.hpp"

namespace keyopt {

namespace {

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string_view trim_left(std::string_view s) {
  const auto pos = s.find_first_not_of(" \t\r\n\f\v");
  return pos == std::string_view::npos ? std::string_view{} : s.substr(pos);
}

bool looks_like_retweet(std::string_view text) { return trim_left(text).starts_with("RT @"); }

std::string strip_urls(const std::string& text) {
  // Scheme-prefixed tokens, plus bare t.co short links.
  static const std::regex kUrl(R"([A-Za-z][A-Za-z0-9+.\-]*://\S*|\bt\.co/\S*)");
  return std::regex_replace(text, kUrl, "");
}

/// Byte length of the first `max_chars` UTF-8 code points.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t max_chars) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto length = static_cast<std::int32_t>(s.size());
  std::int32_t offset = 0;
  for (std::size_t n = 0; n < max_chars && offset < length; ++n) {
    U8_FWD_1(data, offset, length);
  }
  return static_cast<std::size_t>(offset);
}

}  // namespace

void IngestPolicy::validate() const {
  if (max_raw_chars == 0) throw Error("ingest policy: max_raw_chars must be positive");
}

void to_json(nlohmann::json& j, const IngestPolicy& policy) {
  j = nlohmann::json{
      {"max_raw_chars", policy.max_raw_chars},
      {"drop_retweets", policy.drop_retweets},
      {"strip_urls", policy.strip_urls},
      {"diacritic_folding", policy.diacritic_folding},
  };
}

void from_json(const nlohmann::json& j, IngestPolicy& policy) {
  IngestPolicy out;
  try {
    out.max_raw_chars = j.value("max_raw_chars", out.max_raw_chars);
    out.drop_retweets = j.value("drop_retweets", out.drop_retweets);
    out.strip_urls = j.value("strip_urls", out.strip_urls);
    out.diacritic_folding = j.value("diacritic_folding", out.diacritic_folding);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("ingest policy: ") + e.what());
  }
  out.validate();
  policy = out;
}

std::vector<TweetRecord> read_tweet_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());

  const bool jsonl = path.extension() == ".jsonl" || path.extension() == ".ndjson";
  std::vector<TweetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!jsonl) {
      records.push_back({line, false});
      continue;
    }
    if (is_blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TweetRecord rec;
      rec.text = j.at("text").get<std::string>();
      rec.retweeted = j.value("retweeted", false);
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::string ingest_tweets(std::span<const TweetRecord> records, const IngestPolicy& policy) {
  policy.validate();
  std::string joined;
  bool any = false;
  for (const auto& rec : records) {
    if (policy.drop_retweets && (rec.retweeted || looks_like_retweet(rec.text))) continue;
    std::string text = policy.strip_urls ? strip_urls(rec.text) : rec.text;
    if (is_blank(text)) continue;
    if (any) joined += ' ';
    joined += text;
    any = true;
  }
  if (!any) throw EmptyCorpusError("no tweets left after filtering");
  joined.resize(utf8_prefix_bytes(joined, policy.max_raw_chars));
  return joined;
}

// ---------------------------------------------------------------------------
// KeySequence

KeySequence::KeySequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] > kSpace) throw Error("key sequence: token out of range");
    if (tokens_[i] == kSpace) {
      if (i == 0) throw Error("key sequence: cannot begin with a space");
      if (tokens_[i - 1] == kSpace) throw Error("key sequence: consecutive spaces");
    }
  }
}

KeySequence KeySequence::parse(std::string_view text) {
  if (text.ends_with('\n')) text.remove_suffix(1);
  std::vector<Token> tokens;
  tokens.reserve(text.size());
  for (char c : text) {
    if (c == ' ') {
      tokens.push_back(kSpace);
    } else if (c >= 'a' && c <= 'z') {
      tokens.push_back(static_cast<Token>(c - 'a'));
    } else {
      throw Error("normalized corpus: unexpected character code " +
                  std::to_string(static_cast<unsigned char>(c)));
    }
  }
  return KeySequence(std::move(tokens));
}

std::string KeySequence::render() const {
  std::string out;
  out.reserve(tokens_.size());
  for (Token t : tokens_) out += t == kSpace ? ' ' : static_cast<char>('a' + t);
  return out;
}

KeySequence normalize(std::string_view raw, const IngestPolicy& policy) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<std::int32_t>(raw.size())));
  text.toLower(icu::Locale::getRoot());
  if (policy.diacritic_folding) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfd = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status)) throw Error(std::string("ICU NFD unavailable: ") + u_errorName(status));
    icu::UnicodeString decomposed = nfd->normalize(text, status);
    if (U_FAILURE(status)) throw Error(std::string("ICU normalization failed: ") + u_errorName(status));
    text = std::move(decomposed);
  }

  std::vector<KeySequence::Token> tokens;
  tokens.reserve(static_cast<std::size_t>(text.length()));
  bool ends_in_space = false;
  for (std::int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
    const UChar32 cp = text.char32At(i);
    ends_in_space = false;
    if (cp >= 'a' && cp <= 'z') {
      tokens.push_back(static_cast<KeySequence::Token>(cp - 'a'));
    } else if (u_isUWhiteSpace(cp)) {
      ends_in_space = true;
      if (!tokens.empty() && tokens.back() != KeySequence::kSpace) {
        tokens.push_back(KeySequence::kSpace);
      }
    }
  }
  if (!ends_in_space && !tokens.empty() && tokens.back() == KeySequence::kSpace) {
    tokens.pop_back();
  }
  return KeySequence(std::move(tokens));
}

std::size_t usable_letter_count(const KeySequence& seq) {
  std::size_t n = 0;
  for (auto t : seq.tokens()) n += t != KeySequence::kSpace;
  return n;
}

}  // namespace keyopt
