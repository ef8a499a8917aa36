#include "litrev/textcore.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "bundled_data.hpp"
#include "litrev/error.hpp"

namespace litrev {

namespace {

struct Codepoint {
  UChar32 value;
  std::size_t start;
  std::size_t end;
};

// Decodes the codepoint at `pos`. Ill-formed bytes decode as U+FFFD spanning one byte.
Codepoint decode_at(std::string_view text, std::size_t pos) {
  int32_t i = static_cast<int32_t>(pos);
  const auto length = static_cast<int32_t>(text.size());
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), i, length, c);
  if (c < 0) c = 0xFFFD;
  return {c, pos, static_cast<std::size_t>(i)};
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  return (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool is_joiner(UChar32 c) {
  return c == '-' || c == '\'' || c == 0x2019 || c == 0x2010 || c == 0x2011;
}

bool is_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(UChar32 c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == 0x201D || c == 0x2019;
}

bool is_opener(UChar32 c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == 0x201C || c == 0x2018;
}

bool starts_sentence(UChar32 c) {
  return u_isupper(c) || u_istitle(c) || u_isdigit(c);
}

std::string to_lower_utf8(std::string_view text) {
  auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool is_ascii(std::string_view text) {
  for (unsigned char ch : text)
    if (ch >= 0x80) return false;
  return true;
}

std::string normalize_token(std::string_view surface, bool lowercase) {
  if (is_ascii(surface)) {
    std::string out(surface);
    if (lowercase)
      for (auto& ch : out)
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    return out;
  }
  auto normalized = normalize_nfc(surface);
  return lowercase ? normalize_nfc(to_lower_utf8(normalized)) : normalized;
}

const WordList& registry_lookup(const std::string& id) {
  static std::mutex mutex;
  static std::unordered_map<std::string, std::unique_ptr<WordList>> lists;
  std::lock_guard lock(mutex);
  if (auto it = lists.find(id); it != lists.end()) return *it->second;

  std::unique_ptr<WordList> list;
  if (id == "english-v1") {
    list = std::make_unique<WordList>(WordList::parse(bundled::stopwords_english_v1()));
  } else if (id == "none") {
    list = std::make_unique<WordList>();
  } else if (id == "abbreviations-english-v1") {
    list = std::make_unique<WordList>(WordList::parse(bundled::abbreviations_english_v1()));
  } else if (id.starts_with("file:")) {
    list = std::make_unique<WordList>(WordList::from_file(id.substr(5)));
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown word list id: " + id, "textcore");
  }
  return *lists.emplace(id, std::move(list)).first->second;
}

// The word (letters, digits, internal periods) that ends right before `dot`.
std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0) {
    std::size_t prev = begin - 1;
    while (prev > 0 && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
    auto cp = decode_at(text, prev);
    if (is_word_char(cp.value) || (cp.value == '.' && prev > 0)) {
      begin = prev;
    } else {
      break;
    }
  }
  while (begin < dot && text[begin] == '.') ++begin;
  return to_lower_utf8(text.substr(begin, dot - begin));
}

}  // namespace

WordList WordList::parse(std::string_view contents) {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    auto line = contents.substr(pos, nl - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) words.insert(normalize_token(line, true));
    pos = nl + 1;
  }
  return WordList(std::move(words));
}

WordList WordList::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read word list: " + path, "textcore");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const WordList& stopword_list(const std::string& id) { return registry_lookup(id); }

const WordList& abbreviation_list() { return registry_lookup("abbreviations-english-v1"); }

std::string normalize_nfc(std::string_view text) {
  if (is_ascii(text)) return std::string(text);
  UErrorCode status = U_ZERO_ERROR;
  const auto* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::config, "ICU NFC normalizer unavailable", "textcore");
  auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(s, status) && U_SUCCESS(status)) return std::string(text);
  status = U_ZERO_ERROR;
  auto normalized = nfc->normalize(s, status);
  if (U_FAILURE(status)) return std::string(text);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<Token> tokenize(std::string_view text, const TokenizerConfig& config) {
  const auto& stopwords = stopword_list(config.stopword_list_id);
  const bool joiners = config.token_pattern == TokenPattern::words_with_joiners;

  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = decode_at(text, pos);
    if (is_space(cp.value)) {
      pos = cp.end;
      continue;
    }
    if (!u_isalnum(cp.value)) {
      Token t;
      t.span = {cp.start, cp.end};
      t.text = normalize_token(t.span.slice(text), config.lowercase);
      t.is_punct = true;
      tokens.push_back(std::move(t));
      pos = cp.end;
      continue;
    }

    std::size_t end = cp.end;
    while (end < text.size()) {
      auto next = decode_at(text, end);
      if (is_word_char(next.value)) {
        end = next.end;
        continue;
      }
      if (joiners && is_joiner(next.value) && next.end < text.size()) {
        auto after = decode_at(text, next.end);
        if (u_isalnum(after.value)) {
          end = after.end;
          continue;
        }
      }
      break;
    }
    Token t;
    t.span = {pos, end};
    t.text = normalize_token(t.span.slice(text), config.lowercase);
    t.is_stopword = stopwords.contains(config.lowercase ? t.text : normalize_token(t.text, true));
    tokens.push_back(std::move(t));
    pos = end;
  }
  return tokens;
}

std::vector<SentenceSpan> split_sentences(std::string_view text, const TokenizerConfig& config) {
  const auto& abbreviations = abbreviation_list();
  std::vector<ByteSpan> spans;

  auto skip_space = [&](std::size_t p) {
    while (p < text.size()) {
      auto cp = decode_at(text, p);
      if (!is_space(cp.value)) break;
      p = cp.end;
    }
    return p;
  };

  std::size_t start = skip_space(0);
  std::size_t content_end = start;  // end of the last non-space codepoint seen
  std::size_t pos = start;
  while (pos < text.size()) {
    auto cp = decode_at(text, pos);
    if (!is_space(cp.value)) content_end = cp.end;
    if (!is_terminator(cp.value)) {
      pos = cp.end;
      continue;
    }

    std::size_t end = cp.end;
    while (end < text.size()) {
      auto next = decode_at(text, end);
      if (!is_terminator(next.value) && !is_closer(next.value)) break;
      end = next.end;
    }

    bool boundary = false;
    if (end == text.size()) {
      boundary = true;
    } else if (is_space(decode_at(text, end).value)) {
      std::size_t after = skip_space(end);
      if (after == text.size()) {
        boundary = true;
      } else {
        auto next = decode_at(text, after);
        if (is_opener(next.value) && next.end < text.size()) next = decode_at(text, next.end);
        boundary = starts_sentence(next.value);
      }
    }
    if (boundary && cp.value == '.' && end == cp.end) {
      auto word = word_before(text, cp.start);
      if (!word.empty() && abbreviations.contains(word)) boundary = false;
    }

    if (boundary) {
      spans.push_back({start, end});
      start = skip_space(end);
      content_end = start;
      pos = start;
    } else {
      content_end = end;
      pos = end;
    }
  }
  if (content_end > start) spans.push_back({start, content_end});

  std::vector<SentenceSpan> sentences;
  sentences.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    SentenceSpan s;
    s.index = i;
    s.span = spans[i];
    s.tokens = tokenize(spans[i].slice(text), config);
    for (auto& t : s.tokens) {
      t.span.start += spans[i].start;
      t.span.end += spans[i].start;
    }
    sentences.push_back(std::move(s));
  }
  return sentences;
}

NgramCounts ngrams(std::span<const Token> tokens, std::size_t n, bool skip_stopwords, bool skip_punct) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "n-gram order must be at least 1", "textcore");
  std::vector<const std::string*> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (skip_stopwords && t.is_stopword) continue;
    if (skip_punct && t.is_punct) continue;
    kept.push_back(&t.text);
  }
  NgramCounts counts;
  if (kept.size() < n) return counts;
  for (std::size_t i = 0; i + n <= kept.size(); ++i) {
    Ngram gram;
    gram.reserve(n);
    for (std::size_t j = 0; j < n; ++j) gram.push_back(*kept[i + j]);
    ++counts[std::move(gram)];
  }
  return counts;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = decode_at(text, pos);
    bool space = is_space(cp.value);
    if (!space && !in_word) ++count;
    in_word = !space;
    pos = cp.end;
  }
  return count;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\n\r\f\v";
  auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

}  // namespace litrev
