#include "litrev/pdf_text.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litrev/error.hpp"

namespace litrev {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorKind::extraction, "PDF: " + message, "docextract");
}

bool is_pdf_space(char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0'; }

bool is_delimiter(char c) {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' || c == '}' || c == '/' ||
         c == '%';
}

bool is_regular(char c) { return !is_pdf_space(c) && !is_delimiter(c); }

// ---------------------------------------------------------------------------
// Object model

struct PdfObject {
  enum class Type { null, boolean, number, name, string, array, dict, ref, op };

  Type type = Type::null;
  bool boolean = false;
  double number = 0.0;
  std::string text;  // name, string bytes or operator
  std::vector<PdfObject> items;  // array elements or dict values
  std::vector<std::string> keys;  // dict keys, parallel to items
  int ref_num = 0;

  bool is(Type t) const { return type == t; }
  bool is_name(std::string_view n) const { return type == Type::name && text == n; }

  const PdfObject* get(std::string_view key) const {
    if (type != Type::dict) return nullptr;
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return &items[i];
    return nullptr;
  }
};

struct IndirectObject {
  PdfObject value;
  bool has_stream = false;
  std::string_view raw_stream;  // into the file, or into `owned`
  std::shared_ptr<std::string> owned;
};

// ---------------------------------------------------------------------------
// Lexer / parser shared by the file body, object streams, content streams and CMaps.

class Parser {
 public:
  explicit Parser(std::string_view data, std::size_t pos = 0) : s_(data), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = std::min(p, s_.size()); }
  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }

  void skip_space() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (is_pdf_space(c)) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  PdfObject parse(int depth = 0) {
    if (depth > 64) fail("object nesting too deep");
    skip_space();
    PdfObject obj;
    if (pos_ >= s_.size()) return obj;
    char c = s_[pos_];
    if (c == '/') {
      ++pos_;
      obj.type = PdfObject::Type::name;
      obj.text = read_name();
    } else if (c == '(') {
      ++pos_;
      obj.type = PdfObject::Type::string;
      obj.text = read_literal();
    } else if (c == '<' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '<') {
      pos_ += 2;
      obj.type = PdfObject::Type::dict;
      while (true) {
        skip_space();
        if (pos_ >= s_.size()) break;
        if (s_[pos_] == '>' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
          pos_ += 2;
          break;
        }
        auto key = parse(depth + 1);
        if (key.type != PdfObject::Type::name) {
          if (key.type == PdfObject::Type::null && pos_ >= s_.size()) break;
          continue;
        }
        obj.keys.push_back(key.text);
        obj.items.push_back(parse(depth + 1));
      }
    } else if (c == '<') {
      ++pos_;
      obj.type = PdfObject::Type::string;
      obj.text = read_hex();
    } else if (c == '[') {
      ++pos_;
      obj.type = PdfObject::Type::array;
      while (true) {
        skip_space();
        if (pos_ >= s_.size()) break;
        if (s_[pos_] == ']') {
          ++pos_;
          break;
        }
        obj.items.push_back(parse(depth + 1));
      }
    } else if (c == ']' || c == '>' || c == ')' || c == '{' || c == '}') {
      ++pos_;
      obj.type = PdfObject::Type::op;
      obj.text = std::string(1, c);
    } else if (c == '+' || c == '-' || c == '.' || (c >= '0' && c <= '9')) {
      obj = read_number_or_ref();
    } else {
      auto word = read_regular();
      if (word == "true" || word == "false") {
        obj.type = PdfObject::Type::boolean;
        obj.boolean = word == "true";
      } else if (word != "null") {
        obj.type = PdfObject::Type::op;
        obj.text = std::move(word);
      }
    }
    return obj;
  }

  std::string read_regular() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_regular(s_[pos_])) ++pos_;
    if (pos_ == start && pos_ < s_.size()) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

 private:
  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::string read_name() {
    std::string out;
    while (pos_ < s_.size() && is_regular(s_[pos_])) {
      char c = s_[pos_++];
      if (c == '#' && pos_ + 1 < s_.size() && hex_value(s_[pos_]) >= 0 && hex_value(s_[pos_ + 1]) >= 0) {
        out += static_cast<char>(hex_value(s_[pos_]) * 16 + hex_value(s_[pos_ + 1]));
        pos_ += 2;
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string read_literal() {
    std::string out;
    int depth = 1;
    while (pos_ < s_.size()) {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 't': out += '\t'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '\r':
            if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
            break;
          case '\n': break;
          default:
            if (e >= '0' && e <= '7') {
              int v = e - '0';
              for (int k = 0; k < 2 && pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '7'; ++k)
                v = v * 8 + (s_[pos_++] - '0');
              out += static_cast<char>(v & 0xFF);
            } else {
              out += e;
            }
        }
      } else if (c == '(') {
        ++depth;
        out += c;
      } else if (c == ')') {
        if (--depth == 0) break;
        out += c;
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string read_hex() {
    std::string out;
    int hi = -1;
    while (pos_ < s_.size() && s_[pos_] != '>') {
      int v = hex_value(s_[pos_++]);
      if (v < 0) continue;
      if (hi < 0) {
        hi = v;
      } else {
        out += static_cast<char>(hi * 16 + v);
        hi = -1;
      }
    }
    if (hi >= 0) out += static_cast<char>(hi * 16);
    if (pos_ < s_.size()) ++pos_;
    return out;
  }

  std::optional<long> try_unsigned() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') ++pos_;
    if (pos_ == start || (pos_ < s_.size() && is_regular(s_[pos_]))) {
      pos_ = start;
      return std::nullopt;
    }
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  PdfObject read_number_or_ref() {
    std::size_t start = pos_;
    auto word = read_regular();
    PdfObject obj;
    obj.type = PdfObject::Type::number;
    try {
      obj.number = std::stod(word);
    } catch (...) {
      obj.number = 0.0;
    }
    bool integral = word.find('.') == std::string::npos && word[0] != '+' && word[0] != '-';
    if (!integral) return obj;

    std::size_t after = pos_;
    skip_space();
    if (auto gen = try_unsigned()) {
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == 'R' && (pos_ + 1 >= s_.size() || !is_regular(s_[pos_ + 1]))) {
        ++pos_;
        obj.type = PdfObject::Type::ref;
        obj.ref_num = static_cast<int>(std::stol(std::string(s_.substr(start, after - start))));
        return obj;
      }
    }
    pos_ = after;
    return obj;
  }

  std::string_view s_;
  std::size_t pos_;
};

// ---------------------------------------------------------------------------
// Stream filters

std::string inflate_bytes(std::string_view in) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) fail("zlib initialisation failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  std::array<char, 16384> buffer{};
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buffer.data());
    zs.avail_out = static_cast<uInt>(buffer.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    out.append(buffer.data(), buffer.size() - zs.avail_out);
  } while (rc == Z_OK && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  // Truncated or slightly corrupt streams are common; keep whatever decoded.
  return out;
}

std::string ascii_hex_decode(std::string_view in) {
  std::string wrapped = "<" + std::string(in);
  if (wrapped.find('>') == std::string::npos) wrapped += '>';
  Parser p(wrapped);
  return p.parse().text;
}

std::string ascii85_decode(std::string_view in) {
  std::string out;
  std::uint32_t tuple = 0;
  int count = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c == '~') break;
    if (is_pdf_space(c)) continue;
    if (c == 'z' && count == 0) {
      out.append(4, '\0');
      continue;
    }
    if (c < '!' || c > 'u') continue;
    tuple = tuple * 85 + static_cast<std::uint32_t>(c - '!');
    if (++count == 5) {
      for (int k = 3; k >= 0; --k) out += static_cast<char>((tuple >> (8 * k)) & 0xFF);
      tuple = 0;
      count = 0;
    }
  }
  if (count > 1) {
    for (int k = count; k < 5; ++k) tuple = tuple * 85 + 84;
    for (int k = 0; k < count - 1; ++k) out += static_cast<char>((tuple >> (8 * (3 - k))) & 0xFF);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text decoding

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string utf16be_to_utf8(std::string_view bytes) {
  std::string out;
  for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
    std::uint32_t u = (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
    if (u >= 0xD800 && u < 0xDC00 && i + 3 < bytes.size()) {
      std::uint32_t lo = (static_cast<unsigned char>(bytes[i + 2]) << 8) | static_cast<unsigned char>(bytes[i + 3]);
      if (lo >= 0xDC00 && lo < 0xE000) {
        append_utf8(out, 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
        i += 2;
        continue;
      }
    }
    append_utf8(out, u);
  }
  return out;
}

// Windows-1252 upper half differs from Latin-1 only in 0x80-0x9F.
constexpr std::array<std::uint16_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::uint32_t cp1252(unsigned char c) {
  if (c >= 0x80 && c < 0xA0) return kCp1252High[c - 0x80];
  return c;
}

std::optional<std::uint32_t> glyph_to_unicode(const std::string& name) {
  static const std::unordered_map<std::string, std::uint32_t> known = {
      {"space", ' '},         {"exclam", '!'},        {"quotedbl", '"'},       {"numbersign", '#'},
      {"dollar", '$'},        {"percent", '%'},       {"ampersand", '&'},      {"quotesingle", '\''},
      {"quoteright", 0x2019}, {"quoteleft", 0x2018},  {"parenleft", '('},      {"parenright", ')'},
      {"asterisk", '*'},      {"plus", '+'},          {"comma", ','},          {"hyphen", '-'},
      {"period", '.'},        {"slash", '/'},         {"zero", '0'},           {"one", '1'},
      {"two", '2'},           {"three", '3'},         {"four", '4'},           {"five", '5'},
      {"six", '6'},           {"seven", '7'},         {"eight", '8'},          {"nine", '9'},
      {"colon", ':'},         {"semicolon", ';'},     {"less", '<'},           {"equal", '='},
      {"greater", '>'},       {"question", '?'},      {"at", '@'},             {"bracketleft", '['},
      {"backslash", '\\'},    {"bracketright", ']'},  {"underscore", '_'},     {"braceleft", '{'},
      {"bar", '|'},           {"braceright", '}'},    {"endash", 0x2013},      {"emdash", 0x2014},
      {"bullet", 0x2022},     {"quotedblleft", 0x201C}, {"quotedblright", 0x201D}, {"ellipsis", 0x2026},
      {"fi", 0xFB01},         {"fl", 0xFB02},         {"ff", 0xFB00},          {"ffi", 0xFB03},
      {"ffl", 0xFB04},        {"minus", 0x2212},      {"dagger", 0x2020},      {"section", 0x00A7},
  };
  if (auto it = known.find(name); it != known.end()) return it->second;
  if (name.size() == 1 && std::isalpha(static_cast<unsigned char>(name[0]))) return name[0];
  auto hex = [](std::string_view h) -> std::optional<std::uint32_t> {
    if (h.empty() || h.size() > 6) return std::nullopt;
    std::uint32_t v = 0;
    for (char c : h) {
      v <<= 4;
      if (c >= '0' && c <= '9') v |= c - '0';
      else if (c >= 'A' && c <= 'F') v |= c - 'A' + 10;
      else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
      else return std::nullopt;
    }
    return v;
  };
  if (name.starts_with("uni") && name.size() == 7) return hex(std::string_view(name).substr(3));
  if (name.starts_with("u") && name.size() >= 5 && name.size() <= 7) return hex(std::string_view(name).substr(1));
  return std::nullopt;
}

struct FontDecoder {
  int code_bytes = 1;
  std::unordered_map<std::uint32_t, std::string> to_unicode;
  std::array<std::string, 256> single_byte;
  bool has_single_byte = true;

  FontDecoder() {
    for (int c = 0; c < 256; ++c) {
      std::string s;
      if (c >= 0x20) {
        auto cp = cp1252(static_cast<unsigned char>(c));
        if (cp != 0) append_utf8(s, cp);
      }
      single_byte[c] = std::move(s);
    }
  }

  std::string decode(std::string_view bytes) const {
    std::string out;
    for (std::size_t i = 0; i + code_bytes <= bytes.size(); i += code_bytes) {
      std::uint32_t code = 0;
      for (int k = 0; k < code_bytes; ++k) code = (code << 8) | static_cast<unsigned char>(bytes[i + k]);
      if (auto it = to_unicode.find(code); it != to_unicode.end()) {
        out += it->second;
      } else if (code_bytes == 1 && has_single_byte) {
        out += single_byte[code];
      }
    }
    return out;
  }
};

void parse_cmap(std::string_view data, FontDecoder& font) {
  Parser p(data);
  std::vector<PdfObject> operands;
  std::optional<int> width;
  while (!p.at_end()) {
    auto obj = p.parse();
    if (!obj.is(PdfObject::Type::op)) {
      operands.push_back(std::move(obj));
      continue;
    }
    const auto& op = obj.text;
    auto code_of = [](const std::string& s) {
      std::uint32_t v = 0;
      for (unsigned char c : s) v = (v << 8) | c;
      return v;
    };
    if (op == "endcodespacerange") {
      if (!operands.empty() && operands[0].is(PdfObject::Type::string))
        width = static_cast<int>(std::max<std::size_t>(1, operands[0].text.size()));
    } else if (op == "endbfchar") {
      for (std::size_t i = 0; i + 1 < operands.size(); i += 2) {
        const auto& src = operands[i].text;
        if (!width) width = static_cast<int>(std::max<std::size_t>(1, src.size()));
        font.to_unicode[code_of(src)] = utf16be_to_utf8(operands[i + 1].text);
      }
    } else if (op == "endbfrange") {
      for (std::size_t i = 0; i + 2 < operands.size(); i += 3) {
        const auto& lo_s = operands[i].text;
        if (!width) width = static_cast<int>(std::max<std::size_t>(1, lo_s.size()));
        auto lo = code_of(lo_s);
        auto hi = code_of(operands[i + 1].text);
        if (hi < lo || hi - lo > 0xFFFF) continue;
        const auto& dst = operands[i + 2];
        if (dst.is(PdfObject::Type::array)) {
          for (std::uint32_t c = lo; c <= hi && c - lo < dst.items.size(); ++c)
            font.to_unicode[c] = utf16be_to_utf8(dst.items[c - lo].text);
        } else {
          std::string base = dst.text;
          for (std::uint32_t c = lo; c <= hi; ++c) {
            font.to_unicode[c] = utf16be_to_utf8(base);
            if (!base.empty()) {
              // Increment the last byte; carries are not expected within one range.
              base.back() = static_cast<char>(static_cast<unsigned char>(base.back()) + 1);
            }
          }
        }
      }
    }
    if (op.starts_with("end") || op.starts_with("begin")) operands.clear();
  }
  if (width) font.code_bytes = std::clamp(*width, 1, 4);
}

// ---------------------------------------------------------------------------
// Document

class PdfDocument {
 public:
  explicit PdfDocument(std::string_view bytes) : data_(bytes) {
    scan_objects();
    expand_object_streams();
  }

  const PdfObject& resolve(const PdfObject& obj, int depth = 0) const {
    static const PdfObject null_object;
    if (!obj.is(PdfObject::Type::ref)) return obj;
    if (depth > 32) return null_object;
    auto it = objects_.find(obj.ref_num);
    if (it == objects_.end()) return null_object;
    return resolve(it->second.value, depth + 1);
  }

  const PdfObject* get(const PdfObject& dict, std::string_view key) const {
    const auto& d = resolve(dict);
    const auto* v = d.get(key);
    return v ? &resolve(*v) : nullptr;
  }

  // Decoded stream contents of an indirect object reference.
  std::optional<std::string> stream_of(const PdfObject& ref) const {
    if (!ref.is(PdfObject::Type::ref)) return std::nullopt;
    auto it = objects_.find(ref.ref_num);
    if (it == objects_.end() || !it->second.has_stream) return std::nullopt;
    return decode_stream(it->second);
  }

  std::vector<const PdfObject*> pages() const {
    std::vector<const PdfObject*> out;
    std::unordered_set<const PdfObject*> visited;
    if (const auto* root = find_catalog()) {
      if (const auto* tree = get(*root, "Pages")) collect_pages(*tree, nullptr, out, visited, 0);
    }
    if (out.empty()) {
      std::vector<int> nums;
      for (const auto& [num, obj] : objects_)
        if (const auto* t = obj.value.get("Type"); t && t->is_name("Page")) nums.push_back(num);
      std::sort(nums.begin(), nums.end());
      for (int n : nums) out.push_back(&objects_.at(n).value);
    }
    return out;
  }

  const PdfObject* inherited_resources(const PdfObject* page) const {
    auto it = inherited_.find(page);
    return it == inherited_.end() ? nullptr : it->second;
  }

  bool encrypted() const {
    for (const auto& [num, obj] : objects_)
      if (obj.value.get("Encrypt")) return true;
    auto trailer = data_.rfind("trailer");
    if (trailer != std::string_view::npos) {
      Parser p(data_, trailer + 7);
      auto dict = p.parse();
      if (dict.get("Encrypt")) return true;
    }
    return false;
  }

  std::string decode_stream(const IndirectObject& obj) const {
    std::string data(obj.raw_stream);
    const auto* filter = get(obj.value, "Filter");
    std::vector<std::string> filters;
    if (filter && filter->is(PdfObject::Type::name)) filters.push_back(filter->text);
    if (filter && filter->is(PdfObject::Type::array))
      for (const auto& f : filter->items) filters.push_back(resolve(f).text);
    for (const auto& f : filters) {
      if (f == "FlateDecode" || f == "Fl") {
        data = inflate_bytes(data);
      } else if (f == "ASCIIHexDecode" || f == "AHx") {
        data = ascii_hex_decode(data);
      } else if (f == "ASCII85Decode" || f == "A85") {
        data = ascii85_decode(data);
      } else {
        return {};  // image codecs and LZW carry no text we can use
      }
    }
    return data;
  }

 private:
  void scan_objects() {
    std::size_t pos = 0;
    while (true) {
      auto hit = data_.find("obj", pos);
      if (hit == std::string_view::npos) break;
      pos = hit + 3;
      if (pos < data_.size() && is_regular(data_[pos])) continue;
      if (hit == 0 || !is_pdf_space(data_[hit - 1])) continue;

      // Walk back over "<num> <gen> ".
      std::size_t p = hit;
      while (p > 0 && is_pdf_space(data_[p - 1])) --p;
      std::size_t gen_end = p;
      while (p > 0 && std::isdigit(static_cast<unsigned char>(data_[p - 1]))) --p;
      if (p == gen_end) continue;
      while (p > 0 && is_pdf_space(data_[p - 1])) --p;
      std::size_t num_end = p;
      while (p > 0 && std::isdigit(static_cast<unsigned char>(data_[p - 1]))) --p;
      if (p == num_end) continue;
      if (p > 0 && is_regular(data_[p - 1])) continue;
      int num = 0;
      try {
        num = std::stoi(std::string(data_.substr(p, num_end - p)));
      } catch (...) {
        continue;
      }

      Parser parser(data_, pos);
      IndirectObject obj;
      try {
        obj.value = parser.parse();
      } catch (const Error&) {
        continue;
      }
      parser.skip_space();
      std::size_t after = parser.pos();
      if (data_.substr(after, 6) == "stream") {
        std::size_t start = after + 6;
        if (start < data_.size() && data_[start] == '\r') ++start;
        if (start < data_.size() && data_[start] == '\n') ++start;
        std::size_t end = std::string_view::npos;
        if (const auto* len = obj.value.get("Length"); len && len->is(PdfObject::Type::number)) {
          auto n = static_cast<std::size_t>(len->number);
          if (start + n <= data_.size()) {
            Parser check(data_, start + n);
            check.skip_space();
            if (data_.substr(check.pos(), 9) == "endstream") end = start + n;
          }
        }
        if (end == std::string_view::npos) {
          auto es = data_.find("endstream", start);
          if (es == std::string_view::npos) es = data_.size();
          end = es;
          if (end > start && data_[end - 1] == '\n') --end;
          if (end > start && data_[end - 1] == '\r') --end;
        }
        obj.has_stream = true;
        obj.raw_stream = data_.substr(start, end - start);
        pos = end;
      } else {
        pos = after;
      }
      objects_[num] = std::move(obj);
    }
  }

  void expand_object_streams() {
    std::vector<std::pair<int, IndirectObject>> found;
    for (const auto& [num, obj] : objects_) {
      if (!obj.has_stream) continue;
      const auto* type = obj.value.get("Type");
      if (!type || !type->is_name("ObjStm")) continue;
      auto decoded = std::make_shared<std::string>(decode_stream(obj));
      const auto* n = get(obj.value, "N");
      const auto* first = get(obj.value, "First");
      if (!n || !first) continue;
      Parser header(*decoded);
      std::vector<std::pair<int, std::size_t>> entries;
      for (int i = 0; i < static_cast<int>(n->number); ++i) {
        auto id = header.parse();
        auto off = header.parse();
        if (!id.is(PdfObject::Type::number) || !off.is(PdfObject::Type::number)) break;
        entries.emplace_back(static_cast<int>(id.number), static_cast<std::size_t>(off.number));
      }
      for (const auto& [id, off] : entries) {
        Parser body(*decoded, static_cast<std::size_t>(first->number) + off);
        IndirectObject inner;
        inner.value = body.parse();
        inner.owned = decoded;
        found.emplace_back(id, std::move(inner));
      }
    }
    for (auto& [id, obj] : found) objects_.try_emplace(id, std::move(obj));
  }

  const PdfObject* find_catalog() const {
    const PdfObject* catalog = nullptr;
    int best = -1;
    for (const auto& [num, obj] : objects_) {
      const auto* t = obj.value.get("Type");
      if (t && t->is_name("Catalog") && num > best) {
        catalog = &obj.value;
        best = num;
      }
    }
    return catalog;
  }

  void collect_pages(const PdfObject& node_ref, const PdfObject* resources, std::vector<const PdfObject*>& out,
                     std::unordered_set<const PdfObject*>& visited, int depth) const {
    const auto& node = resolve(node_ref);
    if (depth > 64 || !node.is(PdfObject::Type::dict) || !visited.insert(&node).second) return;
    if (const auto* r = get(node, "Resources")) resources = r;
    const auto* type = get(node, "Type");
    const auto* kids = get(node, "Kids");
    if (kids && kids->is(PdfObject::Type::array) && !(type && type->is_name("Page"))) {
      for (const auto& kid : kids->items) collect_pages(kid, resources, out, visited, depth + 1);
      return;
    }
    out.push_back(&node);
    inherited_[&node] = resources;
  }

  std::string_view data_;
  std::unordered_map<int, IndirectObject> objects_;
  mutable std::unordered_map<const PdfObject*, const PdfObject*> inherited_;
};

// ---------------------------------------------------------------------------
// Content stream interpretation

class TextCollector {
 public:
  explicit TextCollector(const PdfDocument& doc) : doc_(doc) {}

  std::string page_text(const PdfObject& page) {
    out_.clear();
    const auto* resources = doc_.get(page, "Resources");
    if (!resources) resources = doc_.inherited_resources(&page);
    std::string content;
    if (const auto* contents = page.get("Contents")) {
      if (contents->is(PdfObject::Type::ref)) {
        const auto& target = doc_.resolve(*contents);
        if (target.is(PdfObject::Type::array)) {
          for (const auto& part : target.items) append_stream(content, part);
        } else {
          append_stream(content, *contents);
        }
      } else if (contents->is(PdfObject::Type::array)) {
        for (const auto& part : contents->items) append_stream(content, part);
      }
    }
    run(content, resources, 0);
    return out_;
  }

 private:
  void append_stream(std::string& content, const PdfObject& ref) {
    if (auto s = doc_.stream_of(ref)) {
      content += *s;
      content += '\n';
    }
  }

  void newline() {
    while (!out_.empty() && out_.back() == ' ') out_.pop_back();
    if (!out_.empty() && out_.back() != '\n') out_ += '\n';
  }

  void space() {
    if (!out_.empty() && out_.back() != ' ' && out_.back() != '\n') out_ += ' ';
  }

  void show(const std::string& bytes) {
    std::string text = font_ ? font_->decode(bytes) : FontDecoder().decode(bytes);
    out_ += text;
  }

  const FontDecoder* font_for(const PdfObject* resources, const std::string& name) {
    if (!resources) return nullptr;
    const auto* fonts = doc_.get(*resources, "Font");
    if (!fonts) return nullptr;
    const auto* entry = fonts->get(name);
    if (!entry) return nullptr;
    const auto& font = doc_.resolve(*entry);
    auto key = &font;
    if (auto it = fonts_.find(key); it != fonts_.end()) return it->second.get();

    auto decoder = std::make_unique<FontDecoder>();
    if (const auto* subtype = font.get("Subtype"); subtype && subtype->is_name("Type0")) {
      decoder->code_bytes = 2;
      decoder->has_single_byte = false;
    }
    if (const auto* enc = doc_.get(font, "Encoding"); enc && enc->is(PdfObject::Type::dict)) {
      if (const auto* diffs = doc_.get(*enc, "Differences"); diffs && diffs->is(PdfObject::Type::array)) {
        int code = 0;
        for (const auto& d : diffs->items) {
          if (d.is(PdfObject::Type::number)) {
            code = static_cast<int>(d.number);
          } else if (d.is(PdfObject::Type::name)) {
            if (code >= 0 && code < 256) {
              std::string s;
              if (auto cp = glyph_to_unicode(d.text)) append_utf8(s, *cp);
              decoder->single_byte[code] = s;
            }
            ++code;
          }
        }
      }
    }
    if (const auto* tu = font.get("ToUnicode")) {
      if (auto cmap = doc_.stream_of(*tu)) parse_cmap(*cmap, *decoder);
    }
    auto* raw = decoder.get();
    fonts_[key] = std::move(decoder);
    return raw;
  }

  void run(std::string_view content, const PdfObject* resources, int depth) {
    if (depth > 8) return;
    Parser p(content);
    std::vector<PdfObject> operands;
    while (!p.at_end()) {
      PdfObject obj;
      try {
        obj = p.parse();
      } catch (const Error&) {
        return;
      }
      if (!obj.is(PdfObject::Type::op)) {
        operands.push_back(std::move(obj));
        continue;
      }
      const std::string& op = obj.text;
      auto num = [&](std::size_t from_end) {
        if (operands.size() < from_end) return 0.0;
        const auto& o = operands[operands.size() - from_end];
        return o.is(PdfObject::Type::number) ? o.number : 0.0;
      };

      if (op == "BT") {
        line_y_.reset();
      } else if (op == "Tf" && operands.size() >= 2) {
        font_ = font_for(resources, operands[operands.size() - 2].text);
      } else if (op == "Td" || op == "TD") {
        double tx = num(2), ty = num(1);
        if (std::abs(ty) > 0.01) {
          newline();
        } else if (std::abs(tx) > 0.01) {
          space();
        }
      } else if (op == "Tm") {
        double y = num(1);
        if (line_y_ && std::abs(*line_y_ - y) > 0.1) {
          newline();
        } else if (line_y_) {
          space();
        } else if (!out_.empty()) {
          newline();
        }
        line_y_ = y;
      } else if (op == "T*") {
        newline();
      } else if (op == "Tj" && !operands.empty()) {
        show(operands.back().text);
      } else if (op == "'" && !operands.empty()) {
        newline();
        show(operands.back().text);
      } else if (op == "\"" && !operands.empty()) {
        newline();
        show(operands.back().text);
      } else if (op == "TJ" && !operands.empty() && operands.back().is(PdfObject::Type::array)) {
        for (const auto& item : operands.back().items) {
          if (item.is(PdfObject::Type::string)) {
            show(item.text);
          } else if (item.is(PdfObject::Type::number) && item.number < -200) {
            space();
          }
        }
      } else if (op == "ET") {
        space();
      } else if (op == "Do" && !operands.empty() && resources) {
        run_xobject(resources, operands.back().text, depth);
      } else if (op == "ID") {
        skip_inline_image(p, content);
      }
      operands.clear();
    }
  }

  void run_xobject(const PdfObject* resources, const std::string& name, int depth) {
    const auto* xobjects = doc_.get(*resources, "XObject");
    if (!xobjects) return;
    const auto* ref = xobjects->get(name);
    if (!ref) return;
    const auto& xobj = doc_.resolve(*ref);
    const auto* subtype = xobj.get("Subtype");
    if (!subtype || !subtype->is_name("Form")) return;
    auto body = doc_.stream_of(*ref);
    if (!body) return;
    const auto* inner = doc_.get(xobj, "Resources");
    auto saved = font_;
    run(*body, inner ? inner : resources, depth + 1);
    font_ = saved;
  }

  static void skip_inline_image(Parser& p, std::string_view content) {
    std::size_t pos = p.pos() + 1;
    while (pos + 2 < content.size()) {
      if (content[pos] == 'E' && content[pos + 1] == 'I' && is_pdf_space(content[pos - 1]) &&
          (pos + 2 == content.size() || !is_regular(content[pos + 2]))) {
        p.seek(pos + 2);
        return;
      }
      ++pos;
    }
    p.seek(content.size());
  }

  const PdfDocument& doc_;
  std::string out_;
  const FontDecoder* font_ = nullptr;
  std::optional<double> line_y_;
  std::unordered_map<const PdfObject*, std::unique_ptr<FontDecoder>> fonts_;
};

std::string clean_page_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    auto c = static_cast<unsigned char>(raw[i]);
    if (c < 0x20 && c != '\n' && c != '\t') {
      ++i;
      continue;
    }
    out += raw[i++];
  }
  // Trailing spaces on each line.
  std::string trimmed;
  trimmed.reserve(out.size());
  for (char c : out) {
    if (c == '\n')
      while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t')) trimmed.pop_back();
    trimmed += c;
  }
  while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\n')) trimmed.pop_back();
  return trimmed;
}

}  // namespace

bool looks_like_pdf(std::string_view bytes) {
  auto head = bytes.substr(0, 1024);
  return head.find("%PDF-") != std::string_view::npos;
}

std::string extract_pdf_text(std::string_view pdf_bytes) {
  if (!looks_like_pdf(pdf_bytes)) fail("missing %PDF- header");
  PdfDocument doc(pdf_bytes);
  if (doc.encrypted()) fail("encrypted documents are not supported");

  auto pages = doc.pages();
  if (pages.empty()) fail("no pages found");
  TextCollector collector(doc);
  std::string text;
  bool any = false;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    auto page = clean_page_text(collector.page_text(*pages[i]));
    if (i > 0) text += '\n';
    text += page;
    any = any || !page.empty();
  }
  if (!any) fail("no extractable text layer (scanned documents need OCR, which is not supported)");
  return text;
}

}  // namespace litrev
