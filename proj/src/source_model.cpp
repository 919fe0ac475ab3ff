#include "sbench/source_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

namespace sbench {
namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",     "boolean",   "break",      "byte",     "case",      "catch",
    "char",     "class",      "const",     "continue",   "default",  "do",        "double",
    "else",     "enum",       "extends",   "final",      "finally",  "float",     "for",
    "goto",     "if",         "implements", "import",    "instanceof", "int",     "interface",
    "long",     "native",     "new",       "package",    "private",  "protected", "public",
    "return",   "short",      "static",    "strictfp",   "super",    "switch",    "synchronized",
    "this",     "throw",      "throws",    "transient",  "try",      "void",      "volatile",
    "while",    "true",       "false",     "null",
};

constexpr std::array<std::string_view, 8> kPrimitiveTypes = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

// Index one past the end of a quoted literal starting at `begin`. Unterminated
// literals end at the newline so a stray apostrophe in prose cannot swallow
// the rest of the file.
std::size_t scan_quoted(std::string_view s, std::size_t begin, char quote) {
  std::size_t j = begin + 1;
  while (j < s.size() && s[j] != quote && s[j] != '\n') {
    j += (s[j] == '\\') ? 2 : 1;
  }
  if (j < s.size() && s[j] == quote) ++j;
  return std::min(j, s.size());
}

std::size_t scan_text_block(std::string_view s, std::size_t begin) {
  std::size_t j = begin + 3;
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (s.compare(j, 3, R"(""")") == 0) return j + 3;
    ++j;
  }
  return s.size();
}

std::size_t scan_number(std::string_view s, std::size_t begin) {
  std::size_t j = begin;
  while (j < s.size()) {
    const auto c = static_cast<unsigned char>(s[j]);
    if (std::isalnum(c) || c == '_' || c == '.') {
      ++j;
    } else if ((c == '+' || c == '-') && j > begin &&
               (s[j - 1] == 'e' || s[j - 1] == 'E' || s[j - 1] == 'p' || s[j - 1] == 'P')) {
      ++j;
    } else {
      break;
    }
  }
  return j;
}

std::optional<Modifier> member_modifier(std::string_view word) {
  if (word == "public") return Modifier::public_;
  if (word == "private") return Modifier::private_;
  if (word == "protected") return Modifier::protected_;
  if (word == "static") return Modifier::static_;
  if (word == "final") return Modifier::final_;
  if (word == "synchronized") return Modifier::synchronized_;
  if (word == "abstract") return Modifier::abstract_;
  return std::nullopt;
}

bool is_visibility(Modifier m) {
  return m == Modifier::public_ || m == Modifier::private_ || m == Modifier::protected_;
}

class UnitParser {
 public:
  UnitParser(const std::vector<Token>& tokens, std::size_t source_size,
             std::vector<std::string>* warnings)
      : t_(tokens), source_size_(source_size), warnings_(warnings) {}

  std::vector<ClassModel> run() {
    std::vector<ClassModel> classes;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t decl_start = kNone;
    while (pos_ < t_.size() && !truncated_) {
      if (punct(pos_, '{')) {
        pos_ = skip_group(pos_);
        decl_start = kNone;
      } else if (punct(pos_, '}')) {
        warn("unmatched '}' at offset " + std::to_string(t_[pos_].offset));
        ++pos_;
        decl_start = kNone;
      } else if (punct(pos_, '@') && !keyword(pos_ + 1, "interface")) {
        if (decl_start == kNone) decl_start = pos_;
        skip_annotation();
      } else if (is_type_modifier(pos_)) {
        if (decl_start == kNone) decl_start = pos_;
        ++pos_;
      } else if (starts_class(pos_)) {
        if (auto cls = parse_class(decl_start == kNone ? pos_ : decl_start)) {
          classes.push_back(std::move(*cls));
        }
        decl_start = kNone;
      } else if (starts_other_type(pos_)) {
        skip_type_declaration();
        decl_start = kNone;
      } else {
        ++pos_;
        decl_start = kNone;
      }
    }
    return classes;
  }

 private:
  std::size_t size() const { return t_.size(); }

  bool punct(std::size_t i, char c) const {
    return i < size() && t_[i].kind == TokenKind::punctuation && t_[i].text[0] == c;
  }
  bool keyword(std::size_t i, std::string_view w) const {
    return i < size() && t_[i].kind == TokenKind::keyword && t_[i].text == w;
  }
  bool ident(std::size_t i) const { return i < size() && t_[i].kind == TokenKind::identifier; }
  bool ident_is(std::size_t i, std::string_view w) const { return ident(i) && t_[i].text == w; }

  void warn(std::string message) {
    if (warnings_ != nullptr) warnings_->push_back(std::move(message));
  }

  bool is_type_modifier(std::size_t i) const {
    return keyword(i, "public") || keyword(i, "final") || keyword(i, "abstract") ||
           keyword(i, "static") || keyword(i, "strictfp") || keyword(i, "private") ||
           keyword(i, "protected") || ident_is(i, "sealed");
  }

  bool type_header_follows(std::size_t i) const {
    return punct(i, '{') || keyword(i, "extends") || keyword(i, "implements") || punct(i, '<') ||
           ident_is(i, "permits");
  }

  bool starts_class(std::size_t i) const {
    if (!keyword(i, "class") || (i > 0 && punct(i - 1, '.'))) return false;
    return ident(i + 1) && type_header_follows(i + 2);
  }

  bool starts_other_type(std::size_t i) const {
    if (keyword(i, "interface")) return ident(i + 1) && type_header_follows(i + 2);
    if (keyword(i, "enum")) return ident(i + 1) && (punct(i + 2, '{') || keyword(i + 2, "implements"));
    if (ident_is(i, "record")) return ident(i + 1) && (punct(i + 2, '(') || punct(i + 2, '<'));
    if (punct(i, '@')) return keyword(i + 1, "interface") && ident(i + 2);
    return false;
  }

  // Index one past the bracket matching the opener at `i`. Only brackets of the
  // same kind are counted. Reaching the end marks the unit as truncated.
  std::size_t skip_group(std::size_t i) {
    const char open = t_[i].text[0];
    const char close = open == '{' ? '}' : open == '(' ? ')' : ']';
    int depth = 0;
    for (std::size_t j = i; j < size(); ++j) {
      if (punct(j, open)) {
        ++depth;
      } else if (punct(j, close) && --depth == 0) {
        return j + 1;
      }
    }
    truncated_ = true;
    return size();
  }

  // Generic argument or parameter list. Returns false, leaving pos_ unchanged,
  // when the bracketed run contains something that cannot appear in a type.
  bool skip_angles() {
    int depth = 0;
    for (std::size_t j = pos_; j < size(); ++j) {
      const Token& tk = t_[j];
      if (punct(j, '<')) {
        ++depth;
      } else if (punct(j, '>')) {
        if (--depth == 0) {
          pos_ = j + 1;
          return true;
        }
      } else if (tk.kind == TokenKind::identifier || keyword(j, "extends") || keyword(j, "super") ||
                 is_primitive(j) || punct(j, ',') || punct(j, '.') || punct(j, '?') ||
                 punct(j, '&') || punct(j, '[') || punct(j, ']') || punct(j, '@')) {
        continue;
      } else {
        return false;
      }
    }
    return false;
  }

  bool is_primitive(std::size_t i) const {
    if (i >= size() || t_[i].kind != TokenKind::keyword) return false;
    return std::find(kPrimitiveTypes.begin(), kPrimitiveTypes.end(), t_[i].text) != kPrimitiveTypes.end();
  }

  void skip_annotation() {
    ++pos_;  // '@'
    if (ident(pos_)) {
      ++pos_;
      while (punct(pos_, '.') && ident(pos_ + 1)) pos_ += 2;
    }
    if (punct(pos_, '(')) pos_ = skip_group(pos_);
  }

  // Skips a type declaration header and body. Stops after ';' when no body follows.
  void skip_type_declaration() {
    while (pos_ < size()) {
      if (punct(pos_, '{')) {
        pos_ = skip_group(pos_);
        return;
      }
      if (punct(pos_, ';')) {
        ++pos_;
        return;
      }
      if (punct(pos_, '}')) return;
      ++pos_;
    }
  }

  std::optional<ClassModel> parse_class(std::size_t decl_start) {
    ClassModel cls;
    cls.class_name = t_[pos_ + 1].text;
    cls.source_span.begin = t_[decl_start].offset;
    std::size_t i = pos_ + 2;
    while (i < size() && !punct(i, '{') && !punct(i, ';')) ++i;
    if (!punct(i, '{')) {
      pos_ = i;
      return std::nullopt;
    }
    pos_ = i + 1;
    while (true) {
      if (pos_ >= size()) {
        truncated_ = true;
        break;
      }
      if (punct(pos_, '}')) break;
      parse_member(cls);
      if (truncated_) break;
    }
    if (truncated_) {
      warn("unbalanced braces: class " + cls.class_name + " is not closed; remaining text ignored");
      cls.source_span.end = source_size_;
    } else {
      cls.source_span.end = t_[pos_].offset + 1;
      ++pos_;
    }
    return cls;
  }

  bool starts_nested_type(std::size_t i) const {
    return (keyword(i, "class") && ident(i + 1)) || (keyword(i, "interface") && ident(i + 1)) ||
           (keyword(i, "enum") && ident(i + 1)) ||
           (ident_is(i, "record") && ident(i + 1) && (punct(i + 2, '(') || punct(i + 2, '<'))) ||
           (punct(i, '@') && keyword(i + 1, "interface"));
  }

  void parse_member(ClassModel& cls) {
    ModifierSet mods;
    while (pos_ < size()) {
      if (punct(pos_, '@') && !keyword(pos_ + 1, "interface")) {
        skip_annotation();
        continue;
      }
      if (pos_ < size() && t_[pos_].kind == TokenKind::keyword) {
        if (auto m = member_modifier(t_[pos_].text)) {
          if (is_visibility(*m) && mods.has_visibility()) {
            warn("conflicting visibility modifier '" + t_[pos_].text + "' at offset " +
                 std::to_string(t_[pos_].offset) + " ignored");
          } else {
            mods.insert(*m);
          }
          ++pos_;
          continue;
        }
        const auto& w = t_[pos_].text;
        if (w == "transient" || w == "volatile" || w == "native" || w == "strictfp" || w == "default") {
          ++pos_;
          continue;
        }
      }
      if (ident_is(pos_, "sealed")) {
        ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= size()) {
      truncated_ = true;
      return;
    }
    if (punct(pos_, '}')) return;
    if (punct(pos_, ';')) {
      ++pos_;
      return;
    }
    if (punct(pos_, '{')) {
      pos_ = skip_group(pos_);
      return;
    }
    if (starts_nested_type(pos_)) {
      skip_type_declaration();
      return;
    }
    if (punct(pos_, '<') && !skip_angles()) {
      recover();
      return;
    }
    if (ident_is(pos_, cls.class_name) && punct(pos_ + 1, '(')) {
      MemberModel ctor{MemberKind::constructor, cls.class_name, "", mods, 1};
      pos_ = skip_group(pos_ + 1);
      finish_callable();
      cls.members.push_back(std::move(ctor));
      return;
    }
    std::string type;
    if (!parse_type(type) || !ident(pos_)) {
      recover();
      return;
    }
    std::string name = t_[pos_].text;
    ++pos_;
    if (punct(pos_, '(')) {
      pos_ = skip_group(pos_);
      finish_callable();
      cls.members.push_back(MemberModel{MemberKind::method, std::move(name), std::move(type), mods, 1});
      return;
    }
    parse_declarators(cls, type, std::move(name), mods);
  }

  bool parse_type(std::string& out) {
    if (is_primitive(pos_) || keyword(pos_, "void")) {
      out = t_[pos_].text;
      ++pos_;
    } else if (ident(pos_)) {
      out = t_[pos_].text;
      ++pos_;
      while (true) {
        if (punct(pos_, '<')) {
          if (!skip_angles()) return false;
          continue;
        }
        if (punct(pos_, '.') && ident(pos_ + 1)) {
          out = t_[pos_ + 1].text;
          pos_ += 2;
          continue;
        }
        break;
      }
    } else {
      return false;
    }
    while (punct(pos_, '[') && punct(pos_ + 1, ']')) {
      out += "[]";
      pos_ += 2;
    }
    return true;
  }

  // After a parameter list: throws clause, then a body or ';'.
  void finish_callable() {
    while (pos_ < size()) {
      if (punct(pos_, '{')) {
        pos_ = skip_group(pos_);
        return;
      }
      if (punct(pos_, ';')) {
        ++pos_;
        return;
      }
      if (punct(pos_, '}')) return;
      ++pos_;
    }
    truncated_ = true;
  }

  void parse_declarators(ClassModel& cls, const std::string& type, std::string name, ModifierSet mods) {
    while (true) {
      std::string field_type = type;
      while (punct(pos_, '[') && punct(pos_ + 1, ']')) {
        field_type += "[]";
        pos_ += 2;
      }
      cls.members.push_back(MemberModel{MemberKind::field, std::move(name), std::move(field_type), mods, 1});
      if (punct(pos_, '=')) {
        ++pos_;
        skip_initializer();
      }
      if (punct(pos_, ',') && ident(pos_ + 1)) {
        name = t_[pos_ + 1].text;
        pos_ += 2;
        continue;
      }
      if (punct(pos_, ';')) {
        ++pos_;
        return;
      }
      if (pos_ >= size()) {
        truncated_ = true;
        return;
      }
      if (punct(pos_, '}')) return;
      recover();
      return;
    }
  }

  // Leaves pos_ at the ';' or declarator ',' ending the initializer, or at the
  // enclosing '}' when the declaration is unterminated.
  void skip_initializer() {
    int depth = 0;
    while (pos_ < size()) {
      if (punct(pos_, '(') || punct(pos_, '[') || punct(pos_, '{')) {
        ++depth;
      } else if (punct(pos_, ')') || punct(pos_, ']') || punct(pos_, '}')) {
        if (depth == 0) return;
        --depth;
      } else if (depth == 0 && punct(pos_, ';')) {
        return;
      } else if (depth == 0 && punct(pos_, ',') && ident(pos_ + 1) &&
                 (punct(pos_ + 2, '=') || punct(pos_ + 2, ',') || punct(pos_ + 2, ';') ||
                  punct(pos_ + 2, '['))) {
        return;
      }
      ++pos_;
    }
    truncated_ = true;
  }

  void recover() {
    while (pos_ < size()) {
      if (punct(pos_, ';')) {
        ++pos_;
        return;
      }
      if (punct(pos_, '{')) {
        pos_ = skip_group(pos_);
        return;
      }
      if (punct(pos_, '}')) return;
      ++pos_;
    }
    truncated_ = true;
  }

  const std::vector<Token>& t_;
  std::size_t source_size_;
  std::vector<std::string>* warnings_;
  std::size_t pos_ = 0;
  bool truncated_ = false;
};

}  // namespace

bool is_java_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      const auto nl = s.find('\n', i);
      i = nl == std::string_view::npos ? s.size() : nl + 1;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const auto close = s.find("*/", i + 2);
      i = close == std::string_view::npos ? s.size() : close + 2;
    } else if (c == '"') {
      const auto end = s.compare(i, 3, R"(""")") == 0 ? scan_text_block(s, i) : scan_quoted(s, i, '"');
      out.push_back({TokenKind::literal, std::string(s.substr(i, end - i)), i});
      i = end;
    } else if (c == '\'') {
      const auto end = scan_quoted(s, i, '\'');
      out.push_back({TokenKind::literal, std::string(s.substr(i, end - i)), i});
      i = end;
    } else if (std::isdigit(c) ||
               (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const auto end = scan_number(s, i);
      out.push_back({TokenKind::literal, std::string(s.substr(i, end - i)), i});
      i = end;
    } else if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && ident_part(static_cast<unsigned char>(s[j]))) ++j;
      std::string word(s.substr(i, j - i));
      const auto kind = is_java_keyword(word) ? TokenKind::keyword : TokenKind::identifier;
      out.push_back({kind, std::move(word), i});
      i = j;
    } else {
      out.push_back({TokenKind::punctuation, std::string(1, static_cast<char>(c)), i});
      ++i;
    }
  }
  return out;
}

std::vector<ClassModel> parse_compilation_unit(std::string_view source, std::vector<std::string>* warnings) {
  const auto tokens = tokenize(source);
  return UnitParser(tokens, source.size(), warnings).run();
}

std::optional<ClassModel> select_primary_class(std::span<const ClassModel> classes,
                                               std::optional<std::string_view> expected_name) {
  if (expected_name) {
    const auto it = std::find_if(classes.begin(), classes.end(),
                                 [&](const ClassModel& c) { return c.class_name == *expected_name; });
    if (it != classes.end()) return *it;
  }
  if (!classes.empty()) return classes.front();
  return std::nullopt;
}

std::string_view to_string(MemberKind kind) {
  switch (kind) {
    case MemberKind::constructor: return "constructor";
    case MemberKind::field: return "field";
    case MemberKind::method: return "method";
  }
  return "unknown";
}

std::string_view to_string(Modifier modifier) {
  switch (modifier) {
    case Modifier::public_: return "public";
    case Modifier::private_: return "private";
    case Modifier::protected_: return "protected";
    case Modifier::static_: return "static";
    case Modifier::final_: return "final";
    case Modifier::synchronized_: return "synchronized";
    case Modifier::abstract_: return "abstract";
  }
  return "unknown";
}

ModifierSet::ModifierSet(std::initializer_list<Modifier> modifiers) {
  for (auto m : modifiers) insert(m);
}

bool ModifierSet::has_all(std::initializer_list<Modifier> modifiers) const {
  return std::all_of(modifiers.begin(), modifiers.end(), [this](Modifier m) { return has(m); });
}

bool ModifierSet::has_visibility() const {
  return has(Modifier::public_) || has(Modifier::private_) || has(Modifier::protected_);
}

std::vector<Modifier> ModifierSet::to_vector() const {
  std::vector<Modifier> out;
  for (unsigned i = 0; i <= static_cast<unsigned>(Modifier::abstract_); ++i) {
    const auto m = static_cast<Modifier>(i);
    if (has(m)) out.push_back(m);
  }
  return out;
}

}  // namespace sbench
