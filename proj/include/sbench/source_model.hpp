#pragma once

// Structural model of Java compilation units.
//
// The extractor is a tokenizer plus brace-depth tracking, not a Java parser.
// It recovers enough of each top-level class (constructors, fields, methods
// and their modifiers) to decide structural design-pattern predicates, and it
// never fails: arbitrary text, including prose and truncated code, yields a
// best-effort result.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbench {

enum class TokenKind { identifier, keyword, punctuation, literal };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset = 0;  // byte index into the source

  bool operator==(const Token&) const = default;
};

/// Splits Java source into tokens. Whitespace and comments are dropped;
/// string, text-block, char and numeric literals become single `literal`
/// tokens. Punctuation is always emitted one character per token.
std::vector<Token> tokenize(std::string_view source);

enum class MemberKind { constructor, field, method };

enum class Modifier : std::uint8_t {
  public_,
  private_,
  protected_,
  static_,
  final_,
  synchronized_,
  abstract_,
};

std::string_view to_string(MemberKind kind);
std::string_view to_string(Modifier modifier);

class ModifierSet {
 public:
  ModifierSet() = default;
  ModifierSet(std::initializer_list<Modifier> modifiers);

  bool has(Modifier m) const { return (bits_ & bit(m)) != 0; }
  bool has_all(std::initializer_list<Modifier> modifiers) const;
  void insert(Modifier m) { bits_ |= bit(m); }
  void erase(Modifier m) { bits_ &= static_cast<std::uint8_t>(~bit(m)); }
  bool has_visibility() const;
  bool empty() const { return bits_ == 0; }

  /// Modifiers in declaration order of the enum.
  std::vector<Modifier> to_vector() const;

  bool operator==(const ModifierSet&) const = default;

 private:
  static std::uint8_t bit(Modifier m) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(m)); }
  std::uint8_t bits_ = 0;
};

struct MemberModel {
  MemberKind member_kind = MemberKind::field;
  std::string name;
  /// Simple type name with generics and package qualifiers stripped. Array
  /// dimensions are kept as a "[]" suffix. Empty for constructors.
  std::string declared_type;
  ModifierSet modifiers;
  int nesting_depth = 1;

  bool operator==(const MemberModel&) const = default;
};

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ClassModel {
  std::string class_name;
  std::vector<MemberModel> members;  // direct members only, in source order
  bool is_top_level = true;
  SourceSpan source_span;

  bool operator==(const ClassModel&) const = default;
};

/// Extracts one ClassModel per top-level `class` declaration, in source order.
/// Interfaces, enums, records and annotation types are skipped. Recoverable
/// oddities and the first unrecoverable brace imbalance are reported through
/// `warnings` when it is non-null.
std::vector<ClassModel> parse_compilation_unit(std::string_view source,
                                               std::vector<std::string>* warnings = nullptr);

/// The class named `expected_name` if present, else the first top-level class.
std::optional<ClassModel> select_primary_class(std::span<const ClassModel> classes,
                                               std::optional<std::string_view> expected_name);

bool is_java_keyword(std::string_view word);

}  // namespace sbench
