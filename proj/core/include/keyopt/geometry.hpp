#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace keyopt {

inline constexpr int kLetterCount = 26;
inline constexpr int kSpaceSlotCount = 4;
inline constexpr int kSlotCount = kLetterCount + kSpaceSlotCount;
inline constexpr std::array<int, 3> kRowLengths = {10, 9, 7};

/// Letters are carried as indices 0..25 ('a'..'z').
int letter_index(char c);
char letter_char(int index);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One key position on the keyboard. Letter slots are numbered row-major
/// (r0c0..r0c9, r1c0..r1c8, r2c0..r2c6 -> 0..25); the four spacebar
/// sub-keys sp1..sp4 follow as 26..29.
class Slot {
 public:
  constexpr Slot() = default;

  static Slot letter(int row, int col);
  static Slot letter_slot(int index);
  /// `i` is zero-based: space(0) is sp1.
  static Slot space(int i);
  static Slot from_index(int index);
  /// Accepts "r<row>c<col>" or "sp<1-4>"; throws keyopt::Error otherwise.
  static Slot parse(std::string_view id);

  constexpr int index() const { return index_; }
  constexpr bool is_letter() const { return index_ < kLetterCount; }
  constexpr bool is_space() const { return !is_letter(); }
  int row() const;
  int col() const;
  std::string id() const;

  auto operator<=>(const Slot&) const = default;

 private:
  explicit constexpr Slot(std::uint8_t index) : index_(index) {}
  std::uint8_t index_ = 0;
};

/// Physical key dimensions in millimetres.
struct GeometrySpec {
  double key_width = 4.76;
  double key_height = 6.26;
  double h_gap = 1.01;
  double v_gap = 1.70;
  /// Horizontal offset of each row's first key centre relative to Q, for
  /// the top, home, bottom and spacebar rows.
  std::array<double, 4> row_x_offsets = {0.0, 2.885, 8.655, 8.655};
  /// Sub-key centre columns, in bottom-row pitch units from the row offset.
  std::array<double, 4> space_subkey_columns = {2.0, 3.0, 4.0, 5.0};

  /// Throws keyopt::Error naming the first violated invariant.
  void validate() const;
  /// Multiplies every length by `factor`; column indices are unitless.
  GeometrySpec scaled(double factor) const;
};

void to_json(nlohmann::json& j, const GeometrySpec& spec);
void from_json(const nlohmann::json& j, GeometrySpec& spec);

/// Immutable slot-centre table. Origin at the Q key centre, +x right, +y down.
class KeyboardGeometry {
 public:
  explicit KeyboardGeometry(const GeometrySpec& spec = GeometrySpec{});

  const GeometrySpec& spec() const { return spec_; }
  double column_pitch() const { return column_pitch_; }
  double row_pitch() const { return row_pitch_; }
  /// Left edge of Q to right edge of P.
  double width() const;
  /// Top edge of the letter rows to the bottom edge of the spacebar.
  double height() const;

  Point center(Slot s) const { return centers_[s.index()]; }
  double distance(Slot a, Slot b) const { return distances_[a.index()][b.index()]; }
  double distance(std::string_view a, std::string_view b) const;
  /// Ties go to the lowest sub-key index.
  Slot nearest_space_slot(Slot from) const;

 private:
  GeometrySpec spec_;
  double column_pitch_;
  double row_pitch_;
  std::array<Point, kSlotCount> centers_{};
  std::array<std::array<double, kSlotCount>, kSlotCount> distances_{};
  std::array<Slot, kLetterCount> nearest_space_{};
};

/// Bijection from the 26 letters onto the 26 letter slots.
class Layout {
 public:
  /// Throws unless `slots` is a bijection onto the letter slots.
  explicit Layout(const std::array<Slot, kLetterCount>& slots);

  Slot slot_of(int letter) const { return slots_[letter]; }
  Slot slot_of(char letter) const { return slots_[letter_index(letter)]; }
  /// Inverse lookup; `slot` must be a letter slot.
  int letter_at(Slot slot) const;
  const std::array<Slot, kLetterCount>& slots() const { return slots_; }

  bool operator==(const Layout&) const = default;

 private:
  std::array<Slot, kLetterCount> slots_;
  std::array<std::int8_t, kLetterCount> letters_{};
};

Layout qwerty_layout();

void to_json(nlohmann::json& j, const Layout& layout);
Layout layout_from_json(const nlohmann::json& j);

using LetterPair = std::pair<std::int8_t, std::int8_t>;

/// Up to three letter transpositions. Canonical form sorts each pair and
/// orders pairs by their first letter; comparison is lexicographic over
/// the pair list, so a shorter prefix sorts first.
class SwapSet {
 public:
  SwapSet() = default;

  /// Validates letters and disjointness, then canonicalises.
  static SwapSet canonical(std::vector<LetterPair> pairs);
  static SwapSet canonical(std::initializer_list<std::pair<char, char>> pairs);
  /// Keeps the given encoding verbatim (used when decoding stored results).
  static SwapSet raw(std::vector<LetterPair> pairs);
  /// Parses "ej,ov,ab" style text.
  static SwapSet parse(std::string_view text);

  const std::vector<LetterPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool is_disjoint() const;
  bool is_canonical() const;
  /// "eoa->jvb" style, first letters then their partners.
  std::string notation() const;

  auto operator<=>(const SwapSet&) const = default;

 private:
  explicit SwapSet(std::vector<LetterPair> pairs) : pairs_(std::move(pairs)) {}
  std::vector<LetterPair> pairs_;
};

void to_json(nlohmann::json& j, const SwapSet& s);
SwapSet swapset_from_json(const nlohmann::json& j);

/// Exchanges the slots of each pair. Throws for overlapping pairs.
Layout apply_swaps(const Layout& base, const SwapSet& swaps);

}  // namespace keyopt
