#include "keyopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include "keyopt/error.hpp"

namespace keyopt {

namespace {

constexpr std::array<int, 3> kRowStarts = {0, 10, 19};

void require_letter(int index) {
  if (index < 0 || index >= kLetterCount) {
    throw Error("letter index out of range: " + std::to_string(index));
  }
}

}  // namespace

int letter_index(char c) {
  if (c < 'a' || c > 'z') {
    throw Error(std::string("not a lowercase letter: '") + c + "'");
  }
  return c - 'a';
}

char letter_char(int index) {
  require_letter(index);
  return static_cast<char>('a' + index);
}

// ---------------------------------------------------------------------------
// Slot

Slot Slot::letter(int row, int col) {
  if (row < 0 || row >= 3 || col < 0 || col >= kRowLengths[row]) {
    throw Error("no letter slot at row " + std::to_string(row) + ", column " +
                std::to_string(col));
  }
  return Slot(static_cast<std::uint8_t>(kRowStarts[row] + col));
}

Slot Slot::letter_slot(int index) {
  if (index < 0 || index >= kLetterCount) {
    throw Error("letter slot index out of range: " + std::to_string(index));
  }
  return Slot(static_cast<std::uint8_t>(index));
}

Slot Slot::space(int i) {
  if (i < 0 || i >= kSpaceSlotCount) {
    throw Error("space sub-key index out of range: " + std::to_string(i));
  }
  return Slot(static_cast<std::uint8_t>(kLetterCount + i));
}

Slot Slot::from_index(int index) {
  if (index < 0 || index >= kSlotCount) {
    throw Error("slot index out of range: " + std::to_string(index));
  }
  return Slot(static_cast<std::uint8_t>(index));
}

Slot Slot::parse(std::string_view id) {
  auto fail = [&]() -> Slot { throw Error("unknown slot id '" + std::string(id) + "'"); };
  if (id.size() == 3 && id.substr(0, 2) == "sp") {
    const char d = id[2];
    if (d < '1' || d > '4') return fail();
    return space(d - '1');
  }
  if (id.size() == 4 && id[0] == 'r' && id[2] == 'c') {
    const int row = id[1] - '0';
    const int col = id[3] - '0';
    if (row < 0 || row > 2 || col < 0 || col >= kRowLengths[row]) {
      return fail();
    }
    return letter(row, col);
  }
  return fail();
}

int Slot::row() const {
  if (is_space()) return 3;
  if (index_ < kRowStarts[1]) return 0;
  if (index_ < kRowStarts[2]) return 1;
  return 2;
}

int Slot::col() const {
  if (is_space()) return index_ - kLetterCount;
  return index_ - kRowStarts[row()];
}

std::string Slot::id() const {
  if (is_space()) return "sp" + std::to_string(index_ - kLetterCount + 1);
  return "r" + std::to_string(row()) + "c" + std::to_string(col());
}

// ---------------------------------------------------------------------------
// GeometrySpec

void GeometrySpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw Error(std::string("geometry: ") + name + " must be strictly positive");
    }
  };
  positive(key_width, "key_width");
  positive(key_height, "key_height");
  positive(h_gap, "h_gap");
  positive(v_gap, "v_gap");
  for (double v : row_x_offsets) {
    if (!std::isfinite(v)) throw Error("geometry: row_x_offsets must be finite");
  }
  for (std::size_t i = 0; i < space_subkey_columns.size(); ++i) {
    if (!std::isfinite(space_subkey_columns[i])) {
      throw Error("geometry: space_subkey_columns must be finite");
    }
    if (i > 0 && !(space_subkey_columns[i] > space_subkey_columns[i - 1])) {
      throw Error("geometry: space_subkey_columns must be strictly increasing");
    }
  }
}

GeometrySpec GeometrySpec::scaled(double factor) const {
  GeometrySpec out = *this;
  out.key_width *= factor;
  out.key_height *= factor;
  out.h_gap *= factor;
  out.v_gap *= factor;
  for (double& v : out.row_x_offsets) v *= factor;
  return out;
}

void to_json(nlohmann::json& j, const GeometrySpec& spec) {
  j = nlohmann::json{
      {"key_width", spec.key_width},
      {"key_height", spec.key_height},
      {"h_gap", spec.h_gap},
      {"v_gap", spec.v_gap},
      {"row_x_offsets", spec.row_x_offsets},
      {"space_subkey_columns", spec.space_subkey_columns},
  };
}

void from_json(const nlohmann::json& j, GeometrySpec& spec) {
  // Missing keys fall back to the built-in iPhone SE model.
  GeometrySpec out;
  try {
    out.key_width = j.value("key_width", out.key_width);
    out.key_height = j.value("key_height", out.key_height);
    out.h_gap = j.value("h_gap", out.h_gap);
    out.v_gap = j.value("v_gap", out.v_gap);
    if (j.contains("row_x_offsets")) {
      const auto& arr = j.at("row_x_offsets");
      if (!arr.is_array() || arr.size() != 4) {
        throw Error("geometry: row_x_offsets needs exactly 4 entries");
      }
      for (std::size_t i = 0; i < 4; ++i) out.row_x_offsets[i] = arr[i].get<double>();
    }
    if (j.contains("space_subkey_columns")) {
      const auto& arr = j.at("space_subkey_columns");
      if (!arr.is_array() || arr.size() != 4) {
        throw Error("geometry: space_subkey_columns needs exactly 4 entries");
      }
      for (std::size_t i = 0; i < 4; ++i) out.space_subkey_columns[i] = arr[i].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("geometry: ") + e.what());
  }
  out.validate();
  spec = out;
}

// ---------------------------------------------------------------------------
// KeyboardGeometry

KeyboardGeometry::KeyboardGeometry(const GeometrySpec& spec)
    : spec_(spec),
      column_pitch_(spec.key_width + spec.h_gap),
      row_pitch_(spec.key_height + spec.v_gap) {
  spec_.validate();
  for (int s = 0; s < kLetterCount; ++s) {
    const Slot slot = Slot::letter_slot(s);
    centers_[s] = {spec_.row_x_offsets[slot.row()] + slot.col() * column_pitch_,
                   slot.row() * row_pitch_};
  }
  for (int i = 0; i < kSpaceSlotCount; ++i) {
    centers_[kLetterCount + i] = {
        spec_.row_x_offsets[3] + spec_.space_subkey_columns[i] * column_pitch_,
        3 * row_pitch_};
  }
  for (int a = 0; a < kSlotCount; ++a) {
    for (int b = 0; b < kSlotCount; ++b) {
      distances_[a][b] = a == b ? 0.0
                                : std::hypot(centers_[a].x - centers_[b].x,
                                             centers_[a].y - centers_[b].y);
    }
  }
  for (int s = 0; s < kLetterCount; ++s) {
    int best = 0;
    for (int i = 1; i < kSpaceSlotCount; ++i) {
      if (distances_[s][kLetterCount + i] < distances_[s][kLetterCount + best]) best = i;
    }
    nearest_space_[s] = Slot::space(best);
  }
}

double KeyboardGeometry::width() const {
  return spec_.row_x_offsets[0] + (kRowLengths[0] - 1) * column_pitch_ + spec_.key_width;
}

double KeyboardGeometry::height() const { return 3 * row_pitch_ + spec_.key_height; }

double KeyboardGeometry::distance(std::string_view a, std::string_view b) const {
  return distance(Slot::parse(a), Slot::parse(b));
}

Slot KeyboardGeometry::nearest_space_slot(Slot from) const {
  if (!from.is_letter()) {
    throw Error("nearest_space_slot: '" + from.id() + "' is not a letter slot");
  }
  return nearest_space_[from.index()];
}

// ---------------------------------------------------------------------------
// Layout

Layout::Layout(const std::array<Slot, kLetterCount>& slots) : slots_(slots) {
  letters_.fill(-1);
  for (int letter = 0; letter < kLetterCount; ++letter) {
    const Slot s = slots_[letter];
    if (!s.is_letter()) {
      throw Error(std::string("layout: letter '") + letter_char(letter) +
                  "' mapped to non-letter slot " + s.id());
    }
    if (letters_[s.index()] != -1) {
      throw Error("layout: slot " + s.id() + " assigned twice");
    }
    letters_[s.index()] = static_cast<std::int8_t>(letter);
  }
}

int Layout::letter_at(Slot slot) const {
  if (!slot.is_letter()) throw Error("layout: " + slot.id() + " holds no letter");
  return letters_[slot.index()];
}

Layout qwerty_layout() {
  static constexpr std::string_view kRows = "qwertyuiopasdfghjklzxcvbnm";
  std::array<Slot, kLetterCount> slots;
  for (int s = 0; s < kLetterCount; ++s) {
    slots[letter_index(kRows[s])] = Slot::letter_slot(s);
  }
  return Layout(slots);
}

void to_json(nlohmann::json& j, const Layout& layout) {
  j = nlohmann::json::object();
  for (int letter = 0; letter < kLetterCount; ++letter) {
    j[std::string(1, letter_char(letter))] = layout.slot_of(letter).id();
  }
}

Layout layout_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != kLetterCount) {
    throw Error("layout: expected an object with 26 letter keys");
  }
  std::array<Slot, kLetterCount> slots;
  std::array<bool, kLetterCount> seen{};
  for (const auto& [key, value] : j.items()) {
    if (key.size() != 1 || !value.is_string()) {
      throw Error("layout: bad entry '" + key + "'");
    }
    const int letter = letter_index(key[0]);
    seen[letter] = true;
    slots[letter] = Slot::parse(value.get<std::string>());
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error("layout: missing letters");
  }
  return Layout(slots);
}

// ---------------------------------------------------------------------------
// SwapSet

namespace {

void check_pair_letters(const LetterPair& p) {
  require_letter(p.first);
  require_letter(p.second);
  if (p.first == p.second) {
    throw Error(std::string("swap pair repeats letter '") + letter_char(p.first) + "'");
  }
}

bool letters_disjoint(const std::vector<LetterPair>& pairs) {
  std::uint32_t used = 0;
  for (const auto& [a, b] : pairs) {
    const std::uint32_t bits = (1u << a) | (1u << b);
    if (used & bits) return false;
    used |= bits;
  }
  return true;
}

}  // namespace

SwapSet SwapSet::canonical(std::vector<LetterPair> pairs) {
  if (pairs.size() > 3) throw Error("swap set holds at most 3 pairs");
  for (auto& p : pairs) {
    check_pair_letters(p);
    if (p.first > p.second) std::swap(p.first, p.second);
  }
  if (!letters_disjoint(pairs)) throw Error("swap pairs must be disjoint");
  std::sort(pairs.begin(), pairs.end());
  return SwapSet(std::move(pairs));
}

SwapSet SwapSet::canonical(std::initializer_list<std::pair<char, char>> pairs) {
  std::vector<LetterPair> out;
  for (const auto& [a, b] : pairs) {
    out.emplace_back(static_cast<std::int8_t>(letter_index(a)),
                     static_cast<std::int8_t>(letter_index(b)));
  }
  return canonical(std::move(out));
}

SwapSet SwapSet::raw(std::vector<LetterPair> pairs) {
  for (const auto& p : pairs) check_pair_letters(p);
  return SwapSet(std::move(pairs));
}

SwapSet SwapSet::parse(std::string_view text) {
  std::vector<LetterPair> pairs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(pos, end - pos);
    if (item.size() != 2) throw Error("swap pair must be two letters: '" + std::string(item) + "'");
    pairs.emplace_back(static_cast<std::int8_t>(letter_index(item[0])),
                       static_cast<std::int8_t>(letter_index(item[1])));
    pos = end + 1;
  }
  return canonical(std::move(pairs));
}

bool SwapSet::is_disjoint() const { return letters_disjoint(pairs_); }

bool SwapSet::is_canonical() const {
  if (!is_disjoint()) return false;
  for (const auto& [a, b] : pairs_) {
    if (a >= b) return false;
  }
  return std::is_sorted(pairs_.begin(), pairs_.end());
}

std::string SwapSet::notation() const {
  std::string lhs;
  std::string rhs;
  for (const auto& [a, b] : pairs_) {
    lhs += letter_char(a);
    rhs += letter_char(b);
  }
  return lhs + "->" + rhs;
}

void to_json(nlohmann::json& j, const SwapSet& s) {
  j = nlohmann::json::array();
  for (const auto& [a, b] : s.pairs()) {
    j.push_back({std::string(1, letter_char(a)), std::string(1, letter_char(b))});
  }
}

SwapSet swapset_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("swaps: expected an array of letter pairs");
  std::vector<LetterPair> pairs;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_string()) {
      throw Error("swaps: each entry must be a pair of one-letter strings");
    }
    const auto a = item[0].get<std::string>();
    const auto b = item[1].get<std::string>();
    if (a.size() != 1 || b.size() != 1) throw Error("swaps: entries must be single letters");
    pairs.emplace_back(static_cast<std::int8_t>(letter_index(a[0])),
                       static_cast<std::int8_t>(letter_index(b[0])));
  }
  return SwapSet::raw(std::move(pairs));
}

Layout apply_swaps(const Layout& base, const SwapSet& swaps) {
  if (!swaps.is_disjoint()) throw Error("apply_swaps: swap pairs overlap");
  auto slots = base.slots();
  for (const auto& [a, b] : swaps.pairs()) std::swap(slots[a], slots[b]);
  return Layout(slots);
}

}  // namespace keyopt
