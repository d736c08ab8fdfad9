#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vqfont/common.hpp"

namespace vqfont::structure {

// The 12 canonical spatial arrangements of CJK character components.
enum class StructureCategory {
  LeftRight,
  LeftCenterRight,
  TopBottom,
  TopCenterBottom,
  FullyEncompassed,
  TopThreeEncompassed,
  LeftThreeEncompassed,
  BottomThreeEncompassed,
  TopLeftEncompassed,
  TopRightEncompassed,
  BottomLeftEncompassed,
  Independent,
};

inline constexpr int kCategoryCount = 12;

const std::array<StructureCategory, kCategoryCount>& all_categories();
const char* category_name(StructureCategory category);
std::optional<StructureCategory> category_from_name(const std::string& name);

// Number of components the category decomposes into (1..3).
int category_component_count(StructureCategory category);

// Patch position on the latent grid, (row, col).
using PatchPos = std::pair<int, int>;

// Disjoint patch-position sets covering an h x w grid, one set per component.
// Ordering: split categories run left-to-right / top-to-bottom; encompassing
// categories list the enclosing component first, then the inner one.
struct ComponentLayout {
  Codepoint codepoint = 0;
  StructureCategory category = StructureCategory::Independent;
  int grid_h = 0;
  int grid_w = 0;
  std::vector<std::vector<PatchPos>> components;

  std::string to_json() const;
};

// Deterministic partition of an h x w grid. Two-way splits fall at 1/2,
// three-way splits at 1/3 and 2/3 (boundary = floor(fraction * extent),
// leftover patches join the last component); encompassing categories give the
// enclosing component a frame ceil(h/8) rows / ceil(w/8) cols thick.
// Throws GridTooSmall when any component would receive zero patches.
ComponentLayout decompose(Codepoint codepoint, StructureCategory category, int grid_h, int grid_w);

inline int component_count(const ComponentLayout& layout) {
  return static_cast<int>(layout.components.size());
}

// Axis-aligned box in unit coordinates, used to place component artwork so
// that image-space structure lines up with the latent-grid partition.
struct RectF {
  float x0, y0, x1, y1;
};

// One box list per component; enclosing components are unions of side bands.
std::vector<std::vector<RectF>> category_region_boxes(StructureCategory category);

struct StructureEntry {
  StructureCategory category = StructureCategory::Independent;
  std::vector<std::string> component_ids;  // one id per component, in layout order
};

// Character -> category (+ component ids) table. Text format, one record per
// line: `<codepoint hex> <category-name> [<component-id>...]`, '#' comments.
class StructureTable {
 public:
  static StructureTable load(const std::string& path);
  void save(const std::string& path) const;

  void add(Codepoint cp, StructureEntry entry);
  bool contains(Codepoint cp) const;
  const StructureEntry& entry(Codepoint cp) const;  // throws UnknownCharacter
  std::size_t size() const { return entries_.size(); }
  const std::map<Codepoint, StructureEntry>& entries() const { return entries_; }

 private:
  std::map<Codepoint, StructureEntry> entries_;
};

// Pure table lookup; throws UnknownCharacter when absent.
StructureCategory classify_structure(Codepoint cp, const StructureTable& table);

ComponentLayout layout_for(Codepoint cp, const StructureTable& table, int grid_h, int grid_w);

}  // namespace vqfont::structure
