#include "vqfont/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vqfont::structure {

namespace {

struct CategoryInfo {
  StructureCategory category;
  const char* name;
  int components;
};

constexpr std::array<CategoryInfo, kCategoryCount> kCategories = {{
    {StructureCategory::LeftRight, "left-right", 2},
    {StructureCategory::LeftCenterRight, "left-center-right", 3},
    {StructureCategory::TopBottom, "top-bottom", 2},
    {StructureCategory::TopCenterBottom, "top-center-bottom", 3},
    {StructureCategory::FullyEncompassed, "fully-encompassed", 2},
    {StructureCategory::TopThreeEncompassed, "top-three-encompassed", 2},
    {StructureCategory::LeftThreeEncompassed, "left-three-encompassed", 2},
    {StructureCategory::BottomThreeEncompassed, "bottom-three-encompassed", 2},
    {StructureCategory::TopLeftEncompassed, "top-left-encompassed", 2},
    {StructureCategory::TopRightEncompassed, "top-right-encompassed", 2},
    {StructureCategory::BottomLeftEncompassed, "bottom-left-encompassed", 2},
    {StructureCategory::Independent, "independent", 1},
}};

const CategoryInfo& info(StructureCategory category) {
  for (const auto& ci : kCategories)
    if (ci.category == category) return ci;
  fail(ErrorCode::ConfigError, "invalid structure category");
}

// Which sides the enclosing component occupies.
struct Frame {
  bool top = false, bottom = false, left = false, right = false;
};

std::optional<Frame> enclosing_frame(StructureCategory category) {
  switch (category) {
    case StructureCategory::FullyEncompassed: return Frame{true, true, true, true};
    case StructureCategory::TopThreeEncompassed: return Frame{true, false, true, true};
    case StructureCategory::LeftThreeEncompassed: return Frame{true, true, true, false};
    case StructureCategory::BottomThreeEncompassed: return Frame{false, true, true, true};
    case StructureCategory::TopLeftEncompassed: return Frame{true, false, true, false};
    case StructureCategory::TopRightEncompassed: return Frame{true, false, false, true};
    case StructureCategory::BottomLeftEncompassed: return Frame{false, true, true, false};
    default: return std::nullopt;
  }
}

// Component index for a patch position; mirrors category_region_boxes.
int component_of(StructureCategory category, int r, int c, int h, int w) {
  const int tr = (h + 7) / 8;
  const int tc = (w + 7) / 8;
  switch (category) {
    case StructureCategory::LeftRight:
      return c < w / 2 ? 0 : 1;
    case StructureCategory::LeftCenterRight: {
      if (c < w / 3) return 0;
      return c < 2 * w / 3 ? 1 : 2;
    }
    case StructureCategory::TopBottom:
      return r < h / 2 ? 0 : 1;
    case StructureCategory::TopCenterBottom: {
      if (r < h / 3) return 0;
      return r < 2 * h / 3 ? 1 : 2;
    }
    case StructureCategory::Independent:
      return 0;
    default: {
      const Frame f = *enclosing_frame(category);
      const bool in_frame = (f.top && r < tr) || (f.bottom && r >= h - tr) ||
                            (f.left && c < tc) || (f.right && c >= w - tc);
      return in_frame ? 0 : 1;
    }
  }
}

}  // namespace

const std::array<StructureCategory, kCategoryCount>& all_categories() {
  static const std::array<StructureCategory, kCategoryCount> cats = [] {
    std::array<StructureCategory, kCategoryCount> out{};
    for (int i = 0; i < kCategoryCount; ++i) out[i] = kCategories[i].category;
    return out;
  }();
  return cats;
}

const char* category_name(StructureCategory category) { return info(category).name; }

std::optional<StructureCategory> category_from_name(const std::string& name) {
  for (const auto& ci : kCategories)
    if (name == ci.name) return ci.category;
  return std::nullopt;
}

int category_component_count(StructureCategory category) { return info(category).components; }

ComponentLayout decompose(Codepoint codepoint, StructureCategory category, int grid_h, int grid_w) {
  require(grid_h >= 2 && grid_w >= 2, ErrorCode::GridTooSmall,
          "grid must be at least 2x2, got " + std::to_string(grid_h) + "x" + std::to_string(grid_w));

  ComponentLayout layout;
  layout.codepoint = codepoint;
  layout.category = category;
  layout.grid_h = grid_h;
  layout.grid_w = grid_w;
  layout.components.resize(category_component_count(category));

  for (int r = 0; r < grid_h; ++r)
    for (int c = 0; c < grid_w; ++c)
      layout.components[component_of(category, r, c, grid_h, grid_w)].emplace_back(r, c);

  for (std::size_t i = 0; i < layout.components.size(); ++i)
    require(!layout.components[i].empty(), ErrorCode::GridTooSmall,
            std::string("component ") + std::to_string(i) + " of " + category_name(category) +
                " is empty on a " + std::to_string(grid_h) + "x" + std::to_string(grid_w) + " grid");
  return layout;
}

std::string ComponentLayout::to_json() const {
  std::ostringstream os;
  os << "{\"codepoint\":\"" << codepoint_to_hex(codepoint) << "\",\"category\":\""
     << category_name(category) << "\",\"grid\":[" << grid_h << "," << grid_w
     << "],\"components\":[";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) os << ",";
    os << "[";
    for (std::size_t j = 0; j < components[i].size(); ++j) {
      if (j) os << ",";
      os << "[" << components[i][j].first << "," << components[i][j].second << "]";
    }
    os << "]";
  }
  os << "]}";
  return os.str();
}

std::vector<std::vector<RectF>> category_region_boxes(StructureCategory category) {
  constexpr float t = 0.125f;  // matches ceil(h/8)/h on the reference 16x16 grid
  switch (category) {
    case StructureCategory::LeftRight:
      return {{{0.f, 0.f, 0.5f, 1.f}}, {{0.5f, 0.f, 1.f, 1.f}}};
    case StructureCategory::LeftCenterRight:
      return {{{0.f, 0.f, 1.f / 3.f, 1.f}},
              {{1.f / 3.f, 0.f, 2.f / 3.f, 1.f}},
              {{2.f / 3.f, 0.f, 1.f, 1.f}}};
    case StructureCategory::TopBottom:
      return {{{0.f, 0.f, 1.f, 0.5f}}, {{0.f, 0.5f, 1.f, 1.f}}};
    case StructureCategory::TopCenterBottom:
      return {{{0.f, 0.f, 1.f, 1.f / 3.f}},
              {{0.f, 1.f / 3.f, 1.f, 2.f / 3.f}},
              {{0.f, 2.f / 3.f, 1.f, 1.f}}};
    case StructureCategory::Independent:
      return {{{0.f, 0.f, 1.f, 1.f}}};
    default: {
      const Frame f = *enclosing_frame(category);
      std::vector<RectF> bands;
      if (f.top) bands.push_back({0.f, 0.f, 1.f, t});
      if (f.bottom) bands.push_back({0.f, 1.f - t, 1.f, 1.f});
      const float y0 = f.top ? t : 0.f;
      const float y1 = f.bottom ? 1.f - t : 1.f;
      if (f.left) bands.push_back({0.f, y0, t, y1});
      if (f.right) bands.push_back({1.f - t, y0, 1.f, y1});
      const RectF inner{f.left ? t : 0.f, y0, f.right ? 1.f - t : 1.f, y1};
      return {bands, {inner}};
    }
  }
}

StructureTable StructureTable::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open structure table " + path);
  StructureTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string cp_hex, cat_name;
    if (!(ss >> cp_hex >> cat_name)) continue;  // blank line
    const auto category = category_from_name(cat_name);
    require(category.has_value(), ErrorCode::ConfigError,
            path + ":" + std::to_string(lineno) + ": unknown category '" + cat_name + "'");
    StructureEntry entry;
    entry.category = *category;
    std::string comp;
    while (ss >> comp) entry.component_ids.push_back(comp);
    const int want = category_component_count(*category);
    require(entry.component_ids.empty() || static_cast<int>(entry.component_ids.size()) == want,
            ErrorCode::ConfigError,
            path + ":" + std::to_string(lineno) + ": expected " + std::to_string(want) +
                " component ids for " + cat_name);
    table.add(codepoint_from_hex(cp_hex), std::move(entry));
  }
  return table;
}

void StructureTable::save(const std::string& path) const {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot create " + path);
  for (const auto& [cp, entry] : entries_) {
    out << codepoint_to_hex(cp) << " " << category_name(entry.category);
    for (const auto& id : entry.component_ids) out << " " << id;
    out << "\n";
  }
}

void StructureTable::add(Codepoint cp, StructureEntry entry) { entries_[cp] = std::move(entry); }

bool StructureTable::contains(Codepoint cp) const { return entries_.count(cp) != 0; }

const StructureEntry& StructureTable::entry(Codepoint cp) const {
  const auto it = entries_.find(cp);
  require(it != entries_.end(), ErrorCode::UnknownCharacter,
          "codepoint U+" + codepoint_to_hex(cp) + " not in structure table");
  return it->second;
}

StructureCategory classify_structure(Codepoint cp, const StructureTable& table) {
  return table.entry(cp).category;
}

ComponentLayout layout_for(Codepoint cp, const StructureTable& table, int grid_h, int grid_w) {
  return decompose(cp, table.entry(cp).category, grid_h, grid_w);
}

}  // namespace vqfont::structure
