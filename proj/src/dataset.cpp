#include "vqfont/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqfont/png_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace vqfont::data {

std::vector<ManifestRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open manifest " + path);
  std::vector<ManifestRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::UnreadableSource,
           path + ":" + std::to_string(lineno) + ": bad manifest record: " + e.what());
    }
    ManifestRecord rec;
    rec.font_id = j.at("font_id").get<std::string>();
    rec.codepoint = codepoint_from_hex(j.at("codepoint").get<std::string>());
    rec.relative_path = j.at("relative_path").get<std::string>();
    records.push_back(std::move(rec));
  }
  return records;
}

void save_manifest(const std::vector<ManifestRecord>& records, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot create manifest " + path);
  for (const auto& rec : records) {
    json j{{"font_id", rec.font_id},
           {"codepoint", codepoint_to_hex(rec.codepoint)},
           {"relative_path", rec.relative_path}};
    out << j.dump() << "\n";
  }
}

GlyphImage GlyphSource::get(const std::string& font_id, Codepoint cp) const {
  const std::string key = font_id + "/" + codepoint_to_hex(cp);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    auto img = load(font_id, cp);
    require(img.size(0) == size_ && img.size(1) == size_, ErrorCode::ShapeMismatch,
            "glyph " + key + " is " + std::to_string(img.size(0)) + "x" +
                std::to_string(img.size(1)) + ", expected " + std::to_string(size_));
    it = cache_.emplace(key, std::move(img)).first;
  }
  return GlyphImage{it->second, cp, font_id};
}

FontDirSource::FontDirSource(const std::string& fonts_dir, const std::vector<Codepoint>& charset,
                             int size)
    : GlyphSource(size), charset_(charset) {
  require(fs::is_directory(fonts_dir), ErrorCode::UnreadableSource,
          "not a directory: " + fonts_dir);
  for (const auto& entry : fs::directory_iterator(fonts_dir)) {
    const auto ext = entry.path().extension().string();
    if (ext == ".ttf" || ext == ".TTF")
      fonts_[entry.path().stem().string()] = std::make_shared<TrueTypeFont>(entry.path().string());
  }
  require(!fonts_.empty(), ErrorCode::UnreadableSource, "no .ttf files in " + fonts_dir);
}

std::vector<std::string> FontDirSource::font_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, font] : fonts_) ids.push_back(id);
  return ids;
}

torch::Tensor FontDirSource::load(const std::string& font_id, Codepoint cp) const {
  const auto it = fonts_.find(font_id);
  require(it != fonts_.end(), ErrorCode::UnreadableSource, "unknown font id " + font_id);
  return it->second->render(cp, size_);
}

bool FontDirSource::has_impl(const std::string& font_id, Codepoint cp) const {
  const auto it = fonts_.find(font_id);
  return it != fonts_.end() && it->second->has_glyph(cp);
}

ImageDirSource::ImageDirSource(const std::string& images_dir, const std::string& manifest_path,
                               int size)
    : GlyphSource(size), images_dir_(images_dir) {
  for (const auto& rec : load_manifest(manifest_path))
    paths_[rec.font_id][rec.codepoint] = rec.relative_path;
  require(!paths_.empty(), ErrorCode::UnreadableSource, "empty manifest " + manifest_path);
}

std::vector<std::string> ImageDirSource::font_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, m] : paths_) ids.push_back(id);
  return ids;
}

std::vector<Codepoint> ImageDirSource::charset() const {
  std::set<Codepoint> cps;
  for (const auto& [id, m] : paths_)
    for (const auto& [cp, p] : m) cps.insert(cp);
  return {cps.begin(), cps.end()};
}

torch::Tensor ImageDirSource::load(const std::string& font_id, Codepoint cp) const {
  const auto fit = paths_.find(font_id);
  require(fit != paths_.end(), ErrorCode::MissingGlyph, "no images for font " + font_id);
  const auto cit = fit->second.find(cp);
  require(cit != fit->second.end(), ErrorCode::MissingGlyph,
          font_id + " has no image for U+" + codepoint_to_hex(cp));
  return load_png_gray((fs::path(images_dir_) / cit->second).string());
}

bool ImageDirSource::has_impl(const std::string& font_id, Codepoint cp) const {
  const auto fit = paths_.find(font_id);
  return fit != paths_.end() && fit->second.count(cp) != 0;
}

SynthSource::SynthSource(SynthCorpus corpus, int size)
    : GlyphSource(size), corpus_(std::move(corpus)) {}

std::vector<std::string> SynthSource::font_ids() const {
  auto ids = corpus_.font_ids;
  ids.push_back(corpus_.spec.content_font_id);
  return ids;
}

torch::Tensor SynthSource::load(const std::string& font_id, Codepoint cp) const {
  return render_synth_glyph(corpus_, font_id, cp, size_);
}

bool SynthSource::has_impl(const std::string& font_id, Codepoint cp) const {
  if (!corpus_.table.contains(cp)) return false;
  if (font_id == corpus_.spec.content_font_id) return true;
  return std::find(corpus_.font_ids.begin(), corpus_.font_ids.end(), font_id) !=
         corpus_.font_ids.end();
}

GlyphImage render_glyph(const TrueTypeFont& font, const std::string& font_id, Codepoint cp,
                        int size) {
  return GlyphImage{font.render(cp, size), cp, font_id};
}

SplitRatios parse_split_ratios(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  require(values.size() == 3, ErrorCode::ConfigError,
          "split ratios need 3 comma-separated values, got '" + csv + "'");
  SplitRatios r;
  r.seen = values[0];
  r.reference = values[1];
  r.unseen = values[2];
  r.fractional = values[0] < 1.0 && values[1] < 1.0 && values[2] < 1.0;
  return r;
}

DatasetSplits build_splits(const std::vector<Codepoint>& charset,
                           const std::vector<std::string>& font_ids, const SplitRatios& ratios,
                           std::uint64_t seed, int unseen_font_count) {
  const auto n = static_cast<long>(charset.size());
  long n_ref, n_unseen, n_seen;
  if (ratios.fractional) {
    const double total = ratios.seen + ratios.reference + ratios.unseen;
    require(std::abs(total - 1.0) < 1e-6, ErrorCode::BadRatio,
            "fractional split ratios must sum to 1");
    n_ref = static_cast<long>(std::floor(ratios.reference * n));
    n_unseen = static_cast<long>(std::floor(ratios.unseen * n));
    n_seen = n - n_ref - n_unseen;  // seen absorbs rounding remainder
  } else {
    n_seen = static_cast<long>(ratios.seen);
    n_ref = static_cast<long>(ratios.reference);
    n_unseen = static_cast<long>(ratios.unseen);
  }
  require(n_seen >= 0 && n_ref >= 0 && n_unseen >= 0, ErrorCode::BadRatio,
          "split counts must be nonnegative");
  require(n_seen + n_ref + n_unseen <= n, ErrorCode::BadRatio,
          "split counts " + std::to_string(n_seen) + "+" + std::to_string(n_ref) + "+" +
              std::to_string(n_unseen) + " exceed charset size " + std::to_string(n));

  std::vector<Codepoint> shuffled = charset;
  std::sort(shuffled.begin(), shuffled.end());
  deterministic_shuffle(shuffled, mix_seed(seed, 0x5EED5ull));

  DatasetSplits splits;
  splits.seen_chars.assign(shuffled.begin(), shuffled.begin() + n_seen);
  splits.reference_chars.assign(shuffled.begin() + n_seen, shuffled.begin() + n_seen + n_ref);
  splits.unseen_chars.assign(shuffled.begin() + n_seen + n_ref,
                             shuffled.begin() + n_seen + n_ref + n_unseen);
  std::sort(splits.seen_chars.begin(), splits.seen_chars.end());
  std::sort(splits.reference_chars.begin(), splits.reference_chars.end());
  std::sort(splits.unseen_chars.begin(), splits.unseen_chars.end());

  std::vector<std::string> fonts = font_ids;
  std::sort(fonts.begin(), fonts.end());
  deterministic_shuffle(fonts, mix_seed(seed, 0xF0575ull));
  long n_unseen_fonts = unseen_font_count >= 0
                            ? unseen_font_count
                            : static_cast<long>((fonts.size() + 9) / 10);
  require(n_unseen_fonts <= static_cast<long>(fonts.size()), ErrorCode::BadRatio,
          "unseen font count exceeds font count");
  splits.unseen_fonts.assign(fonts.begin(), fonts.begin() + n_unseen_fonts);
  splits.seen_fonts.assign(fonts.begin() + n_unseen_fonts, fonts.end());
  std::sort(splits.seen_fonts.begin(), splits.seen_fonts.end());
  std::sort(splits.unseen_fonts.begin(), splits.unseen_fonts.end());
  return splits;
}

namespace {

json codepoints_to_json(const std::vector<Codepoint>& cps) {
  json arr = json::array();
  for (const auto cp : cps) arr.push_back(codepoint_to_hex(cp));
  return arr;
}

std::vector<Codepoint> codepoints_from_json(const json& arr) {
  std::vector<Codepoint> out;
  for (const auto& v : arr) out.push_back(codepoint_from_hex(v.get<std::string>()));
  return out;
}

}  // namespace

void save_splits(const DatasetSplits& splits, const std::string& path) {
  json j{{"seen_chars", codepoints_to_json(splits.seen_chars)},
         {"reference_chars", codepoints_to_json(splits.reference_chars)},
         {"unseen_chars", codepoints_to_json(splits.unseen_chars)},
         {"seen_fonts", splits.seen_fonts},
         {"unseen_fonts", splits.unseen_fonts}};
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot create " + path);
  out << j.dump(2) << "\n";
}

DatasetSplits load_splits(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open splits " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::UnreadableSource, path + ": bad splits file: " + e.what());
  }
  DatasetSplits splits;
  splits.seen_chars = codepoints_from_json(j.at("seen_chars"));
  splits.reference_chars = codepoints_from_json(j.at("reference_chars"));
  splits.unseen_chars = codepoints_from_json(j.at("unseen_chars"));
  splits.seen_fonts = j.at("seen_fonts").get<std::vector<std::string>>();
  splits.unseen_fonts = j.at("unseen_fonts").get<std::vector<std::string>>();
  return splits;
}

ReferenceAssignment select_references(Codepoint target,
                                      const std::vector<Codepoint>& reference_chars,
                                      const structure::StructureTable& table, int k) {
  require(!reference_chars.empty(), ErrorCode::EmptyReferencePool, "reference pool is empty");
  require(k >= 1, ErrorCode::ConfigError, "k must be >= 1");

  const auto& target_entry = table.entry(target);
  std::set<std::string> wanted(target_entry.component_ids.begin(),
                               target_entry.component_ids.end());

  std::vector<Codepoint> pool = reference_chars;
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  for (const auto cp : pool) table.entry(cp);  // precondition: all charted

  ReferenceAssignment out;
  out.target = target;
  std::set<std::string> covered;
  std::vector<bool> used(pool.size(), false);

  while (static_cast<int>(out.references.size()) < k) {
    long best = -1;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      const auto& ids = table.entry(pool[i]).component_ids;
      const std::set<std::string> comps(ids.begin(), ids.end());
      std::size_t gain = 0;
      for (const auto& comp : comps)
        if (wanted.count(comp) && !covered.count(comp)) ++gain;
      if (gain > best_gain) {  // ties keep the earlier (lower) codepoint
        best_gain = gain;
        best = static_cast<long>(i);
      }
    }
    if (best < 0) break;  // coverage saturated
    used[best] = true;
    out.references.push_back(pool[best]);
    for (const auto& comp : table.entry(pool[best]).component_ids)
      if (wanted.count(comp)) covered.insert(comp);
  }

  // pad with the smallest unused codepoints; cycle when the pool runs dry
  std::size_t i = 0;
  while (static_cast<int>(out.references.size()) < k) {
    if (i < pool.size()) {
      if (!used[i]) {
        used[i] = true;
        out.references.push_back(pool[i]);
      }
      ++i;
    } else {
      out.references.push_back(pool[out.references.size() % pool.size()]);
    }
  }
  return out;
}

}  // namespace vqfont::data
