#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veridoc/geometry.hpp"
#include "veridoc/image.hpp"
#include "veridoc/matching.hpp"
#include "veridoc/templates.hpp"

namespace veridoc {

/// Fixed-pitch bitmap font: A–Z, 0–9, space and . , - : /
class GlyphAtlas {
public:
    static constexpr int kCellWidth = 8;
    static constexpr int kCellHeight = 12;
    using Cell = Eigen::Matrix<std::uint8_t, kCellHeight, kCellWidth, Eigen::RowMajor>;  ///< 1 = ink

    static const GlyphAtlas& standard();

    bool contains(char ch) const;
    const Cell& glyph(char ch) const;  ///< throws ParameterError for characters outside the atlas
    const std::string& alphabet() const { return alphabet_; }

    /// Draws `text` with its first cell at (x, y); pixels outside `canvas` are dropped.
    void draw(Plane<std::uint8_t>& canvas, int x, int y, std::string_view text, std::uint8_t ink = 0,
              int scale = 1) const;

    /// Dark text on a white strip sized to fit exactly, plus `margin` on every side.
    GrayImage render(std::string_view text, int margin = 0) const;

private:
    GlyphAtlas();
    std::string alphabet_;
    std::array<Cell, 128> cells_{};
};

struct TextRegion {
    std::string field_name;  ///< annotation name, or "page" for the whole-page fallback
    Rect box;                ///< sample coordinates
};

struct OcrSegment {
    TextRegion region;
    std::string text;
    double confidence = 0;  ///< [0, 1]
};

class OcrEngine {
public:
    virtual ~OcrEngine() = default;
    virtual std::vector<OcrSegment> extract(const GrayImage& image, std::span<const TextRegion> regions) = 0;
    virtual bool deterministic() const = 0;
    virtual std::string name() const = 0;
};

struct FixtureOcrOptions {
    int block_size = 15;
    double threshold_offset = 10.0;
    double min_glyph_score = 0.5;  ///< cells whose best ZNCC falls below read as '?'
};

/// Reads atlas-rendered text: binarize, locate the glyph band, split columns, and
/// classify each cell by best ZNCC against the atlas.
std::vector<OcrSegment> fixture_extract(const GlyphAtlas& atlas, const GrayImage& image,
                                        std::span<const TextRegion> regions, const FixtureOcrOptions& opts = {});

class FixtureOcrEngine final : public OcrEngine {
public:
    explicit FixtureOcrEngine(FixtureOcrOptions opts = {}, const GlyphAtlas& atlas = GlyphAtlas::standard())
        : atlas_(&atlas), opts_(opts) {}

    std::vector<OcrSegment> extract(const GrayImage& image, std::span<const TextRegion> regions) override {
        return fixture_extract(*atlas_, image, regions, opts_);
    }
    bool deterministic() const override { return true; }
    std::string name() const override { return "fixture"; }

private:
    const GlyphAtlas* atlas_;
    FixtureOcrOptions opts_;
};

/// Shells out to `command <region.png>` per region and parses one segment per output line:
/// `box_x box_y box_w box_h confidence text...`, boxes relative to the region image.
/// One extraction in flight per instance.
class ExternalOcrEngine final : public OcrEngine {
public:
    explicit ExternalOcrEngine(std::string command) : command_(std::move(command)) {}

    std::vector<OcrSegment> extract(const GrayImage& image, std::span<const TextRegion> regions) override;
    bool deterministic() const override { return false; }
    std::string name() const override { return "external:" + command_; }

private:
    std::string command_;
};

/// Parses adapter output for one region; boxes are shifted into sample coordinates and clipped.
std::vector<OcrSegment> parse_external_output(std::string_view output, const TextRegion& region);

/// Maps template annotations into sample coordinates (scale, then match offset, then clip).
/// A template without annotations yields one whole-page region.
std::vector<TextRegion> localize_text_regions(const GrayImage& sample, const TemplateRecord& templ,
                                              const MatchResult& match);

/// Space-joined, lowercased, whitespace-collapsed concatenation in region order.
std::string normalize_text(std::span<const OcrSegment> segments);

/// Mean segment confidence; 1.0 when there are no segments.
double mean_confidence(std::span<const OcrSegment> segments);

}  // namespace veridoc
