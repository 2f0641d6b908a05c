#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "veridoc/config.hpp"
#include "veridoc/geometry.hpp"
#include "veridoc/image.hpp"

namespace veridoc {

/// Named rectangle in template coordinates.
struct FieldRegion {
    std::string field;
    Rect box;
};

/// ROI crop saved next to a template for later hand annotation.
struct RoiSuggestion {
    std::string file;
    Rect box;
    long long area = 0;
};

struct TemplateRecord {
    std::string id;
    std::string image_file;  ///< as written in the manifest, relative to it
    std::string doc_type_label;
    std::vector<FieldRegion> text_regions;
    std::vector<std::string> required_fields;
    std::vector<RoiSuggestion> roi_suggestions;
    std::shared_ptr<const GrayImage> image;

    int width() const { return image->width(); }
    int height() const { return image->height(); }
};

struct TemplateManifest {
    static constexpr int kVersion = 1;

    int version = kVersion;
    std::vector<TemplateRecord> templates;
    std::filesystem::path base_dir;  ///< directory image files resolve against

    const TemplateRecord* find(std::string_view id) const;
};

/// Parses and validates a manifest; template images are loaded eagerly.
/// Throws MissingFileError, DuplicateIdError, RegionOutOfBoundsError or ManifestError.
TemplateManifest load_manifest(const std::filesystem::path& path);
TemplateManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json manifest_to_json(const TemplateManifest& m);
void save_manifest(const TemplateManifest& m, const std::filesystem::path& path);

struct RoiCandidate {
    Rect bounding_box;
    long long area = 0;
    GrayImage crop;
};

/// blur → adaptive threshold → close → Sobel → edge threshold → contours → area filter.
/// Crops come from `doc` itself; sorted by area descending, ties in contour order.
std::vector<RoiCandidate> extract_roi_candidates(const GrayImage& doc, const PipelineConfig& cfg);

/// Persists the crop as `<dir>/<id>.png` and returns an unannotated record for it.
/// The record is not added to `existing`.
TemplateRecord promote_candidate(const RoiCandidate& c, std::string_view id, std::string_view doc_type_label,
                                 const TemplateManifest& existing, const std::filesystem::path& dir);

}  // namespace veridoc
