#include "veridoc/templates.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "veridoc/imgproc.hpp"
#include "veridoc/png_io.hpp"

namespace veridoc {

const TemplateRecord* TemplateManifest::find(std::string_view id) const {
    for (const auto& t : templates)
        if (t.id == id) return &t;
    return nullptr;
}

TemplateManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    TemplateManifest m;
    m.base_dir = base_dir;
    try {
        m.version = j.at("version").get<int>();
        if (m.version != TemplateManifest::kVersion)
            throw ManifestError("unsupported manifest version " + std::to_string(m.version));

        std::set<std::string> ids;
        for (const auto& t : j.at("templates")) {
            TemplateRecord rec;
            rec.id = t.at("id").get<std::string>();
            if (rec.id.empty()) throw ManifestError("template id must not be empty");
            if (!ids.insert(rec.id).second) throw DuplicateIdError(rec.id);
            rec.image_file = t.at("file").get<std::string>();
            rec.doc_type_label = t.value("doc_type_label", std::string{});

            const auto path = base_dir / rec.image_file;
            if (!std::filesystem::is_regular_file(path)) throw MissingFileError(path.string());
            rec.image = std::make_shared<const GrayImage>(read_png_gray(path));

            const Rect bounds{0, 0, rec.width(), rec.height()};
            for (const auto& r : t.value("text_regions", nlohmann::json::array())) {
                FieldRegion fr{r.at("field").get<std::string>(),
                               {r.at("x").get<int>(), r.at("y").get<int>(), r.at("w").get<int>(), r.at("h").get<int>()}};
                if (fr.box.empty() || !bounds.contains(fr.box)) throw RegionOutOfBoundsError(rec.id, fr.field);
                rec.text_regions.push_back(std::move(fr));
            }
            rec.required_fields = t.value("required_fields", std::vector<std::string>{});
            for (const auto& s : t.value("roi_suggestions", nlohmann::json::array()))
                rec.roi_suggestions.push_back(
                    {s.at("file").get<std::string>(),
                     {s.at("x").get<int>(), s.at("y").get<int>(), s.at("w").get<int>(), s.at("h").get<int>()},
                     s.value("area", 0LL)});
            m.templates.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

TemplateManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError(path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError("malformed manifest " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j, path.parent_path());
}

nlohmann::json manifest_to_json(const TemplateManifest& m) {
    nlohmann::json templates = nlohmann::json::array();
    for (const auto& t : m.templates) {
        nlohmann::json regions = nlohmann::json::array();
        for (const auto& r : t.text_regions)
            regions.push_back({{"field", r.field}, {"x", r.box.x}, {"y", r.box.y}, {"w", r.box.w}, {"h", r.box.h}});
        nlohmann::json rec = {{"id", t.id},
                              {"file", t.image_file},
                              {"doc_type_label", t.doc_type_label},
                              {"text_regions", regions},
                              {"required_fields", t.required_fields}};
        if (!t.roi_suggestions.empty()) {
            nlohmann::json sugg = nlohmann::json::array();
            for (const auto& s : t.roi_suggestions)
                sugg.push_back({{"file", s.file},
                                {"x", s.box.x},
                                {"y", s.box.y},
                                {"w", s.box.w},
                                {"h", s.box.h},
                                {"area", s.area}});
            rec["roi_suggestions"] = sugg;
        }
        templates.push_back(std::move(rec));
    }
    return {{"version", m.version}, {"templates", templates}};
}

void save_manifest(const TemplateManifest& m, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IoError("cannot write manifest " + path.string());
        out << manifest_to_json(m).dump(2) << '\n';
        if (!out) throw IoError("cannot write manifest " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<RoiCandidate> extract_roi_candidates(const GrayImage& doc, const PipelineConfig& cfg) {
    const auto& p = cfg.preprocess;
    if (doc.width() < 3 || doc.height() < 3) return {};
    const auto blurred = gaussian_blur(doc, p.blur_sigma, p.blur_kernel);
    const auto binary = adaptive_threshold(blurred, p.block_size, p.threshold_offset);
    const auto closed = morphology(binary, MorphOp::close, StructuringElement::rectangle(p.se_size, p.se_size));
    const auto edges = threshold(sobel_magnitude(closed.gray()), p.edge_threshold);

    std::vector<RoiCandidate> out;
    for (const auto& c : find_contours(edges)) {
        if (c.area < p.min_roi_area) continue;
        out.push_back({c.bounding_box, c.area, crop(doc, c.bounding_box)});
    }
    std::stable_sort(out.begin(), out.end(), [](const RoiCandidate& a, const RoiCandidate& b) { return a.area > b.area; });
    return out;
}

TemplateRecord promote_candidate(const RoiCandidate& c, std::string_view id, std::string_view doc_type_label,
                                 const TemplateManifest& existing, const std::filesystem::path& dir) {
    if (id.empty()) throw ParameterError("template id must not be empty");
    const std::string file = std::string(id) + ".png";
    if (existing.find(id) || std::filesystem::exists(dir / file)) throw IdCollisionError(std::string(id));
    write_png(dir / file, c.crop);

    TemplateRecord rec;
    rec.id = std::string(id);
    rec.image_file = file;
    rec.doc_type_label = std::string(doc_type_label);
    rec.image = std::make_shared<const GrayImage>(c.crop);
    return rec;
}

}  // namespace veridoc
