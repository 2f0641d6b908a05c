#include <gtest/gtest.h>

#include <fstream>

#include <json.hpp>

#include "oracles.hpp"
#include "synth.hpp"
#include "veridoc/errors.hpp"
#include "veridoc/png_io.hpp"
#include "veridoc/templates.hpp"

using namespace veridoc;
using namespace veridoc::testing;
namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2); }

nlohmann::json entry(const std::string& id, const std::string& file) {
    return {{"id", id}, {"file", file}, {"doc_type_label", id + " label"}, {"text_regions", nlohmann::json::array()},
            {"required_fields", nlohmann::json::array()}};
}

fs::path three_template_dir(const std::string& name) {
    const auto dir = scratch_dir(name);
    write_png(dir / "a.png", GrayImage(bill_page()));
    write_png(dir / "b.png", GrayImage(letter_page()));
    write_png(dir / "c.png", GrayImage(medical_page({})));
    return dir;
}

PipelineConfig roi_config() {
    PipelineConfig cfg;
    cfg.preprocess.block_size = 31;
    cfg.preprocess.threshold_offset = 10;
    return cfg;
}

}  // namespace

TEST(Manifest, LoadsInDeclarationOrder) {
    const auto dir = three_template_dir("manifest-order");
    auto c = entry("c", "c.png");
    c["text_regions"] = {{{"field", "Name"}, {"x", 172}, {"y", 122}, {"w", 396}, {"h", 24}}};
    c["required_fields"] = {"Name"};
    write_json(dir / "m.json", {{"version", 1}, {"templates", {entry("b", "b.png"), entry("a", "a.png"), c}}});
    const auto m = load_manifest(dir / "m.json");
    ASSERT_EQ(m.templates.size(), 3u);
    EXPECT_EQ(m.templates[0].id, "b");
    EXPECT_EQ(m.templates[1].id, "a");
    EXPECT_EQ(m.templates[2].id, "c");
    EXPECT_EQ(m.templates[2].text_regions.at(0).box, (Rect{172, 122, 396, 24}));
    EXPECT_EQ(m.templates[2].width(), 600);
    EXPECT_EQ(m.find("a")->doc_type_label, "a label");
    EXPECT_EQ(m.find("zzz"), nullptr);
}

TEST(Manifest, DuplicateIdIsNamed) {
    const auto dir = three_template_dir("manifest-dup");
    write_json(dir / "m.json", {{"version", 1}, {"templates", {entry("bill", "a.png"), entry("bill", "b.png")}}});
    try {
        load_manifest(dir / "m.json");
        FAIL();
    } catch (const DuplicateIdError& e) {
        EXPECT_EQ(e.id(), "bill");
        EXPECT_NE(std::string(e.what()).find("bill"), std::string::npos);
    }
}

TEST(Manifest, MissingFileCarriesPath) {
    const auto dir = three_template_dir("manifest-missing");
    write_json(dir / "m.json", {{"version", 1}, {"templates", {entry("x", "nope.png")}}});
    try {
        load_manifest(dir / "m.json");
        FAIL();
    } catch (const MissingFileError& e) {
        EXPECT_NE(e.path().find("nope.png"), std::string::npos);
    }
    EXPECT_THROW(load_manifest(dir / "absent.json"), MissingFileError);
}

TEST(Manifest, RegionOutOfBounds) {
    const auto dir = three_template_dir("manifest-oob");
    auto a = entry("a", "a.png");
    a["text_regions"] = {{{"field", "Name"}, {"x", 590}, {"y", 10}, {"w", 20}, {"h", 10}}};
    write_json(dir / "m.json", {{"version", 1}, {"templates", {a}}});
    EXPECT_THROW(load_manifest(dir / "m.json"), RegionOutOfBoundsError);
}

TEST(Manifest, MalformedAndVersion) {
    const auto dir = three_template_dir("manifest-bad");
    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_THROW(load_manifest(dir / "broken.json"), ManifestError);
    write_json(dir / "v2.json", {{"version", 2}, {"templates", nlohmann::json::array()}});
    EXPECT_THROW(load_manifest(dir / "v2.json"), ManifestError);
}

TEST(Manifest, SaveLoadRoundTrip) {
    const auto dir = three_template_dir("manifest-roundtrip");
    auto a = entry("a", "a.png");
    a["roi_suggestions"] = {{{"file", "a_roi_0.png"}, {"x", 1}, {"y", 2}, {"w", 3}, {"h", 4}, {"area", 12}}};
    write_json(dir / "m.json", {{"version", 1}, {"templates", {a, entry("b", "b.png")}}});
    const auto m = load_manifest(dir / "m.json");
    save_manifest(m, dir / "copy.json");
    const auto again = load_manifest(dir / "copy.json");
    EXPECT_EQ(manifest_to_json(m), manifest_to_json(again));
    EXPECT_EQ(again.templates[0].roi_suggestions.at(0).area, 12);
}

TEST(RoiExtraction, BlankPageYieldsNothing) {
    EXPECT_TRUE(extract_roi_candidates(GrayImage(200, 150, 255), roi_config()).empty());
    EXPECT_TRUE(extract_roi_candidates(GrayImage(2, 2, 0), roi_config()).empty());
}

TEST(RoiExtraction, ThreeFieldBoxes) {
    Canvas c = blank_canvas(300, 200);
    const Rect boxes[] = {{30, 30, 60, 20}, {150, 30, 60, 20}, {30, 120, 60, 20}};
    for (const auto& b : boxes) fill_rect(c, b, 0);
    const GrayImage doc(c);
    const auto cands = extract_roi_candidates(doc, roi_config());
    ASSERT_EQ(cands.size(), 3u);
    for (const auto& b : boxes) {
        int hits = 0;
        for (const auto& r : cands) {
            const auto& got = r.bounding_box;
            if (std::abs(got.x - b.x) <= 2 && std::abs(got.y - b.y) <= 2 && std::abs(got.right() - b.right()) <= 2 &&
                std::abs(got.bottom() - b.bottom()) <= 2)
                ++hits;
        }
        EXPECT_EQ(hits, 1) << b;
    }
    for (const auto& r : cands) EXPECT_EQ(r.crop, oracle::window(doc, r.bounding_box.x, r.bounding_box.y, r.bounding_box.w, r.bounding_box.h));
}

TEST(RoiExtraction, FrameSurvivesSpeckFiltered) {
    Canvas c = blank_canvas(200, 150);
    stroke_rect(c, {0, 0, 200, 150}, 0, 4);
    fill_rect(c, {100, 70, 2, 2}, 0);
    PipelineConfig cfg = roi_config();
    cfg.preprocess.min_roi_area = 50;
    const auto cands = extract_roi_candidates(GrayImage(c), cfg);
    ASSERT_EQ(cands.size(), 1u);
    const Rect& b = cands[0].bounding_box;
    EXPECT_LE(b.x, 4);
    EXPECT_LE(b.y, 4);
    EXPECT_GE(b.right(), 196);
    EXPECT_GE(b.bottom(), 146);
}

TEST(RoiExtraction, OrderingCropsAndMonotoneCount) {
    const GrayImage doc(medical_page({}));
    PipelineConfig cfg = roi_config();
    cfg.preprocess.min_roi_area = 1;
    const auto all = extract_roi_candidates(doc, cfg);
    ASSERT_FALSE(all.empty());
    for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GE(all[i - 1].area, all[i].area);
    for (const auto& r : all) {
        EXPECT_GE(r.area, 1);
        EXPECT_EQ(r.crop, oracle::window(doc, r.bounding_box.x, r.bounding_box.y, r.bounding_box.w, r.bounding_box.h));
    }
    std::size_t prev = all.size();
    for (long long min_area : {1, 10, 50, 100, 500, 2000, 100000}) {
        cfg.preprocess.min_roi_area = min_area;
        const auto got = extract_roi_candidates(doc, cfg);
        EXPECT_LE(got.size(), prev);
        prev = got.size();
        for (const auto& r : got) EXPECT_GE(r.area, min_area);
    }
    cfg.preprocess.min_roi_area = 100;
    const auto a = extract_roi_candidates(doc, cfg), b = extract_roi_candidates(doc, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].bounding_box, b[i].bounding_box);
}

TEST(Promote, PersistsCrop) {
    const auto dir = scratch_dir("promote");
    RoiCandidate c{{5, 5, 40, 20}, 800, GrayImage(40, 20, 90)};
    TemplateManifest m;
    const auto rec = promote_candidate(c, "yashoda-head", "Medical report", m, dir);
    EXPECT_EQ(rec.id, "yashoda-head");
    EXPECT_EQ(rec.image_file, "yashoda-head.png");
    EXPECT_TRUE(rec.text_regions.empty());
    EXPECT_TRUE(rec.required_fields.empty());
    EXPECT_EQ(read_png_gray(dir / "yashoda-head.png"), c.crop);
    EXPECT_THROW(promote_candidate(c, "", "x", m, dir), ParameterError);
    m.templates.push_back(rec);
    EXPECT_THROW(promote_candidate(c, "yashoda-head", "x", m, dir), IdCollisionError);
}
