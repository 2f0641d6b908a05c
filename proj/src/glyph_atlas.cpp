#include "veridoc/ocr.hpp"

#include <utility>

namespace veridoc {

namespace {

// 5×7 bitmaps, placed at columns 1–5 and rows 2–8 of each 8×12 cell.
const std::pair<char, std::array<const char*, 7>> kFont[] = {
    {'A', {".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
    {'B', {"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}},
    {'C', {".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}},
    {'D', {"####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."}},
    {'E', {"#####", "#....", "#....", "####.", "#....", "#....", "#####"}},
    {'F', {"#####", "#....", "#....", "####.", "#....", "#....", "#...."}},
    {'G', {".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"}},
    {'H', {"#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
    {'I', {".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."}},
    {'J', {"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}},
    {'K', {"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}},
    {'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
    {'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
    {'N', {"#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"}},
    {'O', {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
    {'P', {"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}},
    {'Q', {".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}},
    {'R', {"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}},
    {'S', {".####", "#....", "#....", ".###.", "....#", "....#", "####."}},
    {'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
    {'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
    {'V', {"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
    {'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."}},
    {'X', {"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}},
    {'Y', {"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}},
    {'Z', {"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}},
    {'0', {".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."}},
    {'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."}},
    {'2', {".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"}},
    {'3', {"#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."}},
    {'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
    {'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
    {'6', {"..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."}},
    {'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
    {'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
    {'9', {".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."}},
    {'.', {".....", ".....", ".....", ".....", ".....", ".##..", ".##.."}},
    {',', {".....", ".....", ".....", ".....", ".##..", "..#..", ".#..."}},
    {'-', {".....", ".....", ".....", "#####", ".....", ".....", "....."}},
    {':', {".....", ".##..", ".##..", ".....", ".##..", ".##..", "....."}},
    {'/', {".....", "....#", "...#.", "..#..", ".#...", "#....", "....."}},
    {' ', {".....", ".....", ".....", ".....", ".....", ".....", "....."}},
};

constexpr int kGlyphLeft = 1;
constexpr int kGlyphTop = 2;

}  // namespace

GlyphAtlas::GlyphAtlas() {
    for (const auto& [ch, rows] : kFont) {
        Cell cell = Cell::Zero();
        for (int r = 0; r < 7; ++r)
            for (int c = 0; c < 5; ++c) cell(kGlyphTop + r, kGlyphLeft + c) = rows[r][c] == '#' ? 1 : 0;
        cells_[static_cast<unsigned char>(ch)] = cell;
        alphabet_.push_back(ch);
    }
}

const GlyphAtlas& GlyphAtlas::standard() {
    static const GlyphAtlas atlas;
    return atlas;
}

bool GlyphAtlas::contains(char ch) const { return alphabet_.find(ch) != std::string::npos; }

const GlyphAtlas::Cell& GlyphAtlas::glyph(char ch) const {
    if (!contains(ch)) throw ParameterError(std::string("character not in glyph atlas: '") + ch + "'");
    return cells_[static_cast<unsigned char>(ch)];
}

void GlyphAtlas::draw(Plane<std::uint8_t>& canvas, int x, int y, std::string_view text, std::uint8_t ink,
                      int scale) const {
    if (scale < 1) throw ParameterError("text scale must be >= 1");
    for (std::size_t i = 0; i < text.size(); ++i) {
        const auto& cell = glyph(text[i]);
        const int cx = x + static_cast<int>(i) * kCellWidth * scale;
        for (int r = 0; r < kCellHeight * scale; ++r)
            for (int c = 0; c < kCellWidth * scale; ++c) {
                if (!cell(r / scale, c / scale)) continue;
                const int px = cx + c, py = y + r;
                if (px >= 0 && py >= 0 && px < canvas.cols() && py < canvas.rows()) canvas(py, px) = ink;
            }
    }
}

GrayImage GlyphAtlas::render(std::string_view text, int margin) const {
    const int w = std::max<int>(1, static_cast<int>(text.size()) * kCellWidth + 2 * margin);
    const int h = kCellHeight + 2 * margin;
    Plane<std::uint8_t> canvas = Plane<std::uint8_t>::Constant(h, w, 255);
    draw(canvas, margin, margin, text);
    return GrayImage(std::move(canvas));
}

}  // namespace veridoc
