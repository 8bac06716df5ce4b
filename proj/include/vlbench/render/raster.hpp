#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vlbench {

struct Color {
    std::uint8_t r = 0, g = 0, b = 0, a = 255;
};

namespace palette {
inline constexpr Color white{255, 255, 255};
inline constexpr Color black{20, 20, 20};
inline constexpr Color grid{220, 220, 220};
inline constexpr Color axis{60, 60, 60};

// categorical series colors
inline const std::vector<Color>& series() {
    static const std::vector<Color> p = {
        {31, 119, 180},  {255, 127, 14}, {44, 160, 44},  {214, 39, 40},
        {148, 103, 189}, {140, 86, 75},  {227, 119, 194}, {127, 127, 127},
        {188, 189, 34},  {23, 190, 207}, {174, 199, 232}, {255, 187, 120},
    };
    return p;
}

// sequential ramp for choropleth bands (light to dark blue)
inline const std::vector<Color>& sequential() {
    static const std::vector<Color> p = {
        {239, 243, 255}, {189, 215, 231}, {107, 174, 214}, {49, 130, 189}, {8, 81, 156},
    };
    return p;
}
}  // namespace palette

namespace fontdata {

// 5x7 glyphs; lowercase maps onto uppercase. '#' marks set pixels.
struct Glyph {
    char ch;
    const char* rows[7];
};

inline const std::vector<Glyph>& glyphs() {
    static const std::vector<Glyph> g = {
        {'A', {".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"}},
        {'B', {"####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."}},
        {'C', {".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."}},
        {'D', {"####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."}},
        {'E', {"#####", "#....", "####.", "#....", "#....", "#....", "#####"}},
        {'F', {"#####", "#....", "####.", "#....", "#....", "#....", "#...."}},
        {'G', {".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".###."}},
        {'H', {"#...#", "#...#", "#####", "#...#", "#...#", "#...#", "#...#"}},
        {'I', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "#####"}},
        {'J', {"..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."}},
        {'K', {"#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"}},
        {'L', {"#....", "#....", "#....", "#....", "#....", "#....", "#####"}},
        {'M', {"#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"}},
        {'N', {"#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"}},
        {'O', {".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
        {'P', {"####.", "#...#", "#...#", "####.", "#....", "#....", "#...."}},
        {'Q', {".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"}},
        {'R', {"####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"}},
        {'S', {".####", "#....", "#....", ".###.", "....#", "....#", "####."}},
        {'T', {"#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."}},
        {'U', {"#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."}},
        {'V', {"#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."}},
        {'W', {"#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"}},
        {'X', {"#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"}},
        {'Y', {"#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."}},
        {'Z', {"#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"}},
        {'0', {".###.", "#..##", "#.#.#", "##..#", "#...#", "#...#", ".###."}},
        {'1', {"..#..", ".##..", "..#..", "..#..", "..#..", "..#..", "#####"}},
        {'2', {".###.", "#...#", "....#", "..##.", ".#...", "#....", "#####"}},
        {'3', {".###.", "#...#", "....#", "..##.", "....#", "#...#", ".###."}},
        {'4', {"...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."}},
        {'5', {"#####", "#....", "####.", "....#", "....#", "#...#", ".###."}},
        {'6', {".###.", "#....", "#....", "####.", "#...#", "#...#", ".###."}},
        {'7', {"#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."}},
        {'8', {".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."}},
        {'9', {".###.", "#...#", "#...#", ".####", "....#", "....#", ".###."}},
        {' ', {".....", ".....", ".....", ".....", ".....", ".....", "....."}},
        {'.', {".....", ".....", ".....", ".....", ".....", ".##..", ".##.."}},
        {',', {".....", ".....", ".....", ".....", ".....", "..#..", ".#..."}},
        {'-', {".....", ".....", ".....", ".###.", ".....", ".....", "....."}},
        {'%', {"##..#", "##.#.", "...#.", "..#..", ".#...", ".#.##", "#..##"}},
        {'$', {"..#..", ".####", "#.#..", ".###.", "..#.#", "####.", "..#.."}},
        {'(', {"...#.", "..#..", ".#...", ".#...", ".#...", "..#..", "...#."}},
        {')', {".#...", "..#..", "...#.", "...#.", "...#.", "..#..", ".#..."}},
        {'/', {"....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."}},
        {':', {".....", ".##..", ".##..", ".....", ".##..", ".##..", "....."}},
        {'\'', {"..#..", "..#..", ".....", ".....", ".....", ".....", "....."}},
        {'&', {".##..", "#..#.", "#..#.", ".##..", "#.#.#", "#..#.", ".##.#"}},
        {'?', {".###.", "#...#", "....#", "..##.", "..#..", ".....", "..#.."}},
        {'=', {".....", ".....", "#####", ".....", "#####", ".....", "....."}},
        {'+', {".....", "..#..", "..#..", "#####", "..#..", "..#..", "....."}},
        {'<', {"...#.", "..#..", ".#...", "#....", ".#...", "..#..", "...#."}},
        {'>', {".#...", "..#..", "...#.", "....#", "...#.", "..#..", ".#..."}},
    };
    return g;
}

inline const Glyph* lookup(char c) {
    static const std::map<char, const Glyph*> idx = [] {
        std::map<char, const Glyph*> m;
        for (const auto& g : glyphs()) m[g.ch] = &g;
        return m;
    }();
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    auto it = idx.find(c);
    return it == idx.end() ? nullptr : it->second;
}

inline constexpr int kGlyphW = 5;
inline constexpr int kGlyphH = 7;
inline constexpr int kAdvance = 6;  // glyph width + 1px spacing

}  // namespace fontdata

class Canvas {
public:
    Canvas(int width, int height, Color bg = palette::white)
        : w_(width), h_(height), px_(static_cast<std::size_t>(width) * height * 4) {
        fill(bg);
    }

    int width() const { return w_; }
    int height() const { return h_; }
    const std::vector<std::uint8_t>& pixels() const { return px_; }

    void fill(Color c) {
        for (int y = 0; y < h_; ++y)
            for (int x = 0; x < w_; ++x) set_pixel(x, y, c);
    }

    void set_pixel(int x, int y, Color c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 4];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
        p[3] = c.a;
    }

    Color get_pixel(int x, int y) const {
        const auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 4];
        return {p[0], p[1], p[2], p[3]};
    }

    void draw_line(int x0, int y0, int x1, int y1, Color c, int thickness = 1) {
        const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        for (;;) {
            if (thickness <= 1) {
                set_pixel(x0, y0, c);
            } else {
                const int r = thickness / 2;
                for (int oy = -r; oy <= r; ++oy)
                    for (int ox = -r; ox <= r; ++ox) set_pixel(x0 + ox, y0 + oy, c);
            }
            if (x0 == x1 && y0 == y1) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx) {
                err += dx;
                y0 += sy;
            }
        }
    }

    void fill_rect(int x, int y, int rw, int rh, Color c) {
        for (int yy = y; yy < y + rh; ++yy)
            for (int xx = x; xx < x + rw; ++xx) set_pixel(xx, yy, c);
    }

    void draw_rect(int x, int y, int rw, int rh, Color c) {
        draw_line(x, y, x + rw - 1, y, c);
        draw_line(x, y + rh - 1, x + rw - 1, y + rh - 1, c);
        draw_line(x, y, x, y + rh - 1, c);
        draw_line(x + rw - 1, y, x + rw - 1, y + rh - 1, c);
    }

    // even-odd scanline fill
    void fill_polygon(const std::vector<std::pair<double, double>>& pts, Color c) {
        if (pts.size() < 3) return;
        double ymin = pts[0].second, ymax = pts[0].second;
        for (const auto& p : pts) {
            ymin = std::min(ymin, p.second);
            ymax = std::max(ymax, p.second);
        }
        for (int y = static_cast<int>(std::floor(ymin)); y <= static_cast<int>(std::ceil(ymax)); ++y) {
            std::vector<double> xs;
            const double fy = y + 0.5;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto& a = pts[i];
                const auto& b = pts[(i + 1) % pts.size()];
                if ((a.second <= fy && b.second > fy) || (b.second <= fy && a.second > fy)) {
                    const double t = (fy - a.second) / (b.second - a.second);
                    xs.push_back(a.first + t * (b.first - a.first));
                }
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
                for (int x = static_cast<int>(std::ceil(xs[i] - 0.5));
                     x < static_cast<int>(std::ceil(xs[i + 1] - 0.5)); ++x)
                    set_pixel(x, y, c);
        }
    }

    void fill_circle(int cx, int cy, int r, Color c) {
        for (int y = -r; y <= r; ++y)
            for (int x = -r; x <= r; ++x)
                if (x * x + y * y <= r * r) set_pixel(cx + x, cy + y, c);
    }

    void draw_circle(int cx, int cy, int r, Color c) {
        for (int y = -r; y <= r; ++y)
            for (int x = -r; x <= r; ++x) {
                const int d = x * x + y * y;
                if (d <= r * r && d >= (r - 1) * (r - 1)) set_pixel(cx + x, cy + y, c);
            }
    }

    static int text_width(const std::string& s, int scale = 1) {
        return static_cast<int>(s.size()) * fontdata::kAdvance * scale;
    }
    static int text_height(int scale = 1) { return fontdata::kGlyphH * scale; }

    void draw_text(int x, int y, const std::string& s, Color c, int scale = 1) {
        int cx = x;
        for (char ch : s) {
            const auto* g = fontdata::lookup(ch);
            if (g) {
                for (int ry = 0; ry < fontdata::kGlyphH; ++ry)
                    for (int rx = 0; rx < fontdata::kGlyphW; ++rx)
                        if (g->rows[ry][rx] == '#')
                            for (int sy = 0; sy < scale; ++sy)
                                for (int sx = 0; sx < scale; ++sx)
                                    set_pixel(cx + rx * scale + sx, y + ry * scale + sy, c);
            } else if (ch != ' ') {
                draw_rect(cx, y, fontdata::kGlyphW * scale, fontdata::kGlyphH * scale, c);
            }
            cx += fontdata::kAdvance * scale;
        }
        texts_.push_back(s);
    }

    // vertical text, rotated 90 degrees counterclockwise (for y-axis titles)
    void draw_text_vertical(int x, int y, const std::string& s, Color c, int scale = 1) {
        int cy = y;
        for (char ch : s) {
            const auto* g = fontdata::lookup(ch);
            if (g) {
                for (int ry = 0; ry < fontdata::kGlyphH; ++ry)
                    for (int rx = 0; rx < fontdata::kGlyphW; ++rx)
                        if (g->rows[ry][rx] == '#')
                            for (int sy = 0; sy < scale; ++sy)
                                for (int sx = 0; sx < scale; ++sx)
                                    set_pixel(x + ry * scale + sy, cy - rx * scale - sx, c);
            }
            cy -= fontdata::kAdvance * scale;
        }
        texts_.push_back(s);
    }

    // every string ever drawn, used for label-hygiene checks
    const std::vector<std::string>& text_inventory() const { return texts_; }

private:
    int w_;
    int h_;
    std::vector<std::uint8_t> px_;
    std::vector<std::string> texts_;
};

}  // namespace vlbench
