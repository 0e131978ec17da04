#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "font.hpp"
#include "text_util.hpp"
#include "tibi/errors.hpp"
#include "tibi/render.hpp"

namespace tibi {

namespace {

void append_hex(std::string& out, Rgb c) {
    static constexpr char kDigits[] = "0123456789abcdef";
    out += '#';
    for (std::uint8_t v : {c.r, c.g, c.b}) {
        out += kDigits[v >> 4];
        out += kDigits[v & 15];
    }
}

void append_attr(std::string& out, std::string_view name, double v) {
    out += ' ';
    out += name;
    out += "=\"";
    detail::append_double(out, v);
    out += '"';
}

void append_escaped(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
}

std::string_view role_class(RectRole role) {
    switch (role) {
        case RectRole::Frame: return "frame";
        case RectRole::Tile: return "tile";
        case RectRole::Bar: return "bar";
    }
    return "tile";
}

void write_rect(std::string& out, const RectShape& r) {
    out += "<rect class=\"";
    out += role_class(r.role);
    out += '"';
    if (r.category >= 0) {
        out += " data-cat=\"";
        detail::append_int(out, r.category);
        out += '"';
    }
    append_attr(out, "x", r.box.x);
    append_attr(out, "y", r.box.y);
    append_attr(out, "width", r.box.w);
    append_attr(out, "height", r.box.h);
    out += " fill=\"";
    if (r.fill) {
        append_hex(out, *r.fill);
    } else {
        out += "none";
    }
    out += '"';
    if (r.stroke) {
        out += " stroke=\"";
        append_hex(out, *r.stroke);
        out += "\" stroke-width=\"1\"";
    }
    out += "/>\n";
}

void write_line(std::string& out, const LineShape& l) {
    out += "<line";
    append_attr(out, "x1", l.x1);
    append_attr(out, "y1", l.y1);
    append_attr(out, "x2", l.x2);
    append_attr(out, "y2", l.y2);
    out += " stroke=\"";
    append_hex(out, l.stroke);
    out += "\" stroke-width=\"1\"/>\n";
}

void write_text(std::string& out, const TextShape& t) {
    out += "<text";
    append_attr(out, "x", t.x);
    append_attr(out, "y", t.y);
    append_attr(out, "font-size", t.size);
    switch (t.anchor) {
        case TextAnchor::Start: break;
        case TextAnchor::Middle: out += " text-anchor=\"middle\""; break;
        case TextAnchor::End: out += " text-anchor=\"end\""; break;
    }
    if (t.vertical) {
        out += " transform=\"rotate(-90 ";
        detail::append_double(out, t.x);
        out += ' ';
        detail::append_double(out, t.y);
        out += ")\"";
    }
    out += '>';
    append_escaped(out, t.text);
    out += "</text>\n";
}

constexpr Rgb kTextColor{40, 40, 40};

class Canvas {
public:
    Canvas(int width, int height)
        : width_(width), height_(height), rgb_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, 255) {}

    // Pixels whose centers fall in [x0, x1) x [y0, y1).
    void fill(double x0, double y0, double x1, double y1, Rgb c) {
        const int px0 = std::max(0, static_cast<int>(std::ceil(x0 - 0.5)));
        const int px1 = std::min(width_, static_cast<int>(std::ceil(x1 - 0.5)));
        const int py0 = std::max(0, static_cast<int>(std::ceil(y0 - 0.5)));
        const int py1 = std::min(height_, static_cast<int>(std::ceil(y1 - 0.5)));
        for (int y = py0; y < py1; ++y) {
            for (int x = px0; x < px1; ++x) set(x, y, c);
        }
    }

    // One-pixel line sampled at max(|dx|, |dy|) + 1 points.
    void line(double x0, double y0, double x1, double y1, Rgb c) {
        const double steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1.0});
        const int n = static_cast<int>(std::ceil(steps));
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const int x = static_cast<int>(std::floor(x0 + (x1 - x0) * t));
            const int y = static_cast<int>(std::floor(y0 + (y1 - y0) * t));
            if (x >= 0 && x < width_ && y >= 0 && y < height_) set(x, y, c);
        }
    }

    // Bitmap text; (x, y) is the baseline anchor point as in SVG.
    void text(const TextShape& t, double sx, double sy) {
        const int k = std::max(1, static_cast<int>(std::lround(t.size * std::min(sx, sy) / detail::kGlyphHeight)));
        const double advance = static_cast<double>(detail::kGlyphWidth * k);
        const double length = advance * static_cast<double>(t.text.size());
        double offset = 0;
        if (t.anchor == TextAnchor::Middle) offset = -length / 2;
        if (t.anchor == TextAnchor::End) offset = -length;
        const int ox = static_cast<int>(std::lround(t.x * sx));
        const int oy = static_cast<int>(std::lround(t.y * sy));
        constexpr int kBaselineRow = 9;
        for (std::size_t n = 0; n < t.text.size(); ++n) {
            const std::uint8_t* rows = detail::glyph_rows(t.text[n]);
            const int u0 = static_cast<int>(std::lround(offset + advance * static_cast<double>(n)));
            for (int gy = 0; gy < detail::kGlyphHeight; ++gy) {
                for (int gx = 0; gx < detail::kGlyphWidth; ++gx) {
                    if (!(rows[gy] & (1 << (detail::kGlyphWidth - 1 - gx)))) continue;
                    for (int a = 0; a < k; ++a) {
                        for (int b = 0; b < k; ++b) {
                            const int u = u0 + gx * k + a;            // along the text
                            const int v = (gy - kBaselineRow) * k + b;  // below the baseline
                            const int px = t.vertical ? ox + v : ox + u;
                            const int py = t.vertical ? oy - u : oy + v;
                            if (px >= 0 && px < width_ && py >= 0 && py < height_) set(px, py, kTextColor);
                        }
                    }
                }
            }
        }
    }

    RasterImage take() && { return RasterImage{width_, height_, std::move(rgb_)}; }

private:
    void set(int x, int y, Rgb c) {
        const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
        rgb_[i] = c.r;
        rgb_[i + 1] = c.g;
        rgb_[i + 2] = c.b;
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> rgb_;
};

}  // namespace

ExportFormat parse_export_format(std::string_view token) {
    if (detail::iequals(token, "svg")) return ExportFormat::Svg;
    if (detail::iequals(token, "png")) return ExportFormat::Png;
    throw DomainError("unsupported export format '" + std::string(token) + "' (supported: svg, png)");
}

std::string to_svg(const Document& doc, double width, double height) {
    std::string out;
    std::size_t shapes = 0;
    for (const auto& f : doc.fragments) shapes += f.shapes.size();
    out.reserve(512 + shapes * 110);
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"";
    append_attr(out, "width", width);
    append_attr(out, "height", height);
    out += " viewBox=\"0 0 ";
    detail::append_double(out, doc.width);
    out += ' ';
    detail::append_double(out, doc.height);
    out += "\" font-family=\"sans-serif\" shape-rendering=\"crispEdges\">\n";
    out += "<rect class=\"background\" x=\"0\" y=\"0\"";
    append_attr(out, "width", doc.width);
    append_attr(out, "height", doc.height);
    out += " fill=\"#ffffff\"/>\n";
    for (const auto& frag : doc.fragments) {
        out += "<g class=\"";
        out += frag.cls;
        out += '"';
        if (frag.row >= 0) {
            out += " data-row=\"";
            detail::append_int(out, frag.row);
            out += "\" data-col=\"";
            detail::append_int(out, frag.col);
            out += '"';
        }
        out += ">\n";
        for (const auto& shape : frag.shapes) {
            std::visit(
                [&out](const auto& s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, RectShape>) {
                        write_rect(out, s);
                    } else if constexpr (std::is_same_v<T, LineShape>) {
                        write_line(out, s);
                    } else {
                        write_text(out, s);
                    }
                },
                shape);
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

RasterImage rasterize(const Document& doc, int width, int height) {
    if (width <= 0 || height <= 0) throw DomainError("image dimensions must be positive");
    if (!(doc.width > 0 && doc.height > 0)) throw DomainError("document has no extent");
    Canvas canvas(width, height);
    const double sx = width / doc.width;
    const double sy = height / doc.height;
    for (const auto& frag : doc.fragments) {
        for (const auto& shape : frag.shapes) {
            if (const auto* r = std::get_if<RectShape>(&shape)) {
                const double x0 = r->box.x * sx, x1 = (r->box.x + r->box.w) * sx;
                const double y0 = r->box.y * sy, y1 = (r->box.y + r->box.h) * sy;
                if (r->fill) canvas.fill(x0, y0, x1, y1, *r->fill);
                if (r->stroke) {
                    // Hairline outline along the rectangle's inner pixel border.
                    const double l = std::floor(x0), t = std::floor(y0);
                    const double rgt = std::max(l, std::ceil(x1) - 1), btm = std::max(t, std::ceil(y1) - 1);
                    canvas.line(l, t, rgt, t, *r->stroke);
                    canvas.line(l, btm, rgt, btm, *r->stroke);
                    canvas.line(l, t, l, btm, *r->stroke);
                    canvas.line(rgt, t, rgt, btm, *r->stroke);
                }
            } else if (const auto* ln = std::get_if<LineShape>(&shape)) {
                canvas.line(ln->x1 * sx, ln->y1 * sy, ln->x2 * sx, ln->y2 * sy, ln->stroke);
            } else if (const auto* t = std::get_if<TextShape>(&shape)) {
                canvas.text(*t, sx, sy);
            }
        }
    }
    return std::move(canvas).take();
}

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width);
    png.height = static_cast<png_uint_32>(image.height);
    png.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.rgb.data(), 0, nullptr)) {
        throw Error(std::string("PNG encoding failed: ") + png.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.rgb.data(), 0, nullptr)) {
        throw Error(std::string("PNG encoding failed: ") + png.message);
    }
    out.resize(size);
    return out;
}

std::vector<std::uint8_t> export_image(const Document& doc, ExportFormat format, int width, int height) {
    if (width <= 0 || height <= 0) throw DomainError("image dimensions must be positive");
    if (format == ExportFormat::Png) return encode_png(rasterize(doc, width, height));
    std::string svg = to_svg(doc, width, height);
    return std::vector<std::uint8_t>(svg.begin(), svg.end());
}

}  // namespace tibi
