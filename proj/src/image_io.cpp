#include "ensreg/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "fs_util.hpp"

namespace ensreg {

using detail::read_file;
using detail::write_file_atomic;

namespace {

// Cursor over the raw PGM bytes; every error reports the offset it occurred at.
struct PgmCursor {
    const std::string& data;
    const std::string name;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(name + ": " + msg + " at byte " + std::to_string(pos), pos);
    }

    void skip_space_and_comments() {
        while (!eof()) {
            const char c = data[pos];
            if (c == '#') {
                while (!eof() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long parse_int(const char* what) {
        skip_space_and_comments();
        if (eof()) fail(std::string("truncated header, expected ") + what);
        if (!std::isdigit(static_cast<unsigned char>(data[pos]))) {
            fail(std::string("malformed header, expected ") + what);
        }
        long value = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
            value = value * 10 + (data[pos] - '0');
            if (value > 1000000000L) fail(std::string("unreasonably large ") + what);
            ++pos;
        }
        return value;
    }
};

} // namespace

Image read_pgm(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    PgmCursor cur{data, path.string()};

    if (data.size() < 2) cur.fail("truncated file, no magic number");
    const std::string magic = data.substr(0, 2);
    if (magic != "P2" && magic != "P5") {
        cur.fail("unsupported magic number '" + magic + "'");
    }
    cur.pos = 2;

    const long width = cur.parse_int("width");
    const long height = cur.parse_int("height");
    if (width <= 0 || height <= 0 || width * height > 100000000L) {
        cur.fail("invalid image dimensions " + std::to_string(width) + "x" +
                 std::to_string(height));
    }
    const long maxval = cur.parse_int("maxval");
    if (maxval <= 0 || maxval > 65535) {
        cur.fail("unsupported maxval " + std::to_string(maxval) +
                 " (must be in [1, 65535])");
    }

    Image img(static_cast<int>(width), static_cast<int>(height));
    const std::size_t count = img.pixels.size();

    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            const long v = cur.parse_int("pixel value");
            if (v > maxval) cur.fail("pixel value exceeds maxval");
            img.pixels[i] = static_cast<double>(v);
        }
    } else {
        // Exactly one whitespace byte separates the header from the raster.
        if (cur.eof() || !std::isspace(static_cast<unsigned char>(data[cur.pos]))) {
            cur.fail("malformed header, expected whitespace before raster");
        }
        ++cur.pos;
        const int bytes_per_sample = maxval > 255 ? 2 : 1;
        if (data.size() - cur.pos < count * bytes_per_sample) {
            cur.pos = data.size();
            cur.fail("truncated raster data");
        }
        for (std::size_t i = 0; i < count; ++i) {
            if (bytes_per_sample == 1) {
                img.pixels[i] = static_cast<unsigned char>(data[cur.pos++]);
            } else {
                const int hi = static_cast<unsigned char>(data[cur.pos++]);
                const int lo = static_cast<unsigned char>(data[cur.pos++]);
                img.pixels[i] = hi * 256 + lo;
            }
        }
    }
    return img;
}

namespace {

int clamp_round_byte(double v) {
    v = std::clamp(v, 0.0, 255.0);
    return static_cast<int>(std::floor(v + 0.5));
}

} // namespace

void write_pgm(const Image& img, const std::filesystem::path& path) {
    validate(img);
    std::string out = "P5\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.reserve(out.size() + img.pixels.size());
    for (double p : img.pixels) {
        out.push_back(static_cast<char>(clamp_round_byte(p)));
    }
    write_file_atomic(path, out);
}

std::array<int, 3> heatmap_color(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {0, 0, 128}, {0, 128, 255}, {0, 255, 0}, {255, 255, 0}, {255, 0, 0},
    }};
    t = std::clamp(t, 0.0, 1.0);
    const double scaled = t * 4.0;
    const int seg = std::min(static_cast<int>(scaled), 3);
    const double s = scaled - seg;
    std::array<int, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        const double v = stops[seg][c] + s * (stops[seg + 1][c] - stops[seg][c]);
        rgb[c] = static_cast<int>(std::floor(v + 0.5));
    }
    return rgb;
}

namespace {

std::string render_heatmap(const ScalarField& field, double lo, double hi) {
    validate(field);
    if (!(hi > lo)) {
        throw invalid_argument_error("heat map range requires hi > lo");
    }
    std::string out = "P6\n" + std::to_string(field.width) + " " +
                      std::to_string(field.height) + "\n255\n";
    out.reserve(out.size() + field.values.size() * 3);
    for (double v : field.values) {
        const auto rgb = heatmap_color((v - lo) / (hi - lo));
        out.push_back(static_cast<char>(rgb[0]));
        out.push_back(static_cast<char>(rgb[1]));
        out.push_back(static_cast<char>(rgb[2]));
    }
    return out;
}

void stamp_white(std::string& raster, std::size_t header, int w, int h, double x,
                 double y) {
    const int px = static_cast<int>(std::floor(x + 0.5));
    const int py = static_cast<int>(std::floor(y + 0.5));
    if (px < 0 || px >= w || py < 0 || py >= h) return;
    const std::size_t at = header + 3 * (static_cast<std::size_t>(py) * w + px);
    raster[at] = raster[at + 1] = raster[at + 2] = static_cast<char>(255);
}

} // namespace

void write_ppm_heatmap(const ScalarField& field, const std::filesystem::path& path,
                       double lo, double hi) {
    write_file_atomic(path, render_heatmap(field, lo, hi));
}

void write_ppm_heatmap_with_contours(const ScalarField& field,
                                     const std::vector<ContourSet>& contour_sets,
                                     const std::filesystem::path& path,
                                     double lo, double hi) {
    std::string out = render_heatmap(field, lo, hi);
    const std::size_t header = out.size() - field.values.size() * 3;
    for (const ContourSet& set : contour_sets) {
        for (const Contour& contour : set.contours) {
            const std::size_t n = contour.points.size();
            const std::size_t seg_count = contour.closed ? n : n - 1;
            for (std::size_t i = 0; i < seg_count; ++i) {
                const Vec2& a = contour.points[i];
                const Vec2& b = contour.points[(i + 1) % n];
                const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
                const int steps = std::max(1, static_cast<int>(std::ceil(len * 4)));
                for (int s = 0; s <= steps; ++s) {
                    const double t = static_cast<double>(s) / steps;
                    stamp_white(out, header, field.width, field.height,
                                a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]));
                }
            }
        }
    }
    write_file_atomic(path, out);
}

LabelImage to_label_image(const Image& img) {
    validate(img);
    LabelImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const long v = std::lround(img.pixels[i]);
        if (v < 0) {
            throw invalid_argument_error("label image contains a negative value");
        }
        out.labels[i] = static_cast<int>(v);
    }
    return out;
}

} // namespace ensreg
