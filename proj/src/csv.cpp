#include "ensreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fs_util.hpp"

namespace ensreg {

using detail::read_file;
using detail::write_file_atomic;

std::string csv_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

void write_csv(const ScalarField& field, const std::filesystem::path& path) {
    validate(field);
    std::string out = "x,y,value\n";
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            out += std::to_string(x) + "," + std::to_string(y) + "," +
                   csv_real(field.at(x, y)) + "\n";
        }
    }
    write_file_atomic(path, out);
}

void write_csv(const PosteriorField& post, const std::filesystem::path& path) {
    std::string out = "x,y,k,p\n";
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            const auto probs = post.at(x, y);
            for (int k = 0; k < post.num_displacements; ++k) {
                out += std::to_string(x) + "," + std::to_string(y) + "," +
                       std::to_string(k) + "," + csv_real(probs[k]) + "\n";
            }
        }
    }
    write_file_atomic(path, out);
}

namespace {

std::string value_column(double v) { return csv_real(v); }
std::string value_column(int v) { return std::to_string(v); }
std::string value_column(const Vec2& v) {
    return csv_real(v[0]) + ";" + csv_real(v[1]);
}

template <typename V>
void write_ensemble_csv(const EnsembleField<V>& field,
                        const std::filesystem::path& path) {
    std::string out = "x,y,value,weight\n";
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            for (const auto& r : field.cell(x, y)) {
                out += std::to_string(x) + "," + std::to_string(y) + "," +
                       value_column(r.value) + "," + csv_real(r.weight) + "\n";
            }
        }
    }
    write_file_atomic(path, out);
}

} // namespace

void write_csv(const ScalarEnsembleField& field, const std::filesystem::path& path) {
    write_ensemble_csv(field, path);
}
void write_csv(const LabelEnsembleField& field, const std::filesystem::path& path) {
    write_ensemble_csv(field, path);
}
void write_csv(const VectorEnsembleField& field, const std::filesystem::path& path) {
    write_ensemble_csv(field, path);
}

void write_contours_csv(const std::vector<ContourSet>& sets,
                        const std::filesystem::path& path) {
    std::string out = "level,contour,point,x,y,closed\n";
    for (const ContourSet& set : sets) {
        for (std::size_t c = 0; c < set.contours.size(); ++c) {
            const Contour& contour = set.contours[c];
            for (std::size_t p = 0; p < contour.points.size(); ++p) {
                out += csv_real(set.level) + "," + std::to_string(c) + "," +
                       std::to_string(p) + "," + csv_real(contour.points[p][0]) +
                       "," + csv_real(contour.points[p][1]) + "," +
                       (contour.closed ? "1" : "0") + "\n";
            }
        }
    }
    write_file_atomic(path, out);
}

namespace {

// Line-oriented CSV cursor with offset-carrying errors.
struct CsvCursor {
    std::string data;
    std::string name;
    std::size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= data.size(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(name + ":" + std::to_string(line) + ": " + msg, pos);
    }

    // Returns false at end of input; skips blank lines.
    bool next_line(std::vector<std::string>& fields) {
        fields.clear();
        while (!eof()) {
            std::size_t end = data.find('\n', pos);
            if (end == std::string::npos) end = data.size();
            if (end > pos) {
                std::string_view row(data.data() + pos, end - pos);
                if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
                if (!row.empty()) {
                    std::size_t start = 0;
                    while (true) {
                        const std::size_t comma = row.find(',', start);
                        if (comma == std::string_view::npos) {
                            fields.emplace_back(row.substr(start));
                            break;
                        }
                        fields.emplace_back(row.substr(start, comma - start));
                        start = comma + 1;
                    }
                    pos = end + 1;
                    ++line;
                    return true;
                }
            }
            pos = end + 1;
            ++line;
        }
        return false;
    }

    int parse_int(const std::string& s) {
        int v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            fail("expected an integer, got '" + s + "'");
        }
        return v;
    }

    double parse_real(const std::string& s) {
        try {
            std::size_t consumed = 0;
            const double v = std::stod(s, &consumed);
            if (consumed != s.size()) fail("trailing junk in number '" + s + "'");
            return v;
        } catch (const std::exception&) {
            fail("expected a real number, got '" + s + "'");
        }
    }
};

} // namespace

PosteriorField read_posterior_csv(const std::filesystem::path& path) {
    CsvCursor cur{read_file(path), path.string()};
    std::vector<std::string> fields;
    if (!cur.next_line(fields) || fields.size() != 4 || fields[0] != "x") {
        cur.fail("expected header 'x,y,k,p'");
    }

    struct Row {
        int x, y, k;
        double p;
    };
    std::vector<Row> rows;
    int w = 0, h = 0, k_count = 0;
    while (cur.next_line(fields)) {
        if (fields.size() != 4) cur.fail("expected 4 columns");
        Row r{cur.parse_int(fields[0]), cur.parse_int(fields[1]),
              cur.parse_int(fields[2]), cur.parse_real(fields[3])};
        if (r.x < 0 || r.y < 0 || r.k < 0) cur.fail("negative coordinate or index");
        w = std::max(w, r.x + 1);
        h = std::max(h, r.y + 1);
        k_count = std::max(k_count, r.k + 1);
        rows.push_back(r);
    }
    if (rows.empty()) cur.fail("no posterior rows");

    PosteriorField post(w, h, k_count);
    std::vector<bool> seen(post.probs.size(), false);
    for (const Row& r : rows) {
        const std::size_t at = post.offset(r.x, r.y) + r.k;
        if (seen[at]) {
            throw parse_error(path.string() + ": duplicate posterior row for (" +
                                  std::to_string(r.x) + "," + std::to_string(r.y) +
                                  ",k=" + std::to_string(r.k) + ")",
                              0);
        }
        seen[at] = true;
        post.probs[at] = r.p;
    }
    for (bool s : seen) {
        if (!s) {
            throw parse_error(path.string() + ": incomplete posterior, " +
                                  "some voxel/displacement entries are missing",
                              0);
        }
    }
    // The 9-decimal file format quantizes probabilities; check the sums
    // loosely, then renormalize to restore the exact unity-sum invariant.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto probs = post.at(x, y);
            double sum = 0.0;
            for (double p : probs) {
                if (p < 0.0 || p > 1.0) {
                    throw parse_error(path.string() + ": probability outside [0, 1]", 0);
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                throw parse_error(path.string() + ": voxel (" + std::to_string(x) +
                                      "," + std::to_string(y) +
                                      ") does not sum to 1 (sum = " +
                                      std::to_string(sum) + ")",
                                  0);
            }
            for (double& p : probs) p /= sum;
        }
    }
    validate(post);
    return post;
}

ScalarEnsembleField read_scalar_ensemble_csv(const std::filesystem::path& path) {
    CsvCursor cur{read_file(path), path.string()};
    std::vector<std::string> fields;
    if (!cur.next_line(fields) || fields.size() != 4 || fields[0] != "x") {
        cur.fail("expected header 'x,y,value,weight'");
    }

    struct Row {
        int x, y;
        double value, weight;
    };
    std::vector<Row> rows;
    int w = 0, h = 0;
    while (cur.next_line(fields)) {
        if (fields.size() != 4) cur.fail("expected 4 columns");
        if (fields[2].find(';') != std::string::npos) {
            cur.fail("vector-valued ensemble where a scalar ensemble is required");
        }
        Row r{cur.parse_int(fields[0]), cur.parse_int(fields[1]),
              cur.parse_real(fields[2]), cur.parse_real(fields[3])};
        if (r.x < 0 || r.y < 0) cur.fail("negative coordinate");
        w = std::max(w, r.x + 1);
        h = std::max(h, r.y + 1);
        rows.push_back(r);
    }
    if (rows.empty()) cur.fail("no ensemble rows");

    ScalarEnsembleField field(w, h);
    for (const Row& r : rows) {
        field.cell(r.x, r.y).push_back({r.value, r.weight});
    }
    for (auto& cell : field.cells) {
        if (cell.empty()) {
            throw parse_error(path.string() + ": incomplete ensemble, " +
                                  "some voxels carry no realizations",
                              0);
        }
        double sum = 0.0;
        for (const auto& r : cell) {
            if (!(r.weight > 0.0 && r.weight <= 1.0)) {
                throw parse_error(path.string() + ": ensemble weight outside (0, 1]", 0);
            }
            sum += r.weight;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw parse_error(path.string() + ": ensemble cell weights do not sum to 1",
                              0);
        }
        for (auto& r : cell) r.weight /= sum; // absorb 9-decimal quantization
    }
    validate(field);
    return field;
}

} // namespace ensreg
