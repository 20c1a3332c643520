#include "ensreg/contour.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace ensreg {

namespace {

struct Segment {
    Vec2 a, b;
};

// Shared cell edges are interpolated with one canonical corner order, so the
// same geometric edge yields bit-identical points in both adjacent cells.
Vec2 edge_point(double level, Vec2 pa, double fa, Vec2 pb, double fb) {
    const double t = (level - fa) / (fb - fa);
    return {pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])};
}

using PointKey = std::pair<std::uint64_t, std::uint64_t>;

PointKey key_of(const Vec2& p) {
    return {std::bit_cast<std::uint64_t>(p[0]), std::bit_cast<std::uint64_t>(p[1])};
}

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        return std::hash<std::uint64_t>{}(k.first * 1000003 + k.second);
    }
};

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double abx = b[0] - a[0];
    const double aby = b[1] - a[1];
    const double len2 = abx * abx + aby * aby;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double dx = p[0] - (a[0] + t * abx);
    const double dy = p[1] - (a[1] + t * aby);
    return std::sqrt(dx * dx + dy * dy);
}

double directed_hausdorff(const ContourSet& from, const ContourSet& to) {
    double worst = 0.0;
    for (const Contour& src : from.contours) {
        for (const Vec2& p : src.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const Contour& dst : to.contours) {
                const std::size_t n = dst.points.size();
                const std::size_t seg_count = dst.closed ? n : n - 1;
                for (std::size_t i = 0; i < seg_count; ++i) {
                    best = std::min(best, point_segment_distance(
                                              p, dst.points[i], dst.points[(i + 1) % n]));
                }
            }
            worst = std::max(worst, best);
        }
    }
    return worst;
}

} // namespace

ContourSet iso_contours(const ScalarField& map, double level) {
    validate(map);
    if (!std::isfinite(level)) {
        throw invalid_argument_error("contour level must be finite");
    }
    ContourSet result;
    result.level = level;
    if (map.width < 2 || map.height < 2) {
        return result;
    }

    std::vector<Segment> segments;
    for (int j = 0; j + 1 < map.height; ++j) {
        for (int i = 0; i + 1 < map.width; ++i) {
            const double f00 = map.at(i, j);
            const double f10 = map.at(i + 1, j);
            const double f11 = map.at(i + 1, j + 1);
            const double f01 = map.at(i, j + 1);
            const int config = (f00 >= level ? 1 : 0) | (f10 >= level ? 2 : 0) |
                               (f11 >= level ? 4 : 0) | (f01 >= level ? 8 : 0);
            if (config == 0 || config == 15) continue;

            const Vec2 c0{double(i), double(j)};
            const Vec2 c1{double(i + 1), double(j)};
            const Vec2 c2{double(i + 1), double(j + 1)};
            const Vec2 c3{double(i), double(j + 1)};
            // Canonical corner order per geometric edge: top-left first.
            auto top = [&] { return edge_point(level, c0, f00, c1, f10); };
            auto right = [&] { return edge_point(level, c1, f10, c2, f11); };
            auto bottom = [&] { return edge_point(level, c3, f01, c2, f11); };
            auto left = [&] { return edge_point(level, c0, f00, c3, f01); };

            auto emit = [&](Vec2 a, Vec2 b) {
                if (key_of(a) != key_of(b)) segments.push_back({a, b});
            };

            switch (config) {
                case 1: case 14: emit(top(), left()); break;
                case 2: case 13: emit(top(), right()); break;
                case 3: case 12: emit(left(), right()); break;
                case 4: case 11: emit(right(), bottom()); break;
                case 6: case 9: emit(top(), bottom()); break;
                case 7: case 8: emit(left(), bottom()); break;
                case 5: { // saddle: inside corners c0 and c2
                    const double center = 0.25 * (f00 + f10 + f11 + f01);
                    if (center >= level) {
                        emit(top(), right());
                        emit(left(), bottom());
                    } else {
                        emit(top(), left());
                        emit(right(), bottom());
                    }
                    break;
                }
                case 10: { // saddle: inside corners c1 and c3
                    const double center = 0.25 * (f00 + f10 + f11 + f01);
                    if (center >= level) {
                        emit(top(), left());
                        emit(right(), bottom());
                    } else {
                        emit(top(), right());
                        emit(left(), bottom());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // Stitch segments into polylines by exact endpoint matching.
    std::unordered_map<PointKey, std::vector<int>, PointKeyHash> by_endpoint;
    for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
        by_endpoint[key_of(segments[s].a)].push_back(s);
        by_endpoint[key_of(segments[s].b)].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);

    auto take_next = [&](const Vec2& tip) -> int {
        auto it = by_endpoint.find(key_of(tip));
        if (it == by_endpoint.end()) return -1;
        for (int s : it->second) {
            if (!used[s]) return s;
        }
        return -1;
    };

    for (int start = 0; start < static_cast<int>(segments.size()); ++start) {
        if (used[start]) continue;
        used[start] = true;
        std::vector<Vec2> chain{segments[start].a, segments[start].b};

        // Grow forward from the back, then backward from the front.
        for (int pass = 0; pass < 2; ++pass) {
            while (true) {
                const Vec2 tip = pass == 0 ? chain.back() : chain.front();
                const int s = take_next(tip);
                if (s < 0) break;
                used[s] = true;
                const Vec2 next =
                    key_of(segments[s].a) == key_of(tip) ? segments[s].b : segments[s].a;
                if (pass == 0) {
                    chain.push_back(next);
                } else {
                    chain.insert(chain.begin(), next);
                }
                if (key_of(chain.front()) == key_of(chain.back())) break;
            }
            if (key_of(chain.front()) == key_of(chain.back())) break;
        }

        Contour contour;
        contour.closed =
            chain.size() > 2 && key_of(chain.front()) == key_of(chain.back());
        if (contour.closed) chain.pop_back();
        contour.points = std::move(chain);
        if (contour.points.size() >= 2) {
            result.contours.push_back(std::move(contour));
        }
    }
    return result;
}

double hausdorff_distance(const ContourSet& a, const ContourSet& b) {
    if (a.contours.empty() || b.contours.empty()) {
        throw invalid_argument_error("hausdorff distance of an empty contour set");
    }
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace ensreg
