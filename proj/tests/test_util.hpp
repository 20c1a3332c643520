#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "ensreg/synth.hpp"
#include "ensreg/types.hpp"

namespace test_util {

// Unique directory under the system temp dir; removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ensreg_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

inline ensreg::Image random_image(ensreg::NoiseGenerator& gen, int w, int h,
                                  double scale) {
    ensreg::Image img(w, h);
    for (double& p : img.pixels) p = gen.next_unit() * scale;
    return img;
}

// Intensities on an exactly representable lattice (multiples of 0.5), so
// value collisions are bit-exact and aggregation groups are unambiguous.
inline ensreg::Image lattice_image(ensreg::NoiseGenerator& gen, int w, int h) {
    ensreg::Image img(w, h);
    for (double& p : img.pixels) {
        p = 0.5 * static_cast<double>(gen.next_u32() % 16);
    }
    return img;
}

inline ensreg::LabelImage random_labels(ensreg::NoiseGenerator& gen, int w, int h,
                                        int max_label) {
    ensreg::LabelImage img(w, h);
    for (int& l : img.labels) l = static_cast<int>(gen.next_u32() % (max_label + 1));
    return img;
}

inline ensreg::PosteriorField random_posterior(ensreg::NoiseGenerator& gen, int w,
                                               int h, int k) {
    ensreg::PosteriorField post(w, h, k);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto probs = post.at(x, y);
            double sum = 0.0;
            for (int i = 0; i < k; ++i) {
                probs[i] = 0.05 + gen.next_unit();
                sum += probs[i];
            }
            for (int i = 0; i < k; ++i) probs[i] /= sum;
        }
    }
    return post;
}

inline ensreg::DisplacementSet random_displacements(ensreg::NoiseGenerator& gen,
                                                    int k, int radius) {
    std::set<std::pair<int, int>> seen;
    ensreg::DisplacementSet disps;
    while (disps.size() < k) {
        const int span = 2 * radius + 1;
        const int dx = static_cast<int>(gen.next_u32() % span) - radius;
        const int dy = static_cast<int>(gen.next_u32() % span) - radius;
        if (seen.insert({dx, dy}).second) {
            disps.vectors.push_back({dx, dy});
        }
    }
    return disps;
}

} // namespace test_util
