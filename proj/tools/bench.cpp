// Benchmark comparing the OpenMP kernels against the serial reference
// implementations, checking agreement while timing both.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ensreg/ensemble.hpp"
#include "ensreg/reference.hpp"
#include "ensreg/rwir.hpp"
#include "ensreg/synth.hpp"

using namespace ensreg;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch())
        .count();
}

template <typename Fn>
double time_ms(Fn&& fn) {
    const double t0 = now_ms();
    fn();
    return now_ms() - t0;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    int size = 64;
    int grid_radius = 3;
    if (argc > 1) size = std::stoi(argv[1]);
    if (argc > 2) grid_radius = std::stoi(argv[2]);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif

    const Image moving = gaussian_blur(
        make_filled_circle(size, size, (size - 1) / 2.0, (size - 1) / 2.0,
                           size / 4.0, 200.0, 50.0),
        1.0);
    const Image fixed = warp_sinusoidal(moving, 2.0, size / 2.0);
    const DisplacementSet disps = make_grid_displacement_set(grid_radius);
    const RwirConfig cfg;
    std::printf("problem: %dx%d, K = %d\n\n", size, size, disps.size());

    PosteriorField like_par, like_ser;
    const double t_like_par =
        time_ms([&] { like_par = data_likelihood(fixed, moving, disps, cfg); });
    const double t_like_ser = time_ms(
        [&] { like_ser = reference::data_likelihood_serial(fixed, moving, disps, cfg); });
    std::printf("%-28s %9.2f ms   serial %9.2f ms   max|diff| %.3e\n",
                "data_likelihood", t_like_par, t_like_ser,
                max_abs_diff(like_par.probs, like_ser.probs));

    // Dense reference memory is quadratic in voxel count; keep it small.
    const int reg_size = std::min(size, 24);
    const Image reg_fixed = gaussian_blur(
        make_filled_circle(reg_size, reg_size, (reg_size - 1) / 2.0,
                           (reg_size - 1) / 2.0, reg_size / 4.0, 200.0, 50.0),
        1.0);
    const Image reg_moving = warp_sinusoidal(reg_fixed, 1.0, reg_size / 2.0);
    const PosteriorField reg_like =
        reference::data_likelihood_serial(reg_fixed, reg_moving, disps, cfg);
    PosteriorField reg_cg, reg_dense;
    const double t_reg_par =
        time_ms([&] { reg_cg = random_walker_solve_raw(reg_like, reg_fixed, cfg); });
    const double t_reg_ser =
        time_ms([&] { reg_dense = reference::random_walker_dense(reg_like, reg_fixed, cfg); });
    std::printf("%-28s %9.2f ms   dense  %9.2f ms   max|diff| %.3e  (%dx%d)\n",
                "random_walker (raw solves)", t_reg_par, t_reg_ser,
                max_abs_diff(reg_cg.probs, reg_dense.probs), reg_size, reg_size);

    const PosteriorField posterior = random_walker_regularize(like_par, fixed, cfg);
    ScalarField var_par, var_ser;
    const double t_push_par = time_ms([&] {
        var_par = ensemble_variance_map(pushforward_scalar(posterior, disps, moving));
    });
    const double t_push_ser = time_ms([&] {
        var_ser = reference::pushforward_variance_serial(posterior, disps, moving);
    });
    std::printf("%-28s %9.2f ms   serial %9.2f ms   max|diff| %.3e\n",
                "pushforward variance", t_push_par, t_push_ser,
                max_abs_diff(var_par.values, var_ser.values));
    return 0;
}
