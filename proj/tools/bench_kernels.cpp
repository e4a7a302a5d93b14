#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "deljet/kernels.hpp"
#include "deljet/rng.hpp"

using namespace deljet;
namespace k = deljet::kernels;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clock_type::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void bench_gemm(std::size_t M, std::size_t N, std::size_t K) {
    Rng rng(7);
    auto A = random_vec(M * K, rng);
    auto B = random_vec(K * N, rng);
    std::vector<double> C(M * N);
    double flops = 2.0 * (double)M * (double)N * (double)K;

    double ts = time_best_of(3, [&] { k::gemm_serial(M, N, K, A.data(), B.data(), C.data()); });
    double tp = time_best_of(3, [&] { k::gemm_parallel(M, N, K, A.data(), B.data(), C.data()); });
    std::printf("gemm   %4zux%4zux%4zu  serial %7.2f GF/s  parallel %7.2f GF/s  speedup %.2fx\n",
                M, N, K, flops / ts / 1e9, flops / tp / 1e9, ts / tp);
}

void bench_im2col(std::size_t batch, std::size_t C, std::size_t H, std::size_t W) {
    const std::size_t kh = 3, kw = 3, stride = 1, pad = 1;
    Rng rng(11);
    auto img = random_vec(batch * C * H * W, rng);
    std::size_t oh = k::conv_out_extent(H, kh, stride, pad);
    std::size_t ow = k::conv_out_extent(W, kw, stride, pad);
    std::vector<double> cols(batch * oh * ow * C * kh * kw);
    std::vector<double> dimg(img.size());

    double ts = time_best_of(5, [&] {
        k::im2col_serial(img.data(), batch, C, H, W, kh, kw, stride, pad, cols.data());
    });
    double tp = time_best_of(5, [&] {
        k::im2col_parallel(img.data(), batch, C, H, W, kh, kw, stride, pad, cols.data());
    });
    std::printf("im2col %4zux%2zux%2zux%2zu  serial %8.3f ms    parallel %8.3f ms    speedup %.2fx\n",
                batch, C, H, W, ts * 1e3, tp * 1e3, ts / tp);

    ts = time_best_of(5, [&] {
        std::fill(dimg.begin(), dimg.end(), 0.0);
        k::col2im_serial(cols.data(), batch, C, H, W, kh, kw, stride, pad, dimg.data());
    });
    tp = time_best_of(5, [&] {
        std::fill(dimg.begin(), dimg.end(), 0.0);
        k::col2im_parallel(cols.data(), batch, C, H, W, kh, kw, stride, pad, dimg.data());
    });
    std::printf("col2im %4zux%2zux%2zux%2zu  serial %8.3f ms    parallel %8.3f ms    speedup %.2fx\n",
                batch, C, H, W, ts * 1e3, tp * 1e3, ts / tp);
}

}  // namespace

int main() {
    std::printf("kernel benchmark: serial reference vs OpenMP backend\n\n");
    bench_gemm(256, 256, 256);
    bench_gemm(512, 512, 512);
    bench_gemm(1024, 1024, 1024);
    bench_gemm(32, 200, 397);  // body training shape
    std::printf("\n");
    bench_im2col(256, 8, 8, 9);
    bench_im2col(512, 16, 4, 4);
    return 0;
}
