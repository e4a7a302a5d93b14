#include <doctest.h>

#include <array>
#include <vector>

#include "deljet/kernels.hpp"
#include "deljet/rng.hpp"

using namespace deljet;
namespace k = deljet::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

// Textbook triple loop, accumulation order identical to gemm_serial.
void gemm_naive(std::size_t M, std::size_t N, std::size_t K, const double* A,
                const double* B, double* C) {
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < K; ++p) acc += A[i * K + p] * B[p * N + j];
            C[i * N + j] = acc;
        }
}

}  // namespace

TEST_CASE("gemm serial matches naive oracle") {
    // Tight tolerance rather than bit equality: the library may fuse
    // multiply-adds while this translation unit does not.
    Rng rng(1);
    using Dims = std::array<std::size_t, 3>;
    for (auto [M, N, K] : {Dims{1, 1, 1}, Dims{3, 5, 7}, Dims{17, 9, 33}, Dims{64, 64, 64}}) {
        auto A = random_vec(M * K, rng);
        auto B = random_vec(K * N, rng);
        std::vector<double> C1(M * N), C2(M * N);
        gemm_naive(M, N, K, A.data(), B.data(), C1.data());
        k::gemm_serial(M, N, K, A.data(), B.data(), C2.data());
        for (std::size_t i = 0; i < C1.size(); ++i)
            CHECK(C2[i] == doctest::Approx(C1[i]).epsilon(1e-13));
    }
}

TEST_CASE("gemm parallel is bit-identical to serial") {
    Rng rng(2);
    using Dims = std::array<std::size_t, 3>;
    for (auto [M, N, K] : {Dims{1, 1, 1}, Dims{2, 3, 4}, Dims{5, 17, 3},
                           Dims{32, 397, 200}, Dims{100, 128, 71}, Dims{129, 65, 33}}) {
        auto A = random_vec(M * K, rng);
        auto B = random_vec(K * N, rng);
        std::vector<double> Cs(M * N), Cp(M * N);
        k::gemm_serial(M, N, K, A.data(), B.data(), Cs.data());
        k::gemm_parallel(M, N, K, A.data(), B.data(), Cp.data());
        CHECK(Cs == Cp);
    }
}

TEST_CASE("gemm known 2x2 product") {
    std::vector<double> A{1, 2, 3, 4}, B{5, 6, 7, 8}, C(4);
    k::gemm(2, 2, 2, A.data(), B.data(), C.data());
    CHECK(C == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("transpose") {
    std::vector<double> A{1, 2, 3, 4, 5, 6}, At(6);
    k::transpose(2, 3, A.data(), At.data());
    CHECK(At == std::vector<double>{1, 4, 2, 5, 3, 6});
}

TEST_CASE("im2col/col2im parallel bit-identical to serial") {
    Rng rng(3);
    const std::size_t B = 5, C = 3, H = 7, W = 6, kh = 3, kw = 2, stride = 2, pad = 1;
    auto img = random_vec(B * C * H * W, rng);
    std::size_t oh = k::conv_out_extent(H, kh, stride, pad);
    std::size_t ow = k::conv_out_extent(W, kw, stride, pad);
    std::vector<double> cs(B * oh * ow * C * kh * kw), cp(cs.size());
    k::im2col_serial(img.data(), B, C, H, W, kh, kw, stride, pad, cs.data());
    k::im2col_parallel(img.data(), B, C, H, W, kh, kw, stride, pad, cp.data());
    CHECK(cs == cp);

    std::vector<double> ds(img.size(), 0.0), dp(img.size(), 0.0);
    k::col2im_serial(cs.data(), B, C, H, W, kh, kw, stride, pad, ds.data());
    k::col2im_parallel(cs.data(), B, C, H, W, kh, kw, stride, pad, dp.data());
    CHECK(ds == dp);
}

TEST_CASE("im2col 1x1 kernel on 2x2 image is the identity layout") {
    std::vector<double> img{1, 2, 3, 4};
    std::vector<double> cols(4);
    k::im2col(img.data(), 1, 1, 2, 2, 1, 1, 1, 0, cols.data());
    CHECK(cols == img);
}

TEST_CASE("col2im accumulates overlapping windows") {
    // 1x1x2x2 image, 2x2 kernel, stride 1, pad 1 -> 3x3 output positions; every
    // input pixel is visited by exactly 4 windows.
    std::size_t oh = k::conv_out_extent(2, 2, 1, 1);
    REQUIRE(oh == 3);
    std::vector<double> cols(oh * oh * 4, 1.0);
    std::vector<double> dimg(4, 0.0);
    k::col2im(cols.data(), 1, 1, 2, 2, 2, 2, 1, 1, dimg.data());
    CHECK(dimg == std::vector<double>{4, 4, 4, 4});
}

TEST_CASE("maxpool forward/backward") {
    // 1x1x2x2, pool 2x2 stride 2.
    std::vector<double> img{1, 2, 3, 4}, out(1);
    std::vector<std::int64_t> argmax(1);
    k::maxpool_forward(img.data(), 1, 1, 2, 2, 2, 2, 2, out.data(), argmax.data());
    CHECK(out[0] == 4.0);
    CHECK(argmax[0] == 3);

    std::vector<double> dout{2.5}, dimg(4, 0.0);
    k::maxpool_backward(dout.data(), argmax.data(), 1, 4, dimg.data());
    CHECK(dimg == std::vector<double>{0, 0, 0, 2.5});
}

TEST_CASE("maxpool ties go to the first element in scan order") {
    std::vector<double> img{7, 7, 7, 7}, out(1);
    std::vector<std::int64_t> argmax(1);
    k::maxpool_forward(img.data(), 1, 1, 2, 2, 2, 2, 2, out.data(), argmax.data());
    CHECK(argmax[0] == 0);
}

TEST_CASE("out extents") {
    CHECK(k::conv_out_extent(8, 3, 1, 1) == 8);
    CHECK(k::conv_out_extent(9, 3, 1, 0) == 7);
    CHECK(k::pool_out_extent(8, 2, 2) == 4);
    CHECK(k::pool_out_extent(7, 2, 2) == 3);
}

TEST_CASE("backend dispatch respects the selected backend") {
    Rng rng(4);
    auto A = random_vec(9, rng), B = random_vec(9, rng);
    std::vector<double> Cs(9), Cp(9);
    auto saved = k::backend();
    k::set_backend(k::Backend::Serial);
    k::gemm(3, 3, 3, A.data(), B.data(), Cs.data());
    k::set_backend(k::Backend::Parallel);
    k::gemm(3, 3, 3, A.data(), B.data(), Cp.data());
    k::set_backend(saved);
    CHECK(Cs == Cp);
}
