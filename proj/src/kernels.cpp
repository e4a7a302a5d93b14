#include "deljet/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

namespace deljet::kernels {

namespace {

Backend g_backend = Backend::Parallel;

typedef double vec8 __attribute__((vector_size(64)));

inline vec8 load8(const double* p) {
    vec8 r;
    std::memcpy(&r, p, sizeof(r));
    return r;
}

inline void store8(double* p, vec8 v) { std::memcpy(p, &v, sizeof(v)); }

// 4x16 register-tiled microkernel; accumulators live in 8 vector registers.
template <int TI>
inline void micro4x16(std::size_t N, std::size_t K, const double* A, std::size_t lda,
                      const double* B, double* C, std::size_t ldc) {
    vec8 acc[TI][2] = {};
    for (std::size_t k = 0; k < K; ++k) {
        const double* b = B + k * N;
        vec8 b0 = load8(b), b1 = load8(b + 8);
        for (int ii = 0; ii < TI; ++ii) {
            vec8 a = vec8{} + A[ii * lda + k];
            acc[ii][0] += a * b0;
            acc[ii][1] += a * b1;
        }
    }
    for (int ii = 0; ii < TI; ++ii) {
        store8(C + ii * ldc, acc[ii][0]);
        store8(C + ii * ldc + 8, acc[ii][1]);
    }
}

template <int TI>
inline void micro4x8(std::size_t N, std::size_t K, const double* A, std::size_t lda,
                     const double* B, double* C, std::size_t ldc) {
    vec8 acc[TI] = {};
    for (std::size_t k = 0; k < K; ++k) {
        vec8 b0 = load8(B + k * N);
        for (int ii = 0; ii < TI; ++ii) acc[ii] += (vec8{} + A[ii * lda + k]) * b0;
    }
    for (int ii = 0; ii < TI; ++ii) store8(C + ii * ldc, acc[ii]);
}

inline void gemm_rows(std::size_t i0, std::size_t i1, std::size_t M, std::size_t N,
                      std::size_t K, const double* A, const double* B, double* C) {
    (void)M;
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) {
        std::size_t j = 0;
        for (; j + 16 <= N; j += 16)
            micro4x16<4>(N, K, A + i * K, K, B + j, C + i * N + j, N);
        for (; j + 8 <= N; j += 8)
            micro4x8<4>(N, K, A + i * K, K, B + j, C + i * N + j, N);
        for (; j < N; ++j) {
            for (int ii = 0; ii < 4; ++ii) {
                double s = 0;
                const double* a = A + (i + ii) * K;
                for (std::size_t k = 0; k < K; ++k) s += a[k] * B[k * N + j];
                C[(i + ii) * N + j] = s;
            }
        }
    }
    for (; i < i1; ++i) {
        std::size_t j = 0;
        for (; j + 8 <= N; j += 8) micro4x8<1>(N, K, A + i * K, K, B + j, C + i * N + j, N);
        for (; j < N; ++j) {
            double s = 0;
            const double* a = A + i * K;
            for (std::size_t k = 0; k < K; ++k) s += a[k] * B[k * N + j];
            C[i * N + j] = s;
        }
    }
}

}  // namespace

Backend backend() { return g_backend; }
void set_backend(Backend b) { g_backend = b; }

void gemm_serial(std::size_t M, std::size_t N, std::size_t K,
                 const double* A, const double* B, double* C) {
    // Plain jik reference, kept simple on purpose.
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < K; ++k) s += A[i * K + k] * B[k * N + j];
            C[i * N + j] = s;
        }
}

void gemm_parallel(std::size_t M, std::size_t N, std::size_t K,
                   const double* A, const double* B, double* C) {
    // Row blocks of 4 so each thread owns whole microkernel tiles.
    std::size_t nblocks = (M + 3) / 4;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)nblocks; ++b) {
        std::size_t i0 = (std::size_t)b * 4;
        std::size_t i1 = std::min(i0 + 4, M);
        gemm_rows(i0, i1, M, N, K, A, B, C);
    }
}

void gemm(std::size_t M, std::size_t N, std::size_t K,
          const double* A, const double* B, double* C) {
    if (g_backend == Backend::Parallel)
        gemm_parallel(M, N, K, A, B, C);
    else
        gemm_rows(0, M, M, N, K, A, B, C);
}

void transpose(std::size_t M, std::size_t N, const double* A, double* At) {
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < N; ++j) At[j * M + i] = A[i * N + j];
}

std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride,
                            std::size_t pad) {
    return (in + 2 * pad - k) / stride + 1;
}

std::size_t pool_out_extent(std::size_t in, std::size_t k, std::size_t stride) {
    return (in - k) / stride + 1;
}

namespace {

inline void im2col_sample(const double* img, std::size_t C, std::size_t H, std::size_t W,
                          std::size_t kh, std::size_t kw, std::size_t stride,
                          std::size_t pad, std::size_t oh, std::size_t ow, double* cols) {
    // cols rows: oh*ow patch positions; cols: C*kh*kw.
    std::size_t patch = C * kh * kw;
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            double* row = cols + (y * ow + x) * patch;
            std::size_t idx = 0;
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t dy = 0; dy < kh; ++dy)
                    for (std::size_t dx = 0; dx < kw; ++dx, ++idx) {
                        std::ptrdiff_t iy = (std::ptrdiff_t)(y * stride + dy) - (std::ptrdiff_t)pad;
                        std::ptrdiff_t ix = (std::ptrdiff_t)(x * stride + dx) - (std::ptrdiff_t)pad;
                        row[idx] = (iy < 0 || iy >= (std::ptrdiff_t)H || ix < 0 ||
                                    ix >= (std::ptrdiff_t)W)
                                       ? 0.0
                                       : img[(c * H + iy) * W + ix];
                    }
        }
}

inline void col2im_sample(const double* cols, std::size_t C, std::size_t H, std::size_t W,
                          std::size_t kh, std::size_t kw, std::size_t stride,
                          std::size_t pad, std::size_t oh, std::size_t ow, double* dimg) {
    std::size_t patch = C * kh * kw;
    for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) {
            const double* row = cols + (y * ow + x) * patch;
            std::size_t idx = 0;
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t dy = 0; dy < kh; ++dy)
                    for (std::size_t dx = 0; dx < kw; ++dx, ++idx) {
                        std::ptrdiff_t iy = (std::ptrdiff_t)(y * stride + dy) - (std::ptrdiff_t)pad;
                        std::ptrdiff_t ix = (std::ptrdiff_t)(x * stride + dx) - (std::ptrdiff_t)pad;
                        if (iy >= 0 && iy < (std::ptrdiff_t)H && ix >= 0 && ix < (std::ptrdiff_t)W)
                            dimg[(c * H + iy) * W + ix] += row[idx];
                    }
        }
}

}  // namespace

void im2col_serial(const double* img, std::size_t batch, std::size_t C, std::size_t H,
                   std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
                   std::size_t pad, double* cols) {
    std::size_t oh = conv_out_extent(H, kh, stride, pad);
    std::size_t ow = conv_out_extent(W, kw, stride, pad);
    std::size_t per = oh * ow * C * kh * kw;
    for (std::size_t b = 0; b < batch; ++b)
        im2col_sample(img + b * C * H * W, C, H, W, kh, kw, stride, pad, oh, ow,
                      cols + b * per);
}

void im2col_parallel(const double* img, std::size_t batch, std::size_t C, std::size_t H,
                     std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
                     std::size_t pad, double* cols) {
    std::size_t oh = conv_out_extent(H, kh, stride, pad);
    std::size_t ow = conv_out_extent(W, kw, stride, pad);
    std::size_t per = oh * ow * C * kh * kw;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)batch; ++b)
        im2col_sample(img + b * C * H * W, C, H, W, kh, kw, stride, pad, oh, ow,
                      cols + b * per);
}

void im2col(const double* img, std::size_t batch, std::size_t C, std::size_t H,
            std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
            std::size_t pad, double* cols) {
    (g_backend == Backend::Parallel ? im2col_parallel : im2col_serial)(
        img, batch, C, H, W, kh, kw, stride, pad, cols);
}

void col2im_serial(const double* cols, std::size_t batch, std::size_t C, std::size_t H,
                   std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
                   std::size_t pad, double* dimg) {
    std::size_t oh = conv_out_extent(H, kh, stride, pad);
    std::size_t ow = conv_out_extent(W, kw, stride, pad);
    std::size_t per = oh * ow * C * kh * kw;
    for (std::size_t b = 0; b < batch; ++b)
        col2im_sample(cols + b * per, C, H, W, kh, kw, stride, pad, oh, ow,
                      dimg + b * C * H * W);
}

void col2im_parallel(const double* cols, std::size_t batch, std::size_t C, std::size_t H,
                     std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
                     std::size_t pad, double* dimg) {
    std::size_t oh = conv_out_extent(H, kh, stride, pad);
    std::size_t ow = conv_out_extent(W, kw, stride, pad);
    std::size_t per = oh * ow * C * kh * kw;
    // Sample-owned scatter: overlapping writes stay within one thread.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < (std::ptrdiff_t)batch; ++b)
        col2im_sample(cols + b * per, C, H, W, kh, kw, stride, pad, oh, ow,
                      dimg + b * C * H * W);
}

void col2im(const double* cols, std::size_t batch, std::size_t C, std::size_t H,
            std::size_t W, std::size_t kh, std::size_t kw, std::size_t stride,
            std::size_t pad, double* dimg) {
    (g_backend == Backend::Parallel ? col2im_parallel : col2im_serial)(
        cols, batch, C, H, W, kh, kw, stride, pad, dimg);
}

void maxpool_forward(const double* img, std::size_t batch, std::size_t C, std::size_t H,
                     std::size_t W, std::size_t ph, std::size_t pw, std::size_t stride,
                     double* out, std::int64_t* argmax) {
    std::size_t oh = pool_out_extent(H, ph, stride);
    std::size_t ow = pool_out_extent(W, pw, stride);
    std::size_t planes = batch * C;
#pragma omp parallel for schedule(static) if (g_backend == Backend::Parallel)
    for (std::ptrdiff_t p = 0; p < (std::ptrdiff_t)planes; ++p) {
        const double* in = img + (std::size_t)p * H * W;
        double* o = out + (std::size_t)p * oh * ow;
        std::int64_t* am = argmax + (std::size_t)p * oh * ow;
        for (std::size_t y = 0; y < oh; ++y)
            for (std::size_t x = 0; x < ow; ++x) {
                double best = -std::numeric_limits<double>::infinity();
                std::int64_t bi = -1;
                for (std::size_t dy = 0; dy < ph; ++dy)
                    for (std::size_t dx = 0; dx < pw; ++dx) {
                        std::size_t idx = (y * stride + dy) * W + (x * stride + dx);
                        if (in[idx] > best) {
                            best = in[idx];
                            bi = (std::int64_t)((std::size_t)p * H * W + idx);
                        }
                    }
                o[y * ow + x] = best;
                am[y * ow + x] = bi;
            }
    }
}

void maxpool_backward(const double* dout, const std::int64_t* argmax,
                      std::size_t out_count, std::size_t in_count, double* dimg) {
    std::fill(dimg, dimg + in_count, 0.0);
    for (std::size_t i = 0; i < out_count; ++i) dimg[argmax[i]] += dout[i];
}

}  // namespace deljet::kernels
