#ifndef DELJET_KERNELS_HPP
#define DELJET_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace deljet::kernels {

// Every parallel kernel is owner-computes: each output element is written by
// exactly one thread and inner reductions run in a fixed serial order, so the
// parallel results are bit-identical to the serial reference at any thread
// count.

enum class Backend { Serial, Parallel };

Backend backend();
void set_backend(Backend b);

// C(MxN) = A(MxK) * B(KxN), row-major, C overwritten.
void gemm_serial(std::size_t M, std::size_t N, std::size_t K,
                 const double* A, const double* B, double* C);
void gemm_parallel(std::size_t M, std::size_t N, std::size_t K,
                   const double* A, const double* B, double* C);
void gemm(std::size_t M, std::size_t N, std::size_t K,
          const double* A, const double* B, double* C);

// At(NxM) = transpose of A(MxN).
void transpose(std::size_t M, std::size_t N, const double* A, double* At);

// cols((B*oh*ow) x (C*kh*kw)) from img(B x C x H x W), zero padding.
void im2col_serial(const double* img, std::size_t batch, std::size_t C,
                   std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
                   std::size_t stride, std::size_t pad, double* cols);
void im2col_parallel(const double* img, std::size_t batch, std::size_t C,
                     std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
                     std::size_t stride, std::size_t pad, double* cols);
void im2col(const double* img, std::size_t batch, std::size_t C,
            std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
            std::size_t stride, std::size_t pad, double* cols);

// Inverse scatter-accumulate of im2col; dimg must be zeroed by the caller.
void col2im_serial(const double* cols, std::size_t batch, std::size_t C,
                   std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
                   std::size_t stride, std::size_t pad, double* dimg);
void col2im_parallel(const double* cols, std::size_t batch, std::size_t C,
                     std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
                     std::size_t stride, std::size_t pad, double* dimg);
void col2im(const double* cols, std::size_t batch, std::size_t C,
            std::size_t H, std::size_t W, std::size_t kh, std::size_t kw,
            std::size_t stride, std::size_t pad, double* dimg);

// Max pooling over B x C x H x W; ties resolve to the first element in scan
// order. argmax holds flat input offsets for the backward scatter.
void maxpool_forward(const double* img, std::size_t batch, std::size_t C,
                     std::size_t H, std::size_t W, std::size_t ph, std::size_t pw,
                     std::size_t stride, double* out, std::int64_t* argmax);
void maxpool_backward(const double* dout, const std::int64_t* argmax,
                      std::size_t out_count, std::size_t in_count, double* dimg);

std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride,
                            std::size_t pad);
std::size_t pool_out_extent(std::size_t in, std::size_t k, std::size_t stride);

}  // namespace deljet::kernels

#endif
