#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace fhlab::detail {

template <typename T>
class AlignedBuffer {
public:
    explicit AlignedBuffer(std::size_t n) : n_(n) {
        ptr_ = static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)));
        if (!ptr_) throw std::bad_alloc();
        for (std::size_t i = 0; i < n_; ++i) ptr_[i] = T{};
    }
    ~AlignedBuffer() { fftw_free(ptr_); }
    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;

    T* data() { return ptr_; }
    const T* data() const { return ptr_; }
    std::size_t size() const { return n_; }
    T& operator[](std::size_t i) { return ptr_[i]; }
    const T& operator[](std::size_t i) const { return ptr_[i]; }
    void zero() {
        for (std::size_t i = 0; i < n_; ++i) ptr_[i] = T{};
    }

private:
    T* ptr_ = nullptr;
    std::size_t n_ = 0;
};

using cplx = std::complex<double>;

// Unnormalized transforms over a row-major array with the given dims.
// Plans are cached and created under a lock; execution is re-entrant.
void dft_c2c(const std::vector<int>& dims, cplx* in, cplx* out, int sign);
void dft_r2c(const std::vector<int>& dims, double* in, cplx* out);
// Destroys `in`.
void dft_c2r(const std::vector<int>& dims, cplx* in, double* out);

}  // namespace fhlab::detail
