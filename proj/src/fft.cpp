#include "fft.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace fhlab::detail {

namespace {

enum class Kind { C2C_FWD, C2C_BWD, R2C, C2R };

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::map<std::tuple<Kind, std::vector<int>>, fftw_plan>& plan_cache() {
    static std::map<std::tuple<Kind, std::vector<int>>, fftw_plan> cache;
    return cache;
}

std::size_t total(const std::vector<int>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
}

std::size_t half_total(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) n *= static_cast<std::size_t>(dims[i]);
    return n * static_cast<std::size_t>(dims.back() / 2 + 1);
}

fftw_plan get_plan(Kind kind, const std::vector<int>& dims) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_tuple(kind, dims);
    auto it = plan_cache().find(key);
    if (it != plan_cache().end()) return it->second;

    const int rank = static_cast<int>(dims.size());
    fftw_plan plan = nullptr;
    switch (kind) {
        case Kind::C2C_FWD:
        case Kind::C2C_BWD: {
            AlignedBuffer<cplx> a(total(dims)), b(total(dims));
            plan = fftw_plan_dft(rank, dims.data(), reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()),
                                 kind == Kind::C2C_FWD ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
            break;
        }
        case Kind::R2C: {
            AlignedBuffer<double> a(total(dims));
            AlignedBuffer<cplx> b(half_total(dims));
            plan = fftw_plan_dft_r2c(rank, dims.data(), a.data(),
                                     reinterpret_cast<fftw_complex*>(b.data()), FFTW_ESTIMATE);
            break;
        }
        case Kind::C2R: {
            AlignedBuffer<cplx> a(half_total(dims));
            AlignedBuffer<double> b(total(dims));
            plan = fftw_plan_dft_c2r(rank, dims.data(), reinterpret_cast<fftw_complex*>(a.data()),
                                     b.data(), FFTW_ESTIMATE);
            break;
        }
    }
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    plan_cache().emplace(key, plan);
    return plan;
}

}  // namespace

void dft_c2c(const std::vector<int>& dims, cplx* in, cplx* out, int sign) {
    fftw_plan p = get_plan(sign < 0 ? Kind::C2C_FWD : Kind::C2C_BWD, dims);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
}

void dft_r2c(const std::vector<int>& dims, double* in, cplx* out) {
    fftw_plan p = get_plan(Kind::R2C, dims);
    fftw_execute_dft_r2c(p, in, reinterpret_cast<fftw_complex*>(out));
}

void dft_c2r(const std::vector<int>& dims, cplx* in, double* out) {
    fftw_plan p = get_plan(Kind::C2R, dims);
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace fhlab::detail
