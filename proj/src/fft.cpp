#include "bhlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace bhlab {

namespace {

// FFTW planning is not thread safe; new-array execution is.  Plans are
// created with FFTW_ESTIMATE so the input arrays are not clobbered.
std::mutex plan_mutex;

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> real(n);
    std::vector<fftw_complex> cplx(n / 2 + 1);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_1d(n, real.data(), cplx.data(), FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_1d(n, cplx.data(), real.data(), FFTW_ESTIMATE);
    if (!p.fwd || !p.inv) throw std::runtime_error("fftw plan creation failed");
    return cache.emplace(n, p).first->second;
}

}  // namespace

std::vector<std::complex<double>> fft_forward(const std::vector<double>& in) {
    const int n = static_cast<int>(in.size());
    std::vector<double> work(in);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = plans_for(n).fwd;
    }
    fftw_execute_dft_r2c(plan, work.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> fft_inverse(const std::vector<std::complex<double>>& in, int n) {
    if (static_cast<int>(in.size()) != n / 2 + 1)
        throw std::invalid_argument("fft_inverse: spectrum size does not match n");
    std::vector<std::complex<double>> work(in);
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = plans_for(n).inv;
    }
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(work.data()), out.data());
    const double scale = 1.0 / n;
    for (double& v : out) v *= scale;
    return out;
}

}  // namespace bhlab
