#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace mixedts::detail {

namespace {
// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& in) {
  const int n = static_cast<int>(in.size());
  std::vector<std::complex<double>> out(in.size());
  std::vector<std::complex<double>> work(in);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(work.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace mixedts::detail
