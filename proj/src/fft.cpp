#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sevsteps::detail {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(n), out(n);
    // FFTW_UNALIGNED: executed later on arbitrary std::vector storage.
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw std::invalid_argument("fft: size mismatch");
  const std::size_t n = in.size();
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  fftw_plan plan = cache().get(n, sign);
  // fftw_execute_dft does not modify the input for out-of-place transforms.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  execute(in, out, FFTW_BACKWARD);
}

void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) {
  execute(in, out, FFTW_FORWARD);
}

}  // namespace sevsteps::detail
