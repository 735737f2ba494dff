#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace nlslab::detail {

// Process-wide cache of FFTW complex-to-complex plans, one pair per size.
//
// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so they are
// deterministic and can run in place on any buffer via fftw_execute_dft.
// Plan creation is serialized; execution is re-entrant as long as the
// buffers are distinct, which matches the pure-value call pattern used
// throughout the library.
//
// Both directions are scaled by 1/sqrt(M) so the transform is unitary and
// Parseval holds without extra bookkeeping. FFTW's FORWARD sign convention
// (e^{-i xi x}) matches the forward transform used here.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  void forward(std::complex<double>* data, std::size_t M) { run(data, M, true); }
  void backward(std::complex<double>* data, std::size_t M) { run(data, M, false); }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  struct Pair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  FftPlans() = default;
  ~FftPlans() {
    for (auto& [sz, p] : plans_) {
      fftw_destroy_plan(p.fwd);
      fftw_destroy_plan(p.bwd);
    }
  }

  const Pair& get(std::size_t M) {
    std::scoped_lock lock(mu_);
    auto it = plans_.find(M);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(M);
    auto* s = reinterpret_cast<fftw_complex*>(scratch.data());
    Pair pair;
    pair.fwd = fftw_plan_dft_1d(static_cast<int>(M), s, s, FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    pair.bwd = fftw_plan_dft_1d(static_cast<int>(M), s, s, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    return plans_.emplace(M, pair).first->second;
  }

  void run(std::complex<double>* data, std::size_t M, bool fwd) {
    const Pair& pr = get(M);
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd ? pr.fwd : pr.bwd, p, p);
    const double s = 1.0 / std::sqrt(static_cast<double>(M));
    for (std::size_t i = 0; i < M; ++i) data[i] *= s;
  }

  std::map<std::size_t, Pair> plans_;
  std::mutex mu_;
};

}  // namespace nlslab::detail
