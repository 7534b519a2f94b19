#include "fisherclt/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace fclt {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct R2CPlan {
  std::size_t len = 0;
  double* in = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd{}, bwd{};

  explicit R2CPlan(std::size_t n) : len(n) {
    in = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd = fftw_plan_dft_r2c_1d(int(n), in, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(int(n), spec, in, FFTW_ESTIMATE);
  }
  ~R2CPlan() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(in);
    fftw_free(spec);
  }
  R2CPlan(const R2CPlan&) = delete;
  R2CPlan& operator=(const R2CPlan&) = delete;

  void load(const std::vector<double>& v) {
    std::copy(v.begin(), v.end(), in);
    std::fill(in + v.size(), in + len, 0.0);
  }
};

}  // namespace

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("fft_convolve: empty");
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t L = next_pow2(out_len);
  R2CPlan plan(L);
  const std::size_t nb = L / 2 + 1;

  plan.load(a);
  fftw_execute(plan.fwd);
  std::vector<std::complex<double>> fa(nb);
  for (std::size_t i = 0; i < nb; ++i)
    fa[i] = {plan.spec[i][0], plan.spec[i][1]};

  plan.load(b);
  fftw_execute(plan.fwd);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::complex<double> prod =
        fa[i] * std::complex<double>(plan.spec[i][0], plan.spec[i][1]);
    plan.spec[i][0] = prod.real();
    plan.spec[i][1] = prod.imag();
  }
  fftw_execute(plan.bwd);

  std::vector<double> out(out_len);
  const double scale = 1.0 / double(L);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = plan.in[i] * scale;
  return out;
}

std::vector<double> fft_correlate_valid(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.size() < b.size())
    throw std::invalid_argument("fft_correlate_valid: |a| < |b|");
  std::vector<double> brev(b.rbegin(), b.rend());
  std::vector<double> full = fft_convolve(a, brev);
  // full[i] = sum_j a[j] b[|b|-1-(i-j)]; taking i = k + |b|-1 gives
  // sum_j a[k + t] b[t].
  return std::vector<double>(full.begin() + std::ptrdiff_t(b.size()) - 1,
                             full.begin() + std::ptrdiff_t(a.size()));
}

std::vector<double> fft_self_power(const std::vector<double>& a, int n) {
  if (n < 1) throw std::invalid_argument("fft_self_power: n < 1");
  if (a.empty()) throw std::invalid_argument("fft_self_power: empty");
  if (n == 1) return a;
  const std::size_t out_len = std::size_t(n) * (a.size() - 1) + 1;
  const std::size_t L = next_pow2(out_len);
  R2CPlan plan(L);
  const std::size_t nb = L / 2 + 1;

  plan.load(a);
  fftw_execute(plan.fwd);
  std::vector<std::complex<double>> base(nb), acc(nb, 1.0);
  for (std::size_t i = 0; i < nb; ++i)
    base[i] = {plan.spec[i][0], plan.spec[i][1]};
  // Binary powering in the spectral domain (alias-free: L >= full support).
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1)
      for (std::size_t i = 0; i < nb; ++i) acc[i] *= base[i];
    if (e > 1)
      for (std::size_t i = 0; i < nb; ++i) base[i] *= base[i];
  }
  for (std::size_t i = 0; i < nb; ++i) {
    plan.spec[i][0] = acc[i].real();
    plan.spec[i][1] = acc[i].imag();
  }
  fftw_execute(plan.bwd);

  std::vector<double> out(out_len);
  const double scale = 1.0 / double(L);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = plan.in[i] * scale;
  return out;
}

}  // namespace fclt
