#include "rlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include "rlab/error.hpp"

namespace rlab::fft {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_plan get_plan(const std::vector<int>& dims, int sign) {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto key = std::make_pair(dims, sign);
  auto it = c.plans.find(key);
  if (it != c.plans.end()) return it->second;
  std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                      [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  fftw_complex* scratch = fftw_alloc_complex(total);
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), scratch, scratch,
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) throw Error(ErrorKind::InvalidArgument, "fftw could not plan transform");
  c.plans.emplace(key, plan);
  return plan;
}

}  // namespace

void execute(std::span<std::complex<double>> data, const std::vector<int>& dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  if (total != data.size()) throw Error(ErrorKind::InvalidArgument, "fft size does not match dims");
  fftw_plan plan = get_plan(dims, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace rlab::fft
