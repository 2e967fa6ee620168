#include "detail/fft.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace helab::detail {

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {}
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
  std::size_t size;
};

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// The planner is not thread-safe; execution with fresh arrays is.
std::mutex planner_mutex;
std::map<std::tuple<int, int, int>, Plan> plans;

fftw_plan plan_for(const TorusGrid& grid, int sign) {
  std::lock_guard lock(planner_mutex);
  auto key = std::make_tuple(grid.n, grid.points_per_axis, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second.get();
  FftwBuffer in(grid.size()), out(grid.size());
  std::vector<int> dims(grid.axes(), grid.points_per_axis);
  fftw_plan p = fftw_plan_dft(grid.axes(), dims.data(), in.data, out.data, sign, FFTW_ESTIMATE);
  plans.emplace(key, Plan(p));
  return p;
}

std::vector<cplx> run(const TorusGrid& grid, std::span<const cplx> values, int sign) {
  const std::size_t size = grid.size();
  FftwBuffer in(size), out(size);
  std::memcpy(in.data, values.data(), size * sizeof(fftw_complex));
  fftw_execute_dft(plan_for(grid, sign), in.data, out.data);
  std::vector<cplx> result(size);
  std::memcpy(static_cast<void*>(result.data()), out.data, size * sizeof(fftw_complex));
  return result;
}

}  // namespace

std::vector<cplx> forward_fft(const TorusGrid& grid, std::span<const cplx> values) {
  return run(grid, values, FFTW_FORWARD);
}

std::vector<cplx> inverse_fft(const TorusGrid& grid, std::span<const cplx> spectrum) {
  auto result = run(grid, spectrum, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : result) v *= scale;
  return result;
}

}  // namespace helab::detail
