#include "microlocal/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>

#include "microlocal/errors.hpp"

namespace microlocal {

namespace {

std::size_t grid_size(int dim, int depth) { return std::size_t{1} << (static_cast<std::size_t>(dim) * depth); }

// FFTW plans are cached per (dim, depth, sign). Planner calls are not thread-safe, so all access
// to the cache and to execution goes through one mutex.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  std::vector<Complex> run(std::span<const Complex> in, int dim, int depth, int sign) {
    const std::size_t total = grid_size(dim, depth);
    require(in.size() == total, "FFT input has wrong length");
    std::lock_guard<std::mutex> lock(mutex_);
    Entry& e = entry(dim, depth, sign);
    std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(e.buffer_in));
    fftw_execute(e.plan);
    const auto* out = reinterpret_cast<const Complex*>(e.buffer_out);
    return std::vector<Complex>(out, out + total);
  }

  ~FftPlans() {
    for (auto& [key, e] : plans_) {
      fftw_destroy_plan(e.plan);
      fftw_free(e.buffer_in);
      fftw_free(e.buffer_out);
    }
  }

 private:
  struct Entry {
    fftw_plan plan = nullptr;
    fftw_complex* buffer_in = nullptr;
    fftw_complex* buffer_out = nullptr;
  };

  Entry& entry(int dim, int depth, int sign) {
    const auto key = std::make_tuple(dim, depth, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t total = grid_size(dim, depth);
    Entry e;
    e.buffer_in = fftw_alloc_complex(total);
    e.buffer_out = fftw_alloc_complex(total);
    int dims[kMaxDim];
    for (int a = 0; a < dim; ++a) dims[a] = 1 << depth;
    e.plan = fftw_plan_dft(dim, dims, e.buffer_in, e.buffer_out, sign, FFTW_ESTIMATE);
    return plans_.emplace(key, e).first->second;
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, Entry> plans_;
};

}  // namespace

double radial_frequency(std::size_t m, int dim, int depth) {
  const std::size_t n = std::size_t{1} << depth;
  if (dim == 1) return std::abs(static_cast<double>(bin_frequency(m, n)));
  const auto f0 = static_cast<double>(bin_frequency(m / n, n));
  const auto f1 = static_cast<double>(bin_frequency(m % n, n));
  return std::sqrt(f0 * f0 + f1 * f1);
}

std::vector<Complex> forward_fft(std::span<const Complex> samples, int dim, int depth) {
  auto out = FftPlans::instance().run(samples, dim, depth, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<Complex> inverse_fft(std::span<const Complex> coefficients, int dim, int depth) {
  return FftPlans::instance().run(coefficients, dim, depth, FFTW_BACKWARD);
}

SampledSignal::SampledSignal(int dim, int depth) : SampledSignal(dim, depth, std::vector<Complex>(grid_size(dim, depth))) {}

SampledSignal::SampledSignal(int dim, int depth, std::vector<Complex> values)
    : dim_(dim), depth_(depth), values_(std::move(values)) {
  require(dim >= 1 && dim <= kMaxDim, "signal dimension must be 1 or 2");
  require(depth >= 0 && depth <= 30 / dim, "signal depth out of range");
  require(values_.size() == grid_size(dim, depth),
          "signal length " + std::to_string(values_.size()) + " does not match 2^(n*depth) = " +
              std::to_string(grid_size(dim, depth)));
  for (const auto& v : values_) {
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), "signal contains non-finite samples");
  }
}

SampledSignal SampledSignal::from_real(int dim, int depth, std::span<const double> values) {
  std::vector<Complex> c(values.begin(), values.end());
  return SampledSignal(dim, depth, std::move(c));
}

std::vector<double> SampledSignal::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](Complex v) { return v.real(); });
  return out;
}

std::vector<double> SampledSignal::magnitudes() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](Complex v) { return std::abs(v); });
  return out;
}

bool SampledSignal::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex v) { return v.imag() == 0.0; });
}

double SampledSignal::l2_norm() const {
  double sum = 0.0;
  for (const auto& v : values_) sum += std::norm(v);
  return std::sqrt(sum / static_cast<double>(values_.size()));
}

double SampledSignal::relative_l2_error(const SampledSignal& a, const SampledSignal& b) {
  require(a.size() == b.size(), "signals differ in length");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    diff += std::norm(a[m] - b[m]);
    ref += std::norm(b[m]);
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

SampledSignal& SampledSignal::operator+=(const SampledSignal& other) {
  require(other.dim_ == dim_ && other.depth_ == depth_, "signal shape mismatch");
  for (std::size_t m = 0; m < values_.size(); ++m) values_[m] += other.values_[m];
  return *this;
}

SampledSignal& SampledSignal::operator*=(Complex scale) {
  for (auto& v : values_) v *= scale;
  return *this;
}

CoefField::CoefField(int dim, int depth) : dim_(dim), depth_(depth) {
  require(dim >= 1 && dim <= kMaxDim, "coefficient field dimension must be 1 or 2");
  require(depth >= 0 && depth <= 30 / dim, "coefficient field depth out of range");
  levels_.resize(static_cast<std::size_t>(depth) + 1);
  for (int j = 0; j <= depth; ++j) levels_[static_cast<std::size_t>(j)].assign(grid_size(dim, j), Complex{});
}

CoefField CoefField::from_levels(int dim, std::vector<std::vector<Complex>> levels) {
  require(!levels.empty(), "coefficient field needs at least level 0");
  CoefField c(dim, static_cast<int>(levels.size()) - 1);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    require(levels[j].size() == grid_size(dim, static_cast<int>(j)),
            "coefficient level " + std::to_string(j) + " has wrong length");
    c.levels_[j] = std::move(levels[j]);
  }
  require(c.all_finite(), "coefficient field contains non-finite values");
  return c;
}

std::size_t CoefField::flat(const DyadicCube& q) const {
  require(q.level >= 0 && q.level <= depth_, "cube level outside coefficient field");
  std::size_t idx = 0;
  const std::int64_t per_axis = std::int64_t{1} << q.level;
  for (int a = 0; a < dim_; ++a) {
    require(q.k[a] >= 0 && q.k[a] < per_axis, "cube index outside its level");
    idx = (idx << q.level) | static_cast<std::size_t>(q.k[a]);
  }
  return idx;
}

Complex& CoefField::at(const DyadicCube& q) { return levels_[static_cast<std::size_t>(q.level)][flat(q)]; }

Complex CoefField::at(const DyadicCube& q) const { return levels_[static_cast<std::size_t>(q.level)][flat(q)]; }

bool CoefField::all_finite() const {
  for (const auto& lv : levels_)
    for (const auto& v : lv)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double CoefField::max_abs() const {
  double m = 0.0;
  for (const auto& lv : levels_)
    for (const auto& v : lv) m = std::max(m, std::abs(v));
  return m;
}

CoefField& CoefField::operator*=(Complex scale) {
  for (auto& lv : levels_)
    for (auto& v : lv) v *= scale;
  return *this;
}

CoefField& CoefField::operator+=(const CoefField& other) {
  require(other.dim_ == dim_ && other.depth_ == depth_, "coefficient field shape mismatch");
  for (std::size_t j = 0; j < levels_.size(); ++j)
    for (std::size_t i = 0; i < levels_[j].size(); ++i) levels_[j][i] += other.levels_[j][i];
  return *this;
}

}  // namespace microlocal
