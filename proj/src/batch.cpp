#include "superrad/batch.hpp"

#include <exception>

namespace superrad {

namespace {

BatchResult run_one(const BatchItem& it) {
  BatchResult r;
  try {
    r.path = integrate(it.state, it.model, it.direction, it.stops);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<BatchResult> integrate_batch(const std::vector<BatchItem>& items) {
  std::vector<BatchResult> out(items.size());
  const long n = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_one(items[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<BatchResult> integrate_batch_serial(const std::vector<BatchItem>& items) {
  std::vector<BatchResult> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(run_one(it));
  return out;
}

}  // namespace superrad
