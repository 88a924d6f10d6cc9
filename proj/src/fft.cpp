#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace mgt::detail {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int dim, int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(dim, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
        auto* scratch = fftw_alloc_complex(total);
        int dims[3] = {n, n, n};
        fftw_plan plan = fftw_plan_dft(dim, dims, scratch, scratch, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(scratch);
        if (!plan) throw std::runtime_error("FFTW failed to create a plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

} // namespace

void fft_inplace(std::span<std::complex<double>> data, int dim, int n, int sign) {
    fftw_plan plan = cache().get(dim, n, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

} // namespace mgt::detail
