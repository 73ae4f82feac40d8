#include "nlcl/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "nlcl/errors.hpp"
#include "nlcl/kernels.hpp"
#include "nlcl/parallel.hpp"

namespace nlcl {

void HistoryRing::push(SpatialConvSnapshot snap) {
    if (static_cast<int>(slots_.size()) < depth_) {
        slots_.push_back(std::move(snap));
        head_ = static_cast<int>(slots_.size()) - 1;
        return;
    }
    head_ = (head_ + 1) % depth_;
    slots_[static_cast<size_t>(head_)] = std::move(snap);
}

const SpatialConvSnapshot& HistoryRing::by_age(int age) const {
    if (age < 0 || age >= size()) throw ModelError("history ring: age out of range");
    const int n = static_cast<int>(slots_.size());
    return slots_[static_cast<size_t>((head_ - age % n + n) % n)];
}

ConvConstants conv_constants(const ModelSpec& model) {
    ConvConstants c;
    c.n = model.n;
    c.c5.resize(static_cast<size_t>(model.n) * model.n);
    c.c6.resize(static_cast<size_t>(model.n) * model.n);
    for (int j = 0; j < model.n; ++j) {
        const double mass0 = model.initial_mass(j);
        for (int k = 0; k < model.n; ++k) {
            const auto& mu = model.kernels.mu(j, k);
            const double gamma_l1 = model.kernels.gamma(j, k).mass();
            c.c5[static_cast<size_t>(j) * model.n + k] = mass0 * mu.sup_deriv() * gamma_l1;
            c.c6[static_cast<size_t>(j) * model.n + k] =
                2.0 * mass0 * mu.sup_second_deriv() * gamma_l1;
        }
    }
    return c;
}

ConvolutionEngine::ConvolutionEngine(const ModelSpec& model, const GridSpec& grid,
                                     double dt) {
    n_ = model.n;
    cells_ = grid.cells;
    dx_ = grid.dx;
    jk_to_mem_.assign(static_cast<size_t>(n_) * n_, -1);

    for (int j = 0; j < n_; ++j) {
        for (int k = 0; k < n_; ++k) {
            const auto& mu_ptr = model.kernels.mu_ptr(j, k);
            int sch = -1;
            for (size_t s = 0; s < spatial_.size(); ++s) {
                if (spatial_[s].component == j && spatial_[s].kernel_id == mu_ptr.get()) {
                    sch = static_cast<int>(s);
                    break;
                }
            }
            if (sch < 0) {
                SpatialChannel s;
                s.component = j;
                s.kernel_id = mu_ptr.get();
                s.w = spatial_cell_averages(*mu_ptr, grid.dx);
                spatial_.push_back(std::move(s));
                sch = static_cast<int>(spatial_.size()) - 1;
            }

            const auto& g_ptr = model.kernels.gamma_ptr(j, k);
            int mch = -1;
            for (size_t m = 0; m < memory_.size(); ++m) {
                if (memory_[m].spatial == sch && memory_[m].kernel_id == g_ptr.get()) {
                    mch = static_cast<int>(m);
                    break;
                }
            }
            if (mch < 0) {
                MemoryChannel m;
                m.spatial = sch;
                m.kernel_id = g_ptr.get();
                const auto g = temporal_cell_averages(*g_ptr, dt);
                m.theta.resize(g.size());
                double sum = 0.0;
                for (size_t s = 0; s < g.size(); ++s) {
                    m.theta[s] = dt * g[s];
                    sum += m.theta[s];
                }
                if (std::abs(sum - 1.0) > 1e-8)
                    throw ModelError("temporal weights do not sum to the kernel mass");
                for (double& t : m.theta) t /= sum;
                memory_.push_back(std::move(m));
                mch = static_cast<int>(memory_.size()) - 1;
            }
            jk_to_mem_[static_cast<size_t>(j) * n_ + k] = mch;
        }
    }
}

int ConvolutionEngine::ring_depth() const {
    size_t d = 1;
    for (const auto& m : memory_) d = std::max(d, m.theta.size());
    return static_cast<int>(d);
}

SpatialConvSnapshot ConvolutionEngine::spatial_conv(const StateField& state) const {
    if (state.cells != cells_ || state.n_components != n_)
        throw ModelError("spatial_conv: state shape does not match the engine grid");
    SpatialConvSnapshot snap(spatial_channels(), interfaces());
    snap.time_index = state.time_index;
    for (size_t ch = 0; ch < spatial_.size(); ++ch) {
        const auto& channel = spatial_[ch];
        const auto u = state.comp(channel.component);
        auto out = snap.row(static_cast<int>(ch));
        const int kw = static_cast<int>(channel.w.size());
        const double* w = channel.w.data();
        for (int e = 0; e <= cells_; ++e) {
            const int qmax = std::min(kw, cells_ - e);
            double s = 0.0;
            for (int q = 0; q < qmax; ++q) s += w[q] * u[static_cast<size_t>(e + q)];
            out[static_cast<size_t>(e)] = dx_ * s;
        }
    }
    return snap;
}

void ConvolutionEngine::memory_conv(const HistoryRing& ring, ConvField& out) const {
    if (ring.size() == 0) throw ModelError("memory_conv: empty history ring");
    out.channels = memory_channels();
    out.interfaces = interfaces();
    out.data.assign(static_cast<size_t>(out.channels) * out.interfaces, 0.0);
    out.time_index = ring.by_age(0).time_index;
    const int m1 = interfaces();
    parallel_for(m1, [&](int lo, int hi) {
        for (size_t mc = 0; mc < memory_.size(); ++mc) {
            const auto& channel = memory_[mc];
            double* dst = out.data.data() + mc * static_cast<size_t>(m1);
            const int depth =
                std::min<int>(static_cast<int>(channel.theta.size()), ring.size());
            for (int age = 0; age < depth; ++age) {
                const double th = channel.theta[static_cast<size_t>(age)];
                const double* src = ring.by_age(age).row(channel.spatial).data();
                for (int e = lo; e < hi; ++e) dst[e] += th * src[e];
            }
        }
    });
}

void ConvolutionEngine::memoryless_field(const SpatialConvSnapshot& snap,
                                         ConvField& out) const {
    out.channels = memory_channels();
    out.interfaces = interfaces();
    out.data.resize(static_cast<size_t>(out.channels) * out.interfaces);
    out.time_index = snap.time_index;
    for (size_t mc = 0; mc < memory_.size(); ++mc) {
        const auto src = snap.row(memory_[mc].spatial);
        auto dst = out.row(static_cast<int>(mc));
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

} // namespace nlcl
