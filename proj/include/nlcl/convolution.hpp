#pragma once

#include <span>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/models.hpp"

namespace nlcl {

/// Interface values of the spatial convolutions at one time level.
/// Row ch holds S^{ch}_{e} for interfaces e = 0..M where, with the downstream
/// window, S_e = dx * sum_q w_q U_{e+q} (cells at and ahead of interface e;
/// cells outside the grid contribute zero).
struct SpatialConvSnapshot {
    long time_index = 0;
    int channels = 0;
    int interfaces = 0;
    std::vector<double> data;

    SpatialConvSnapshot() = default;
    SpatialConvSnapshot(int ch, int ifaces)
        : channels(ch), interfaces(ifaces),
          data(static_cast<size_t>(ch) * ifaces, 0.0) {}
    std::span<double> row(int ch) {
        return {data.data() + static_cast<size_t>(ch) * interfaces,
                static_cast<size_t>(interfaces)};
    }
    std::span<const double> row(int ch) const {
        return {data.data() + static_cast<size_t>(ch) * interfaces,
                static_cast<size_t>(interfaces)};
    }
};

/// Bounded ring of spatial-convolution snapshots; age 0 is the newest.
/// Pushing beyond the capacity evicts the oldest level.
class HistoryRing {
public:
    explicit HistoryRing(int depth) : depth_(depth < 1 ? 1 : depth) {}

    void push(SpatialConvSnapshot snap);
    int size() const { return static_cast<int>(slots_.size()); }
    int depth() const { return depth_; }
    /// Snapshot `age` levels behind the newest (age 0 = newest).
    const SpatialConvSnapshot& by_age(int age) const;
    void clear() { slots_.clear(); head_ = 0; }

private:
    int depth_;
    int head_ = 0; // index of the newest slot
    std::vector<SpatialConvSnapshot> slots_;
};

/// Memory-convolution values c^{j,k,n}_{e} per channel, interfaces e = 0..M.
struct ConvField {
    long time_index = 0;
    int channels = 0;
    int interfaces = 0;
    std::vector<double> data;

    ConvField() = default;
    ConvField(int ch, int ifaces)
        : channels(ch), interfaces(ifaces), data(static_cast<size_t>(ch) * ifaces, 0.0) {}
    std::span<double> row(int ch) {
        return {data.data() + static_cast<size_t>(ch) * interfaces,
                static_cast<size_t>(interfaces)};
    }
    std::span<const double> row(int ch) const {
        return {data.data() + static_cast<size_t>(ch) * interfaces,
                static_cast<size_t>(interfaces)};
    }
};

/// Per-entry constants of the convolution bounds:
/// C5 = ||U0^j||_L1 * ||mu'||_inf * ||Gamma||_L1 and
/// C6 = 2 ||U0^j||_L1 * ||mu''||_inf * ||Gamma||_L1 (both delta-independent).
struct ConvConstants {
    std::vector<double> c5; // row-major (j, k)
    std::vector<double> c6;
    int n = 0;
    double c5_at(int j, int k) const { return c5[static_cast<size_t>(j) * n + k]; }
    double c6_at(int j, int k) const { return c6[static_cast<size_t>(j) * n + k]; }
};

ConvConstants conv_constants(const ModelSpec& model);

/// Precomputed discretization of the kernel matrix: deduplicated spatial
/// channels (unique component/spatial-kernel pairs) and memory channels
/// (spatial channel + temporal weights), plus the (j, k) -> channel map.
class ConvolutionEngine {
public:
    ConvolutionEngine(const ModelSpec& model, const GridSpec& grid, double dt);

    int spatial_channels() const { return static_cast<int>(spatial_.size()); }
    int memory_channels() const { return static_cast<int>(memory_.size()); }
    int interfaces() const { return cells_ + 1; }
    /// Memory channel feeding nu^k's j-th argument.
    int channel_of(int j, int k) const { return jk_to_mem_[static_cast<size_t>(j) * n_ + k]; }
    /// Slots needed in the history ring (longest temporal weight vector).
    int ring_depth() const;
    /// Temporal step masses theta_m = dt * g_m of a memory channel, normalized
    /// so they sum to exactly 1 (keeps the degenerate single-slot case an
    /// identity and dt*sum(g) = 1 to machine precision).
    std::span<const double> theta(int mem_channel) const {
        return memory_[static_cast<size_t>(mem_channel)].theta;
    }
    std::span<const double> weights(int spatial_channel) const {
        return spatial_[static_cast<size_t>(spatial_channel)].w;
    }

    /// Inner spatial sum S_e = dx * sum_q w_q U_{e+q} for every channel.
    SpatialConvSnapshot spatial_conv(const StateField& state) const;

    /// Time convolution of the ring: c_e = sum_m theta_m S^{age m}_e, truncated
    /// to the available history. `out` is resized as needed.
    void memory_conv(const HistoryRing& ring, ConvField& out) const;

    /// View of a snapshot as the convolution field of a memoryless step
    /// (c = S on every memory channel).
    void memoryless_field(const SpatialConvSnapshot& snap, ConvField& out) const;

private:
    struct SpatialChannel {
        int component = 0;
        const void* kernel_id = nullptr;
        std::vector<double> w;
    };
    struct MemoryChannel {
        int spatial = 0;
        const void* kernel_id = nullptr;
        std::vector<double> theta;
    };

    int n_ = 0;
    int cells_ = 0;
    double dx_ = 0.0;
    std::vector<SpatialChannel> spatial_;
    std::vector<MemoryChannel> memory_;
    std::vector<int> jk_to_mem_;
};

} // namespace nlcl
