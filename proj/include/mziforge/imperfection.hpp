#pragma once

#include "mziforge/network.hpp"
#include "mziforge/quantize.hpp"
#include "mziforge/variation_map.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mziforge {

/// The imperfection quintuplet {sigma_phs, sigma_bes, L, sigma_il,
/// n_bits} plus the map/loss knobs that parameterize it: radial scaling,
/// mean insertion loss, quantizer mode, and the post-convolution
/// variance renormalization switch. n_bits == 0 disables quantization
/// (the inactive value used when a parameter sits out of a comparison).
struct ImperfectionParameterSet {
    double sigma_phs = 0.0;
    double sigma_bes = 0.0;
    std::size_t corr_len = 1; // 1 = uncorrelated
    double sigma_il = 0.0;    // dB
    unsigned n_bits = 0;      // 0 = full precision
    bool radial = false;
    double mu_il = 0.0; // dB
    QuantMode quant_mode = QuantMode::evs;
    bool renormalize_maps = true;

    bool operator==(const ImperfectionParameterSet&) const = default;
};

/// Where each mesh of a model lives: mode count plus every node's left
/// grid cell. Enough to reproduce an instance without the model itself.
struct MeshShape {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> node_cells; // (grid_x, grid_y)
};
struct ModelShape {
    std::vector<MeshShape> meshes; // application order: v_h then u, per layer
};
ModelShape model_shape(const IpnnModel& model);

/// Per-node parameter deltas of one realized instance.
struct NodeDeltas {
    double d_theta = 0.0, d_phi = 0.0;
    double dr = 0.0, dt = 0.0, dr2 = 0.0, dt2 = 0.0;
    double il_db = 0.0;
};

/// One concrete random realization of a parameter set: deterministic in
/// (p, shape, seed, stream).
struct ImperfectionInstance {
    ImperfectionParameterSet p;
    std::vector<std::vector<NodeDeltas>> per_mesh;
    std::optional<QuantizerSpec> quantizer;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Draw an instance. Per mesh, one phase map and two splitter maps
/// (reflectance and transmittance deltas stay independent) are sampled on
/// the (n-1) x 2n grid; a node reads phi/r/t deltas from its left cell
/// and theta/r2/t2 deltas from its right cell. Insertion loss is sampled
/// per node from N(mu_il, sigma_il^2); negative draws mean gain and are
/// kept. mesh_mask, when present, restricts the randomness to selected
/// meshes.
ImperfectionInstance realize_instance(const ImperfectionParameterSet& p, const ModelShape& shape,
                                      std::uint64_t seed, std::uint64_t stream = 0,
                                      const std::vector<bool>* mesh_mask = nullptr);

/// IL (dB) to the per-arm amplitude factor: beta = 10^(-il/40), applied
/// uniformly to all four arms.
double insertion_loss_to_beta(double il_db);

/// Return a copy of the model with the instance applied: tuned phases
/// are quantized first (the DAC writes the value), then the additive
/// deltas land, splitter values are clamped to [0, 1] and arm losses set
/// from the sampled IL. Kc levels are fitted to the phase population the
/// quantizer covers.
IpnnModel apply_instance(const IpnnModel& model, const ImperfectionInstance& inst);

/// Quantize every mesh phase of the model, one spec per layer.
IpnnModel quantize_model(const IpnnModel& model, const std::vector<QuantizerSpec>& per_layer);

} // namespace mziforge
