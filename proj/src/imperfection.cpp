#include "mziforge/imperfection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mziforge {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void collect_mesh_phases(const MeshPlan& mesh, std::vector<double>& out) {
    for (const MziNode& node : mesh.nodes) {
        out.push_back(node.phases.theta);
        out.push_back(node.phases.phi);
    }
}

void quantize_mesh_phases(MeshPlan& mesh, const QuantizerSpec& spec) {
    for (MziNode& node : mesh.nodes)
        node.phases = PhasePair(quantize_phase(node.phases.theta, spec),
                                quantize_phase(node.phases.phi, spec));
}

} // namespace

ModelShape model_shape(const IpnnModel& model) {
    ModelShape shape;
    auto add = [&](const MeshPlan& mesh) {
        MeshShape ms;
        ms.n = mesh.n;
        ms.node_cells.reserve(mesh.nodes.size());
        for (const MziNode& node : mesh.nodes) ms.node_cells.emplace_back(node.grid_x, node.grid_y);
        shape.meshes.push_back(std::move(ms));
    };
    for (const LinearLayer& layer : model.layers) {
        add(layer.v_h_mesh);
        add(layer.u_mesh);
    }
    return shape;
}

double insertion_loss_to_beta(double il_db) { return std::pow(10.0, -il_db / 40.0); }

ImperfectionInstance realize_instance(const ImperfectionParameterSet& p, const ModelShape& shape,
                                      std::uint64_t seed, std::uint64_t stream,
                                      const std::vector<bool>* mesh_mask) {
    if (mesh_mask && mesh_mask->size() != shape.meshes.size())
        throw std::invalid_argument("realize_instance: mesh mask length mismatch");

    ImperfectionInstance inst;
    inst.p = p;
    inst.seed = seed;
    inst.stream = stream;
    inst.per_mesh.resize(shape.meshes.size());

    RngStream rng(seed, stream);
    for (std::size_t mi = 0; mi < shape.meshes.size(); ++mi) {
        const MeshShape& mesh = shape.meshes[mi];
        auto& deltas = inst.per_mesh[mi];
        deltas.assign(mesh.node_cells.size(), NodeDeltas{});
        if (mesh_mask && !(*mesh_mask)[mi]) continue;

        const std::size_t w = grid_width(mesh.n);
        const std::size_t h = grid_height(mesh.n);

        VariationMap phase_map, r_map, t_map;
        if (p.sigma_phs > 0.0)
            phase_map = generate_variation_map(w, h, p.sigma_phs, MapKind::phase, p.radial,
                                               p.corr_len, rng, p.renormalize_maps);
        if (p.sigma_bes > 0.0) {
            r_map = generate_variation_map(w, h, p.sigma_bes, MapKind::splitter, p.radial,
                                           p.corr_len, rng, p.renormalize_maps);
            t_map = generate_variation_map(w, h, p.sigma_bes, MapKind::splitter, p.radial,
                                           p.corr_len, rng, p.renormalize_maps);
        }

        for (std::size_t ni = 0; ni < mesh.node_cells.size(); ++ni) {
            const auto [gx, gy] = mesh.node_cells[ni];
            NodeDeltas& d = deltas[ni];
            if (p.sigma_phs > 0.0) {
                d.d_phi = phase_map.at(gx, gy);       // left cell: input side
                d.d_theta = phase_map.at(gx + 1, gy); // right cell: internal arm
            }
            if (p.sigma_bes > 0.0) {
                d.dr = r_map.at(gx, gy);
                d.dr2 = r_map.at(gx + 1, gy);
                d.dt = t_map.at(gx, gy);
                d.dt2 = t_map.at(gx + 1, gy);
            }
            if (p.sigma_il > 0.0)
                d.il_db = rng.gaussian(p.mu_il, p.sigma_il);
            else
                d.il_db = p.mu_il;
        }
    }

    if (p.n_bits > 0) {
        QuantizerSpec q;
        q.mode = p.quant_mode;
        q.n_bits = p.n_bits;
        inst.quantizer = q;
    }
    return inst;
}

IpnnModel apply_instance(const IpnnModel& model, const ImperfectionInstance& inst) {
    const std::size_t mesh_count = 2 * model.layers.size();
    if (inst.per_mesh.size() != mesh_count)
        throw std::invalid_argument("apply_instance: instance shape does not match model");
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        if (inst.per_mesh[2 * li].size() != model.layers[li].v_h_mesh.nodes.size() ||
            inst.per_mesh[2 * li + 1].size() != model.layers[li].u_mesh.nodes.size())
            throw std::invalid_argument("apply_instance: node count mismatch");
    }

    IpnnModel out = model;

    std::optional<QuantizerSpec> quantizer = inst.quantizer;
    if (quantizer && quantizer->mode == QuantMode::kc && !quantizer->kc_levels) {
        std::vector<double> population;
        for (const LinearLayer& layer : out.layers) {
            collect_mesh_phases(layer.v_h_mesh, population);
            collect_mesh_phases(layer.u_mesh, population);
        }
        quantizer->kc_levels = kmeans_phase_levels(population, quantizer->n_bits);
    }

    std::size_t mi = 0;
    for (LinearLayer& layer : out.layers) {
        for (MeshPlan* mesh : {&layer.v_h_mesh, &layer.u_mesh}) {
            const auto& deltas = inst.per_mesh[mi++];
            for (std::size_t ni = 0; ni < mesh->nodes.size(); ++ni) {
                MziNode& node = mesh->nodes[ni];
                const NodeDeltas& d = deltas[ni];
                double theta = node.phases.theta;
                double phi = node.phases.phi;
                if (quantizer) {
                    theta = quantize_phase(theta, *quantizer);
                    phi = quantize_phase(phi, *quantizer);
                }
                node.phases = PhasePair(theta + d.d_theta, phi + d.d_phi);
                node.splitters.r = clamp01(node.splitters.r + d.dr);
                node.splitters.t = clamp01(node.splitters.t + d.dt);
                node.splitters.r2 = clamp01(node.splitters.r2 + d.dr2);
                node.splitters.t2 = clamp01(node.splitters.t2 + d.dt2);
                node.loss = ArmLoss::uniform(insertion_loss_to_beta(d.il_db));
            }
        }
    }
    return out;
}

IpnnModel quantize_model(const IpnnModel& model, const std::vector<QuantizerSpec>& per_layer) {
    if (per_layer.size() != model.layers.size())
        throw std::invalid_argument("quantize_model: one spec per layer required");
    IpnnModel out = model;
    for (std::size_t li = 0; li < out.layers.size(); ++li) {
        QuantizerSpec spec = per_layer[li];
        if (spec.mode == QuantMode::kc && !spec.kc_levels) {
            std::vector<double> population;
            collect_mesh_phases(out.layers[li].v_h_mesh, population);
            collect_mesh_phases(out.layers[li].u_mesh, population);
            spec.kc_levels = kmeans_phase_levels(population, spec.n_bits);
        }
        quantize_mesh_phases(out.layers[li].v_h_mesh, spec);
        quantize_mesh_phases(out.layers[li].u_mesh, spec);
    }
    return out;
}

} // namespace mziforge
