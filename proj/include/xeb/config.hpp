#pragma once

// Experiment configuration: JSON round-trip (bit-exact through shortest
// round-trip doubles), validation, named presets, and circuit serialization.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xeb/circuit.hpp"
#include "xeb/samplers.hpp"

namespace xeb {

struct ExperimentConfig {
    std::vector<int> n_list;
    int depth = 6;
    Topology topology = Topology::all_to_all;
    std::vector<double> gamma_list{0.0};
    SamplerKind sampler = SamplerKind::noisy;
    int block_size = 0;   // spoofer: 0 = default ceil(log2 n)
    int depth_boost = 0;  // spoofer: 0 = default
    std::uint64_t samples = 1;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    bool fit_slope = true;
    bool overlay_analytic = true;

    void validate() const {
        if (n_list.empty()) throw std::invalid_argument("config: n_list must be nonempty");
        for (int n : n_list) {
            if (n < 2 || n % 2 != 0 || n > 24)
                throw std::invalid_argument("config: n values must be even and in [2, 24]");
            if (sampler == SamplerKind::spoofer && block_size > n)
                throw std::invalid_argument("config: block_size exceeds some n");
        }
        if (depth < 1) throw std::invalid_argument("config: depth >= 1 required");
        if (samples < 1) throw std::invalid_argument("config: samples >= 1 required");
        if (gamma_list.empty()) throw std::invalid_argument("config: gamma_list must be nonempty");
        for (double g : gamma_list)
            if (g < 0.0) throw std::invalid_argument("config: gamma >= 0 required");
        if (block_size < 0 || depth_boost < 0)
            throw std::invalid_argument("config: block_size/depth_boost must be >= 0");
    }
};

inline nlohmann::ordered_json config_to_json_value(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["n_list"] = c.n_list;
    j["depth"] = c.depth;
    j["topology"] = to_string(c.topology);
    j["gamma_list"] = c.gamma_list;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["sampler"] = to_string(c.sampler);
    j["output_dir"] = c.output_dir;
    j["block_size"] = c.block_size;
    j["depth_boost"] = c.depth_boost;
    j["fit_slope"] = c.fit_slope;
    j["overlay_analytic"] = c.overlay_analytic;
    return j;
}

inline std::string config_to_json(const ExperimentConfig& c) {
    return config_to_json_value(c).dump(2) + "\n";
}

inline ExperimentConfig config_from_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    ExperimentConfig c;
    c.n_list = j.at("n_list").get<std::vector<int>>();
    c.depth = j.at("depth").get<int>();
    c.topology = topology_from_string(j.at("topology").get<std::string>());
    c.gamma_list = j.at("gamma_list").get<std::vector<double>>();
    c.samples = j.at("samples").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.sampler = sampler_kind_from_string(j.at("sampler").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("block_size")) c.block_size = j.at("block_size").get<int>();
    if (j.contains("depth_boost")) c.depth_boost = j.at("depth_boost").get<int>();
    if (j.contains("fit_slope")) c.fit_slope = j.at("fit_slope").get<bool>();
    if (j.contains("overlay_analytic")) c.overlay_analytic = j.at("overlay_analytic").get<bool>();
    c.validate();
    return c;
}

// One-command reproductions of the standard runs.
inline ExperimentConfig preset(const std::string& name) {
    if (name == "appendixA-alltoall-d6") {
        ExperimentConfig c;
        c.n_list = {8, 10, 12, 14, 16};
        c.depth = 6;
        c.topology = Topology::all_to_all;
        c.gamma_list = {0.0, 0.3};
        c.sampler = SamplerKind::noisy;  // gamma = 0 points run (and are tagged) clean
        c.samples = 10000;
        c.seed = 20260822;
        c.output_dir = ".";
        return c;
    }
    throw std::invalid_argument("unknown preset: " + name +
                                " (available: appendixA-alltoall-d6)");
}

// Circuit JSON: topology, seed, layer pair lists with row-major matrices.
inline nlohmann::ordered_json circuit_to_json_value(const Circuit& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["topology"] = to_string(c.topology);
    j["seed"] = c.seed;
    auto layers = nlohmann::ordered_json::array();
    for (const Layer& layer : c.layers) {
        auto jl = nlohmann::ordered_json::array();
        for (const Gate& g : layer.gates) {
            nlohmann::ordered_json jg;
            jg["pair"] = {g.a, g.b};
            jg["re"] = g.u.re;
            jg["im"] = g.u.im;
            jl.push_back(std::move(jg));
        }
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    if (!c.noise_log.empty()) {
        auto jn = nlohmann::ordered_json::array();
        for (const PauliInsertion& p : c.noise_log)
            jn.push_back({p.layer, p.gate, p.qubit, p.pauli});
        j["noise_log"] = std::move(jn);
    }
    return j;
}

inline std::string circuit_to_json(const Circuit& c) {
    return circuit_to_json_value(c).dump() + "\n";
}

inline Circuit circuit_from_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    Circuit c;
    c.n = j.at("n").get<int>();
    c.topology = topology_from_string(j.at("topology").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jl : j.at("layers")) {
        Layer layer;
        for (const auto& jg : jl) {
            Gate g;
            g.a = jg.at("pair").at(0).get<int>();
            g.b = jg.at("pair").at(1).get<int>();
            const auto re = jg.at("re").get<std::vector<double>>();
            const auto im = jg.at("im").get<std::vector<double>>();
            if (re.size() != 16 || im.size() != 16)
                throw std::invalid_argument("circuit json: gate matrices must have 16 entries");
            std::copy(re.begin(), re.end(), g.u.re.begin());
            std::copy(im.begin(), im.end(), g.u.im.begin());
            layer.gates.push_back(std::move(g));
        }
        c.layers.push_back(std::move(layer));
    }
    if (j.contains("noise_log"))
        for (const auto& jp : j.at("noise_log"))
            c.noise_log.push_back({jp.at(0).get<int>(), jp.at(1).get<int>(),
                                   jp.at(2).get<int>(), jp.at(3).get<int>()});
    return c;
}

}  // namespace xeb
