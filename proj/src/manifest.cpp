#include "legible/manifest.hpp"

#include "legible/qtable_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace legible {

using nlohmann::json;

namespace {

json transform_to_json(const DistributionModel& m) {
    json doc;
    doc["kind"] = to_string(m);
    if (const auto* b = std::get_if<Boltzmann>(&m)) doc["temperature"] = b->temperature;
    if (const auto* e = std::get_if<EpsilonGreedy>(&m)) doc["epsilon"] = e->epsilon;
    return doc;
}

DistributionModel transform_from_json(const json& doc) {
    return parse_distribution_model(doc.at("kind").get<std::string>(), doc.value("epsilon", 0.1),
                                    doc.value("temperature", 1.0));
}

} // namespace

std::string EnsembleManifest::to_json() const {
    json doc;
    json env;
    env["kind"] = env_kind;
    if (env_kind == "gridworld") {
        env["size"] = grid_size;
        json goals = json::array();
        for (const auto& [r, c] : grid_goals) goals.push_back({r, c});
        env["goals"] = std::move(goals);
    } else if (env_kind == "tunnel") {
        if (!tunnel_spec) throw std::invalid_argument("manifest: tunnel spec missing");
        env["spec"] = json::parse(tunnel_spec_to_json(*tunnel_spec));
    } else {
        throw std::invalid_argument("manifest: unknown environment kind " + env_kind);
    }
    doc["environment"] = std::move(env);
    doc["policies"] = qtable_files;
    doc["pursued_index"] = pursued_index;
    doc["prior"] = prior;
    doc["transform_f"] = transform_to_json(transform_f);
    doc["transform_g"] = transform_to_json(transform_g);
    return doc.dump(1);
}

EnsembleManifest EnsembleManifest::from_json(const std::string& text) {
    const json doc = json::parse(text);
    EnsembleManifest m;
    const json& env = doc.at("environment");
    m.env_kind = env.at("kind").get<std::string>();
    if (m.env_kind == "gridworld") {
        m.grid_size = env.at("size").get<int>();
        for (const auto& goal : env.at("goals"))
            m.grid_goals.push_back({goal.at(0).get<int>(), goal.at(1).get<int>()});
    } else if (m.env_kind == "tunnel") {
        m.tunnel_spec = tunnel_spec_from_json(env.at("spec").dump());
    } else {
        throw std::runtime_error("manifest: unknown environment kind " + m.env_kind);
    }
    m.qtable_files = doc.at("policies").get<std::vector<std::string>>();
    m.pursued_index = doc.at("pursued_index").get<int>();
    m.prior = doc.at("prior").get<std::vector<double>>();
    m.transform_f = transform_from_json(doc.at("transform_f"));
    m.transform_g = transform_from_json(doc.at("transform_g"));
    return m;
}

void save_manifest(const EnsembleManifest& m, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("save_manifest: cannot open " + file.string());
    out << m.to_json() << '\n';
    if (!out) throw std::runtime_error("save_manifest: write failed for " + file.string());
}

EnsembleManifest load_manifest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("load_manifest: cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return EnsembleManifest::from_json(text);
}

PolicyEnsemble load_ensemble(const EnsembleManifest& m, const std::filesystem::path& manifest_dir,
                             std::size_t pursued_index) {
    if (m.qtable_files.empty()) throw std::runtime_error("load_ensemble: no policy files listed");
    if (m.prior.size() != m.qtable_files.size())
        throw std::runtime_error("load_ensemble: prior size does not match policy count");

    std::size_t expected_states = 0;
    std::size_t expected_actions = 0;
    if (m.env_kind == "gridworld") {
        expected_states = static_cast<std::size_t>(m.grid_size) * m.grid_size;
        expected_actions = 4;
    } else {
        expected_states = observation_space_size(m.tunnel_spec->width);
        expected_actions = kTunnelActionCount;
    }

    std::vector<QTable> tables;
    tables.reserve(m.qtable_files.size());
    for (const std::string& file : m.qtable_files) {
        QTable q = load_qtable(manifest_dir / file);
        if (q.state_count() != expected_states || q.action_count() != expected_actions)
            throw std::runtime_error("load_ensemble: " + file +
                                     " does not match the manifest environment dimensions");
        tables.push_back(std::move(q));
    }
    return PolicyEnsemble(std::move(tables), pursued_index);
}

} // namespace legible
