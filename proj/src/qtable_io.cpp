#include "legible/qtable_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace legible {

using nlohmann::json;

std::string qtable_to_json(const QTable& q) {
    if (!q.all_finite())
        throw std::invalid_argument("qtable_to_json: table contains non-finite values");
    json doc;
    doc["state_count"] = q.state_count();
    doc["action_count"] = q.action_count();
    doc["fingerprint"] = q.fingerprint();
    json rows = json::array();
    for (StateId s = 0; s < q.state_count(); ++s) {
        json row = json::array();
        for (ActionId a = 0; a < q.action_count(); ++a) row.push_back(q.at(s, a));
        rows.push_back(std::move(row));
    }
    doc["values"] = std::move(rows);
    return doc.dump(1);
}

QTable qtable_from_json(const std::string& text) {
    const json doc = json::parse(text);
    const auto states = doc.at("state_count").get<std::size_t>();
    const auto actions = doc.at("action_count").get<std::size_t>();
    QTable q(states, actions);
    q.set_fingerprint(doc.at("fingerprint").get<std::string>());
    const json& rows = doc.at("values");
    if (rows.size() != states) throw std::runtime_error("qtable_from_json: row count mismatch");
    for (StateId s = 0; s < states; ++s) {
        const json& row = rows[s];
        if (row.size() != actions)
            throw std::runtime_error("qtable_from_json: column count mismatch");
        for (ActionId a = 0; a < actions; ++a) q.set(s, a, row[a].get<double>());
    }
    return q;
}

void save_qtable(const QTable& q, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("save_qtable: cannot open " + file.string());
    out << qtable_to_json(q) << '\n';
    if (!out) throw std::runtime_error("save_qtable: write failed for " + file.string());
}

QTable load_qtable(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("load_qtable: cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return qtable_from_json(text);
}

} // namespace legible
