/*
 * config_io.hpp: JSON cluster configurations.
 *
 * Document shape:
 *   {
 *     "omega": 6.283185307179586,
 *     "hopping": 1.0,                       // optional, default 1
 *     "topology": { "type": "serial" },     // serial | parallel | identical_parallel
 *     "copies": 30,                         // required iff identical_parallel
 *     "channels": [ [ { "epsilon": 5.0,     // optional; number or [re, im]
 *                       "emitter": { "omega0": 4.0, "g": 1.0 } } ] ]
 *   }
 *
 * Parsing is strict: unknown keys and wrong types are rejected, and every
 * error names the offending document path (e.g. channels[1][0].emitter.g).
 * save_config(parse_config(text)) reproduces an equivalent document.
 */

#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cluster.hpp"
#include "types.hpp"

namespace crw {

namespace detail {

using nlohmann::json;
using nlohmann::ordered_json;

inline void require_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& path) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigParseError(
                path.empty() ? item.key() : path + "." + item.key(),
                "unknown key");
        }
    }
}

inline const json& require_field(const json& obj, const char* key,
                                 const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigParseError(path.empty() ? key : path + "." + key,
                               "required key is missing");
    }
    return *it;
}

inline double as_number(const json& value, const std::string& path) {
    if (!value.is_number()) {
        throw ConfigParseError(path, "expected a number");
    }
    return value.get<double>();
}

inline complex as_energy(const json& value, const std::string& path) {
    if (value.is_number()) {
        return complex(value.get<double>(), 0.0);
    }
    if (value.is_array() && value.size() == 2 && value[0].is_number() &&
        value[1].is_number()) {
        return complex(value[0].get<double>(), value[1].get<double>());
    }
    throw ConfigParseError(path, "expected a number or [re, im] pair");
}

inline CavitySite parse_site(const json& node, const std::string& path) {
    if (!node.is_object()) {
        throw ConfigParseError(path, "expected a site object");
    }
    require_keys(node, {"epsilon", "emitter"}, path);
    CavitySite site;
    if (auto it = node.find("epsilon"); it != node.end()) {
        site.epsilon = as_energy(*it, path + ".epsilon");
    }
    if (auto it = node.find("emitter"); it != node.end()) {
        const std::string emitter_path = path + ".emitter";
        if (!it->is_object()) {
            throw ConfigParseError(emitter_path, "expected an object");
        }
        require_keys(*it, {"omega0", "g"}, emitter_path);
        Emitter emitter;
        emitter.transition_frequency =
            as_number(require_field(*it, "omega0", emitter_path),
                      emitter_path + ".omega0");
        emitter.coupling = as_number(require_field(*it, "g", emitter_path),
                                     emitter_path + ".g");
        site.emitter = emitter;
    }
    return site;
}

inline ordered_json site_to_json(const CavitySite& site) {
    ordered_json node = ordered_json::object();
    if (site.epsilon) {
        if (site.epsilon->imag() == 0.0) {
            node["epsilon"] = site.epsilon->real();
        } else {
            node["epsilon"] = {site.epsilon->real(), site.epsilon->imag()};
        }
    }
    if (site.emitter) {
        node["emitter"] = {{"omega0", site.emitter->transition_frequency},
                           {"g", site.emitter->coupling}};
    }
    return node;
}

} // namespace detail

/// Parses and validates a configuration document. Schema problems raise
/// ConfigParseError, semantic problems ConfigValidationError; both carry
/// the document path of the offending value.
inline ClusterSpec parse_config(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigParseError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigParseError("", "top-level value must be an object");
    }
    detail::require_keys(doc, {"omega", "hopping", "topology", "copies",
                               "channels"},
                         "");

    ClusterSpec cluster;
    cluster.params.omega =
        detail::as_number(detail::require_field(doc, "omega", ""), "omega");
    if (auto it = doc.find("hopping"); it != doc.end()) {
        cluster.params.hopping = detail::as_number(*it, "hopping");
    }
    if (!(cluster.params.hopping > 0.0)) {
        throw ConfigValidationError("hopping", "must be positive");
    }

    const detail::json& topology = detail::require_field(doc, "topology", "");
    if (!topology.is_object()) {
        throw ConfigParseError("topology", "expected an object");
    }
    detail::require_keys(topology, {"type"}, "topology");
    const detail::json& type_node =
        detail::require_field(topology, "type", "topology");
    if (!type_node.is_string()) {
        throw ConfigParseError("topology.type", "expected a string");
    }
    const std::string type = type_node.get<std::string>();

    const detail::json& channels_node =
        detail::require_field(doc, "channels", "");
    if (!channels_node.is_array() || channels_node.empty()) {
        throw ConfigParseError("channels",
                               "expected a non-empty array of channels");
    }
    std::vector<std::vector<CavitySite>> channels;
    channels.reserve(channels_node.size());
    for (std::size_t i = 0; i < channels_node.size(); ++i) {
        const std::string channel_path =
            "channels[" + std::to_string(i) + "]";
        const detail::json& channel_node = channels_node[i];
        if (!channel_node.is_array()) {
            throw ConfigParseError(channel_path,
                                   "expected an array of sites");
        }
        std::vector<CavitySite> channel;
        channel.reserve(channel_node.size());
        for (std::size_t j = 0; j < channel_node.size(); ++j) {
            channel.push_back(detail::parse_site(
                channel_node[j],
                channel_path + "[" + std::to_string(j) + "]"));
        }
        channels.push_back(std::move(channel));
    }

    const bool has_copies = doc.contains("copies");
    if (type == "serial") {
        if (channels.size() != 1) {
            throw ConfigValidationError(
                "channels", "serial topology takes exactly one channel");
        }
        cluster.topology = Serial{std::move(channels.front())};
    } else if (type == "parallel") {
        cluster.topology = Parallel{std::move(channels)};
    } else if (type == "identical_parallel") {
        if (channels.size() != 1) {
            throw ConfigValidationError(
                "channels",
                "identical_parallel topology takes exactly one channel");
        }
        if (!has_copies) {
            throw ConfigParseError("copies",
                                   "required for identical_parallel");
        }
        const detail::json& copies_node = doc["copies"];
        if (!copies_node.is_number_integer()) {
            throw ConfigParseError("copies", "expected an integer");
        }
        cluster.topology =
            IdenticalParallel{std::move(channels.front()),
                              copies_node.get<long>()};
    } else {
        throw ConfigParseError(
            "topology.type",
            "expected serial, parallel, or identical_parallel");
    }
    if (has_copies && type != "identical_parallel") {
        throw ConfigValidationError(
            "copies", "only allowed with identical_parallel topology");
    }

    for (const Violation& v : validate(cluster)) {
        if (v.fatal) {
            throw ConfigValidationError(v.path, v.message);
        }
    }
    return cluster;
}

inline ClusterSpec load_config(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) {
        throw ConfigParseError("", "cannot open config file: " + file_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

inline detail::ordered_json to_json(const ClusterSpec& cluster) {
    detail::ordered_json doc;
    doc["omega"] = cluster.params.omega;
    doc["hopping"] = cluster.params.hopping;
    if (const auto* serial = std::get_if<Serial>(&cluster.topology)) {
        doc["topology"] = {{"type", "serial"}};
        detail::ordered_json channel = detail::ordered_json::array();
        for (const CavitySite& site : serial->sites) {
            channel.push_back(detail::site_to_json(site));
        }
        doc["channels"] = detail::ordered_json::array({channel});
    } else if (const auto* par = std::get_if<Parallel>(&cluster.topology)) {
        doc["topology"] = {{"type", "parallel"}};
        detail::ordered_json channels = detail::ordered_json::array();
        for (const auto& sites : par->channels) {
            detail::ordered_json channel = detail::ordered_json::array();
            for (const CavitySite& site : sites) {
                channel.push_back(detail::site_to_json(site));
            }
            channels.push_back(channel);
        }
        doc["channels"] = channels;
    } else {
        const auto& ident = std::get<IdenticalParallel>(cluster.topology);
        doc["topology"] = {{"type", "identical_parallel"}};
        doc["copies"] = ident.copies;
        detail::ordered_json channel = detail::ordered_json::array();
        for (const CavitySite& site : ident.channel) {
            channel.push_back(detail::site_to_json(site));
        }
        doc["channels"] = detail::ordered_json::array({channel});
    }
    return doc;
}

inline std::string save_config(const ClusterSpec& cluster) {
    return to_json(cluster).dump(2) + "\n";
}

} // namespace crw
