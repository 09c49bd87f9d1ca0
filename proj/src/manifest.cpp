#include "mstates/manifest.hpp"

#include <json.hpp>

#include "mstates/io_util.hpp"

namespace mstates {

using json = nlohmann::ordered_json;

std::string manifest_to_json(const Manifest& manifest) {
    json stages = json::object();
    for (const auto& [name, record] : manifest.stages) {
        json outputs = json::object();
        for (const auto& [path, hash] : record.outputs) outputs[path] = hash;
        stages[name] = json{{"fingerprint", record.fingerprint}, {"outputs", std::move(outputs)}};
    }
    json params = json::object();
    for (const auto& [key, value] : manifest.parameters) params[key] = value;
    const json doc{{"parameters", std::move(params)},
                   {"input_fingerprint", manifest.input_fingerprint},
                   {"stages", std::move(stages)}};
    return doc.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& text) {
    const json doc = json::parse(text);
    Manifest manifest;
    for (const auto& [key, value] : doc.at("parameters").items()) {
        manifest.parameters[key] = value.get<std::string>();
    }
    manifest.input_fingerprint = doc.at("input_fingerprint").get<std::string>();
    for (const auto& [name, record] : doc.at("stages").items()) {
        StageRecord r;
        r.fingerprint = record.at("fingerprint").get<std::string>();
        for (const auto& [path, hash] : record.at("outputs").items()) {
            r.outputs[path] = hash.get<std::string>();
        }
        manifest.stages[name] = std::move(r);
    }
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return Manifest{};
    return manifest_from_json(read_text_file(path));
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    write_text_file(path, manifest_to_json(manifest));
}

}  // namespace mstates
