#include <algorithm>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "svx/errors.hpp"

namespace svx::cli {

namespace {

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << v.get<double>();
        return os.str();
    }
    throw ConfigError("config key '" + key + "' must be a string, number or list");
}

}  // namespace

std::vector<std::string> config_tokens(const std::filesystem::path& path, const std::string& subcommand,
                                       const std::function<int(const std::string&)>& known) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    if (!doc.contains("schema") || doc["schema"] != kConfigSchema)
        throw ConfigError(std::string("config file must declare \"schema\": \"") + kConfigSchema + "\"");

    static const char* sections[] = {"schema", "slic", "features", "rag", "refine", "schedule", "metrics", "phantom", "bench"};
    for (const auto& [key, value] : doc.items())
        if (std::find(std::begin(sections), std::end(sections), key) == std::end(sections))
            throw ConfigError("config file has unknown section '" + key + "'");

    std::vector<std::string> out;
    auto it = doc.find(subcommand);
    if (it == doc.end()) return out;
    if (!it->is_object()) throw ConfigError("config section '" + subcommand + "' must be an object");
    for (const auto& [key, value] : it->items()) {
        const int kind = key == "config" ? 0 : known(key);
        if (kind == 0) throw ConfigError("config key '" + subcommand + "." + key + "' is not a flag of " + subcommand);
        if (kind == 1) {
            if (!value.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
            if (value.get<bool>()) out.push_back("--" + key);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + scalar_text(value[i], key);
        } else {
            text = scalar_text(value, key);
        }
        out.push_back("--" + key);
        out.push_back(text);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParamError(std::string(what) + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw ParamError(std::string(what) + " is empty");
    return out;
}

}  // namespace svx::cli
