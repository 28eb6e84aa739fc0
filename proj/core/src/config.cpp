#include "glow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "glow/text.hpp"

namespace glow {

namespace pt = boost::property_tree;

const KgConfig& Config::kg(std::string_view name) const {
    auto it = kgs.find(text::to_lower(name));
    if (it == kgs.end()) throw ConfigError("no knowledge graph named '" + std::string(name) + "' in the config");
    return it->second;
}

namespace {

template <typename T>
T get(const pt::ptree& section, const std::string& section_name, const std::string& key, T fallback) {
    // get<T>(key, fallback) swallows conversion failures, so look the key up first.
    if (!section.get_child_optional(key)) return fallback;
    try {
        return section.get<T>(key);
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError("[" + section_name + "] " + key + " has an invalid value");
    }
}

void read_model(const pt::ptree& s, const std::string& name, llm::ModelSettings& m) {
    m.model_id = get<std::string>(s, name, "model", m.model_id);
    m.temperature = get<double>(s, name, "temperature", m.temperature);
    m.max_tokens = get<int>(s, name, "max_tokens", m.max_tokens);
    if (s.get_child_optional("seed")) m.seed = get<std::int64_t>(s, name, "seed", 0);
}

}  // namespace

Config parse_config(std::istream& in, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    Config c;
    c.answer_model.max_tokens = 64;
    c.judge_model.max_tokens = 512;
    for (const auto& [section, body] : tree) {
        if (section == "llm") {
            c.llm.endpoint = get<std::string>(body, section, "endpoint", "");
            c.llm.api_key_env = get<std::string>(body, section, "api_key_env", c.llm.api_key_env);
            c.llm.max_attempts = get<int>(body, section, "max_attempts", c.llm.max_attempts);
            c.llm.timeout = std::chrono::milliseconds(get<long>(body, section, "timeout_ms", c.llm.timeout.count()));
            c.llm.max_in_flight = get<int>(body, section, "max_in_flight", c.llm.max_in_flight);
            read_model(body, section, c.answer_model);
        } else if (section == "judge") {
            read_model(body, section, c.judge_model);
        } else if (section == "gnn") {
            c.gnn_endpoint = get<std::string>(body, section, "endpoint", "");
            c.gnn_timeout = std::chrono::milliseconds(get<long>(body, section, "timeout_ms", c.gnn_timeout.count()));
        } else if (section == "pipeline") {
            auto& p = c.pipeline;
            p.top_k = get<int>(body, section, "top_k", p.top_k);
            p.cap_g = get<std::size_t>(body, section, "cap_g", p.cap_g);
            p.cap_gn = get<std::size_t>(body, section, "cap_gn", p.cap_gn);
            p.concurrency = get<int>(body, section, "concurrency", p.concurrency);
            p.llm_sparql = get<bool>(body, section, "llm_sparql", p.llm_sparql);
            p.judge_batch = get<std::size_t>(body, section, "judge_batch", p.judge_batch);
            if (p.top_k < 1) throw ConfigError("[pipeline] top_k must be at least 1");
            if (p.concurrency < 1) throw ConfigError("[pipeline] concurrency must be at least 1");
            if (p.judge_batch < 1) throw ConfigError("[pipeline] judge_batch must be at least 1");
        } else if (section.rfind("kg.", 0) == 0) {
            KgConfig k;
            k.name = section.substr(3);
            if (k.name.empty()) throw ConfigError("[kg.] section needs a name");
            k.triples = get<std::string>(body, section, "triples", "");
            k.endpoint = get<std::string>(body, section, "endpoint", "");
            k.prefix = get<std::string>(body, section, "prefix", "");
            k.description = get<std::string>(body, section, "description", k.name);
            k.domain = get<std::string>(body, section, "domain", "G");
            k.typing_predicate = get<std::string>(body, section, "typing_predicate", "");
            auto format = text::to_lower(get<std::string>(body, section, "format", "ntriples"));
            if (format == "ntriples" || format == "nt") {
                k.format = kg::TripleFormat::ntriples;
            } else if (format == "tsv") {
                k.format = kg::TripleFormat::tsv;
            } else {
                throw ConfigError("[" + section + "] format must be ntriples or tsv");
            }
            if (k.triples.empty() == k.endpoint.empty()) {
                throw ConfigError("[" + section + "] needs exactly one of triples or endpoint");
            }
            if (!k.triples.empty() && std::filesystem::path(k.triples).is_relative()) {
                k.triples = (std::filesystem::path(base_dir) / k.triples).lexically_normal().string();
            }
            c.kgs[text::to_lower(k.name)] = std::move(k);
        } else {
            throw ConfigError("unknown config section [" + section + "]");
        }
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    auto base = std::filesystem::path(path).parent_path().string();
    return parse_config(in, base.empty() ? "." : base);
}

}  // namespace glow
