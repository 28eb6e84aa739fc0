#include <httplib.h>
#include <nlohmann/json.hpp>

#include "glow/sparql.hpp"
#include "http.hpp"

namespace glow::sparql {

namespace {

std::string kind_name(EndpointError::Kind k) {
    switch (k) {
        case EndpointError::Kind::transport: return "transport error";
        case EndpointError::Kind::status: return "HTTP error";
        case EndpointError::Kind::malformed: return "malformed results";
    }
    return "error";
}

}  // namespace

EndpointError::EndpointError(Kind kind, std::string url, int status, const std::string& detail)
    : Error("SPARQL endpoint " + url + ": " + kind_name(kind) +
            (status ? " (status " + std::to_string(status) + ")" : std::string()) + ": " + detail),
      kind_(kind),
      url_(std::move(url)),
      status_(status) {}

namespace {

ResultSet parse_results_doc(std::string_view body) {
    auto doc = nlohmann::json::parse(body);
    ResultSet rs;
    for (const auto& v : doc.at("head").at("vars")) rs.columns.push_back(v.get<std::string>());
    for (const auto& binding : doc.at("results").at("bindings")) {
        std::vector<kg::Term> row;
        row.reserve(rs.columns.size());
        for (const auto& col : rs.columns) {
            auto it = binding.find(col);
            if (it == binding.end()) {
                row.push_back(kg::Term::literal(""));
                continue;
            }
            auto type = it->at("type").get<std::string>();
            auto value = it->at("value").get<std::string>();
            if (type == "uri") {
                row.push_back(kg::Term::iri(std::move(value)));
            } else if (type == "bnode") {
                row.push_back(kg::Term::iri("_:" + value));
            } else if (type == "literal" || type == "typed-literal") {
                row.push_back(kg::Term::literal(std::move(value)));
            } else {
                throw nlohmann::json::other_error::create(501, "unknown binding type '" + type + "'", nullptr);
            }
        }
        rs.rows.push_back(std::move(row));
    }
    return rs;
}

}  // namespace

ResultSet parse_results_json(std::string_view body) {
    try {
        return parse_results_doc(body);
    } catch (const nlohmann::json::exception& e) {
        throw EndpointError(EndpointError::Kind::malformed, "", 0, e.what());
    }
}

ResultSet execute_remote(std::string_view query_text, const std::string& endpoint_url, const RemoteOptions& options) {
    const http::Headers headers{{"Accept", "application/sparql-results+json"}};
    http::Response res;
    try {
        if (options.use_post) {
            httplib::Params params{{"query", std::string(query_text)}};
            res = http::post(endpoint_url, httplib::detail::params_to_query_str(params),
                             "application/x-www-form-urlencoded", headers, options.timeout);
        } else {
            auto sep = endpoint_url.find('?') == std::string::npos ? "?" : "&";
            auto url = endpoint_url + sep + "query=" + httplib::detail::encode_query_param(std::string(query_text));
            res = http::get(url, headers, options.timeout);
        }
    } catch (const http::TransportError& e) {
        throw EndpointError(EndpointError::Kind::transport, endpoint_url, 0, e.what());
    } catch (const Error& e) {
        throw EndpointError(EndpointError::Kind::transport, endpoint_url, 0, e.what());
    }
    if (res.status != 200) {
        throw EndpointError(EndpointError::Kind::status, endpoint_url, res.status, res.body.substr(0, 200));
    }
    try {
        return parse_results_doc(res.body);
    } catch (const nlohmann::json::exception& e) {
        throw EndpointError(EndpointError::Kind::malformed, endpoint_url, res.status, e.what());
    }
}

}  // namespace glow::sparql
