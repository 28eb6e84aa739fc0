#include "http.hpp"

#include <httplib.h>

#include <regex>

namespace glow::http {

std::string Url::origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
}

Url parse_url(const std::string& url) {
    static const std::regex re(R"(^(https?)://([^/:?#]+)(?::(\d+))?([^#]*)$)", std::regex::icase);
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error("unsupported URL '" + url + "'");
    Url u;
    u.scheme = m[1].str();
    for (auto& c : u.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    u.host = m[2].str();
    u.port = m[3].matched ? std::stoi(m[3].str()) : (u.scheme == "https" ? 443 : 80);
    u.path = m[4].str();
    if (u.path.empty() || u.path.front() != '/') u.path = "/" + u.path;
    return u;
}

std::string join(const std::string& base, const std::string& path) {
    if (base.empty()) return path;
    if (!base.empty() && base.back() == '/' && !path.empty() && path.front() == '/') return base + path.substr(1);
    if (base.back() != '/' && !path.empty() && path.front() != '/') return base + "/" + path;
    return base + path;
}

namespace {

template <class Fn>
Response with_client(const std::string& url, std::chrono::milliseconds timeout, Fn&& fn) {
    auto u = parse_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (u.scheme == "https") throw TransportError("https is unavailable in this build: " + url);
#endif
    httplib::Client client(u.origin());
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Result res = fn(client, u.path);
    if (!res) throw TransportError(url + ": " + httplib::to_string(res.error()));
    Response out;
    out.status = res->status;
    out.body = res->body;
    for (const auto& [k, v] : res->headers) out.headers.emplace_back(k, v);
    return out;
}

httplib::Headers to_httplib(const Headers& headers) {
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    return h;
}

}  // namespace

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              const Headers& headers, std::chrono::milliseconds timeout) {
    return with_client(url, timeout, [&](httplib::Client& c, const std::string& path) {
        return c.Post(path, to_httplib(headers), body, content_type);
    });
}

Response get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout) {
    return with_client(url, timeout, [&](httplib::Client& c, const std::string& path) {
        return c.Get(path, to_httplib(headers));
    });
}

}  // namespace glow::http
