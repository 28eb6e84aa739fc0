#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "glow/error.hpp"

// Thin blocking HTTP helpers over cpp-httplib, kept out of the public headers.
namespace glow::http {

struct Url {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 80;
    std::string path;  // includes the query string, never empty

    std::string origin() const;
};

/// Throws glow::Error on anything that is not http(s)://host[:port][/path].
Url parse_url(const std::string& url);

/// Joins a base URL and a path, collapsing a duplicated '/'.
std::string join(const std::string& base, const std::string& path);

struct Response {
    int status = 0;
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// Connection or timeout failure; never thrown for HTTP error statuses.
class TransportError : public Error {
public:
    using Error::Error;
};

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              const Headers& headers, std::chrono::milliseconds timeout);

Response get(const std::string& url, const Headers& headers, std::chrono::milliseconds timeout);

}  // namespace glow::http
