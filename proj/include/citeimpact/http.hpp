#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace citeimpact {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Minimal HTTP client contract. Implementations throw TransportError when no
// response arrives at all; any HTTP status is returned as-is. Every call is
// counted, which lets tests assert how often the network was touched.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;

    HttpResponse get(const std::string& target, const HttpHeaders& headers = {});
    HttpResponse post(const std::string& target, const std::string& body,
                      const std::string& content_type, const HttpHeaders& headers = {});

    std::size_t calls() const noexcept { return calls_.load(); }

protected:
    virtual HttpResponse do_get(const std::string& target, const HttpHeaders& headers) = 0;
    virtual HttpResponse do_post(const std::string& target, const std::string& body,
                                 const std::string& content_type, const HttpHeaders& headers) = 0;

private:
    std::atomic<std::size_t> calls_{0};
};

// cpp-httplib backed transport. base_url is scheme://host[:port].
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(std::string base_url,
                              std::chrono::seconds read_timeout = std::chrono::seconds(60));
    ~HttplibTransport() override;

protected:
    HttpResponse do_get(const std::string& target, const HttpHeaders& headers) override;
    HttpResponse do_post(const std::string& target, const std::string& body,
                         const std::string& content_type, const HttpHeaders& headers) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Replays canned responses keyed by request target ("/path?query"). Unknown
// targets answer 404. Used for offline tests and recorded-fixture replay.
class FixtureTransport : public HttpTransport {
public:
    FixtureTransport() = default;

    void add(std::string target, HttpResponse response);
    // Loads {"responses": [{"target", "status", "body"}]} where body may be a
    // string or any JSON value (serialized compactly).
    static std::unique_ptr<FixtureTransport> from_file(const std::string& path);

    const std::vector<std::string>& requested() const noexcept { return requested_; }

protected:
    HttpResponse do_get(const std::string& target, const HttpHeaders& headers) override;
    HttpResponse do_post(const std::string& target, const std::string& body,
                         const std::string& content_type, const HttpHeaders& headers) override;

private:
    std::map<std::string, HttpResponse> responses_;
    std::vector<std::string> requested_;
    std::mutex mutex_;
};

std::string url_encode(std::string_view text);

} // namespace citeimpact
