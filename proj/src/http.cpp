#include "citeimpact/http.hpp"

#include "citeimpact/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <fstream>

namespace citeimpact {

HttpResponse HttpTransport::get(const std::string& target, const HttpHeaders& headers) {
    ++calls_;
    return do_get(target, headers);
}

HttpResponse HttpTransport::post(const std::string& target, const std::string& body,
                                 const std::string& content_type, const HttpHeaders& headers) {
    ++calls_;
    return do_post(target, body, content_type, headers);
}

struct HttplibTransport::Impl {
    std::string base_url;
    std::chrono::seconds read_timeout;

    // httplib::Client is not safe for concurrent use, so each call builds its own.
    httplib::Client client() const {
        httplib::Client c(base_url);
        c.set_connection_timeout(std::chrono::seconds(15));
        c.set_read_timeout(read_timeout);
        c.set_follow_location(true);
        return c;
    }
};

namespace {

httplib::Headers to_httplib(const HttpHeaders& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
}

HttpResponse convert(const httplib::Result& res, const std::string& target) {
    if (!res) {
        throw TransportError("request to " + target + " failed: " + httplib::to_string(res.error()));
    }
    return {res->status, res->body};
}

} // namespace

HttplibTransport::HttplibTransport(std::string base_url, std::chrono::seconds read_timeout)
    : impl_(std::make_unique<Impl>()) {
    impl_->base_url = std::move(base_url);
    impl_->read_timeout = read_timeout;
}

HttplibTransport::~HttplibTransport() = default;

HttpResponse HttplibTransport::do_get(const std::string& target, const HttpHeaders& headers) {
    auto c = impl_->client();
    return convert(c.Get(target, to_httplib(headers)), target);
}

HttpResponse HttplibTransport::do_post(const std::string& target, const std::string& body,
                                       const std::string& content_type, const HttpHeaders& headers) {
    auto c = impl_->client();
    return convert(c.Post(target, to_httplib(headers), body, content_type), target);
}

void FixtureTransport::add(std::string target, HttpResponse response) {
    std::lock_guard lock(mutex_);
    responses_[std::move(target)] = std::move(response);
}

std::unique_ptr<FixtureTransport> FixtureTransport::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open fixture file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("fixture file " + path + ": " + e.what());
    }
    auto t = std::make_unique<FixtureTransport>();
    for (const auto& r : doc.at("responses")) {
        const auto& body = r.at("body");
        t->add(r.at("target").get<std::string>(),
              {r.value("status", 200), body.is_string() ? body.get<std::string>() : body.dump()});
    }
    return t;
}

HttpResponse FixtureTransport::do_get(const std::string& target, const HttpHeaders&) {
    std::lock_guard lock(mutex_);
    requested_.push_back(target);
    auto it = responses_.find(target);
    if (it == responses_.end()) {
        return {404, R"({"error":"Not found"})"};
    }
    return it->second;
}

HttpResponse FixtureTransport::do_post(const std::string& target, const std::string&,
                                       const std::string&, const HttpHeaders& headers) {
    return do_get(target, headers);
}

std::string url_encode(std::string_view text) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

} // namespace citeimpact
