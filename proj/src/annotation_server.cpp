#include "citeimpact/annotation_server.hpp"

#include <httplib.h>

namespace citeimpact {

struct AnnotationServer::Impl {
    AnnotationStore& store;
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const StoreReply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

} // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store, std::optional<std::filesystem::path> static_dir)
    : impl_(new Impl{store, {}}) {
    auto& srv = impl_->server;
    auto& st = impl_->store;

    srv.Get("/tasks", [&st](const httplib::Request&, httplib::Response& res) { reply(res, st.list()); });
    srv.Get(R"(/tasks/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
        reply(res, st.get(req.matches[1]));
    });
    srv.Post(R"(/tasks/([^/]+)/ranking)", [&st](const httplib::Request& req, httplib::Response& res) {
        const auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded()) {
            reply(res, {400, {{"error", "request body is not valid JSON"}}});
            return;
        }
        reply(res, st.submit(req.matches[1], body));
    });
    srv.Get(R"(/tasks/([^/]+)/agreement)", [&st](const httplib::Request& req, httplib::Response& res) {
        reply(res, st.agreement(req.matches[1]));
    });
    if (static_dir) srv.set_mount_point("/", static_dir->string());
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool AnnotationServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace citeimpact
