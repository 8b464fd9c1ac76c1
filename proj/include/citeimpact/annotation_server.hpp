#pragma once

#include "citeimpact/annotation.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace citeimpact {

// HTTP front end of an AnnotationStore:
//   GET /tasks, GET /tasks/{id}, POST /tasks/{id}/ranking, GET /tasks/{id}/agreement
// plus the static UI bundle at / when static_dir is given.
class AnnotationServer {
public:
    AnnotationServer(AnnotationStore& store, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~AnnotationServer();

    // Binds to an OS-chosen port and returns it.
    int bind_any_port(const std::string& host = "127.0.0.1");
    bool bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace citeimpact
