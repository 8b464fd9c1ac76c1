#include "citeimpact/chat_provider.hpp"

#include "citeimpact/errors.hpp"

#include <json.hpp>

#include <cstdlib>

using nlohmann::json;

namespace citeimpact {

std::optional<std::string> provider_api_key_from_env() {
    if (const char* v = std::getenv("CRISP_PROVIDER_API_KEY"); v != nullptr && *v != '\0') {
        return std::string(v);
    }
    return std::nullopt;
}

ChatCompletionProvider::ChatCompletionProvider(HttpTransport& transport, std::optional<std::string> api_key,
                                               std::string path)
    : transport_(transport), api_key_(std::move(api_key)), path_(std::move(path)) {}

std::string ChatCompletionProvider::request_body(std::string_view prompt, const JudgeConfig& config) {
    nlohmann::ordered_json body;
    body["model"] = config.model;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
    if (config.temperature) body["temperature"] = *config.temperature;
    if (config.top_p) body["top_p"] = *config.top_p;
    return body.dump();
}

std::string ChatCompletionProvider::do_complete(const CompletionRequest& request) {
    HttpHeaders headers;
    if (api_key_) headers.emplace_back("Authorization", "Bearer " + *api_key_);
    const auto res = transport_.post(path_, request_body(request.prompt, request.config), "application/json", headers);
    if (res.status == 429 || res.status >= 500) {
        throw TransportError("provider returned HTTP " + std::to_string(res.status));
    }
    if (res.status < 200 || res.status >= 300) {
        throw Error("provider returned HTTP " + std::to_string(res.status) + ": " + res.body);
    }
    try {
        const auto doc = json::parse(res.body);
        const auto& content = doc.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw ParseError("completion content is not a string", res.body);
        return content.get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed provider response: ") + e.what(), res.body);
    }
}

} // namespace citeimpact
