#pragma once

#include "citeimpact/http.hpp"
#include "citeimpact/judge.hpp"

#include <optional>
#include <string>

namespace citeimpact {

// Reads the provider key from CRISP_PROVIDER_API_KEY, if set.
std::optional<std::string> provider_api_key_from_env();

// OpenAI-compatible chat-completion adapter: POST <path> with a single user
// message; the completion is choices[0].message.content. Non-2xx responses
// raise TransportError (429/5xx) or Error.
class ChatCompletionProvider : public ProviderAdapter {
public:
    ChatCompletionProvider(HttpTransport& transport, std::optional<std::string> api_key,
                           std::string path = "/v1/chat/completions");

    // Request body sent for prompt under config; exposed for tests.
    static std::string request_body(std::string_view prompt, const JudgeConfig& config);

protected:
    std::string do_complete(const CompletionRequest& request) override;

private:
    HttpTransport& transport_;
    std::optional<std::string> api_key_;
    std::string path_;
};

} // namespace citeimpact
