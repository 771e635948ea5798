#pragma once

#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "autopkg/embedding.hpp"
#include "autopkg/error.hpp"
#include "autopkg/listing.hpp"

namespace autopkg {

struct GenerationParams {
    double temperature = 0.7;
    double top_p = 0.8;
    int top_k = 20;
    int max_new_tokens = 6400;
};

namespace detail {

/// Splits "http://host:1234/v1/x" into ("http://host:1234", "/v1/x").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        raise(Errc::BackendFailure, "endpoint '" + url + "' has no scheme");
    size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

} // namespace detail

/// Chat-completion HTTP client (OpenAI-style wire format). One retry with
/// backoff on transport trouble, then BackendFailure.
class ChatClient {
  public:
    ChatClient(std::string endpoint, std::string model, std::string api_key = "",
               int timeout_seconds = 120)
        : endpoint_(std::move(endpoint)), model_(std::move(model)), api_key_(std::move(api_key)),
          timeout_seconds_(timeout_seconds) {}

    const std::string& model() const { return model_; }
    const std::string& endpoint() const { return endpoint_; }

    std::string chat(const std::string& prompt, const std::vector<std::string>& images = {},
                     const GenerationParams& params = {}) const {
        if (images.size() > kMaxImagesPerListing)
            raise(Errc::DomainError, "request carries " + std::to_string(images.size()) +
                                         " images (max " +
                                         std::to_string(kMaxImagesPerListing) + ")");
        ojson content = ojson::array();
        content.push_back({{"type", "text"}, {"text", prompt}});
        for (const auto& url : images)
            content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
        ojson body;
        body["model"] = model_;
        body["messages"] = ojson::array({ojson{{"role", "user"}, {"content", content}}});
        body["temperature"] = params.temperature;
        body["top_p"] = params.top_p;
        body["top_k"] = params.top_k;
        body["max_tokens"] = params.max_new_tokens;

        std::string reply = post_json(body.dump(), "chat");
        try {
            ojson j = ojson::parse(reply);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& ex) {
            raise(Errc::BackendFailure, std::string("malformed chat response: ") + ex.what());
        }
    }

  protected:
    std::string post_json(const std::string& body, const char* what) const {
        auto [base, path] = detail::split_url(endpoint_);
        std::string last_error;
        for (int attempt = 0; attempt < 2; ++attempt) {
            if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
            httplib::Client client(base);
            client.set_read_timeout(timeout_seconds_, 0);
            client.set_connection_timeout(10, 0);
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
            auto res = client.Post(path, headers, body, "application/json");
            if (!res) {
                last_error = std::string(what) + " transport error: " +
                             httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = std::string(what) + " HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200);
                // 5xx may be transient; 4xx will not improve on retry.
                if (res->status < 500) break;
                continue;
            }
            return res->body;
        }
        raise(Errc::BackendFailure, last_error);
    }

    std::string endpoint_;
    std::string model_;
    std::string api_key_;
    int timeout_seconds_;
};

/// Remote embedding provider: POST {"input": [text], "model": m}, unit-norm
/// vector back. Wraps the same transport/retry rules as ChatClient.
class HttpEmbedder final : public Embedder, private ChatClient {
  public:
    HttpEmbedder(std::string endpoint, std::string model, std::string api_key = "",
                 int timeout_seconds = 60)
        : ChatClient(std::move(endpoint), std::move(model), std::move(api_key), timeout_seconds) {}

    std::vector<float> embed(std::string_view text) override {
        ojson body;
        body["input"] = ojson::array({std::string(text)});
        body["model"] = model_;
        std::string reply;
        try {
            reply = post_json(body.dump(), "embed");
        } catch (const Error& e) {
            raise(Errc::ProviderFailure, e.what());
        }
        std::vector<float> v;
        try {
            ojson j = ojson::parse(reply);
            const ojson& vec = j.contains("data") ? j.at("data").at(0).at("embedding")
                                                  : j.at("embeddings").at(0);
            for (const auto& x : vec) v.push_back(x.get<float>());
        } catch (const std::exception& ex) {
            raise(Errc::ProviderFailure, std::string("malformed embedding response: ") + ex.what());
        }
        if (v.empty()) raise(Errc::ProviderFailure, "embedding response is empty");
        double norm2 = 0.0;
        for (float x : v) norm2 += static_cast<double>(x) * x;
        if (norm2 <= 0.0) raise(Errc::ProviderFailure, "embedding response is a zero vector");
        float inv = static_cast<float>(1.0 / std::sqrt(norm2));
        for (float& x : v) x *= inv;
        if (dim_ == 0) dim_ = v.size();
        if (v.size() != dim_)
            raise(Errc::ProviderFailure, "embedding dimension changed mid-run");
        return v;
    }

    size_t dim() const override { return dim_; }
    std::string id() const override { return "http:" + model_; }

  private:
    size_t dim_ = 0;
};

} // namespace autopkg
