#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "autopkg/core.hpp"
#include "autopkg/error.hpp"

namespace autopkg {

/// Text -> dense vector. Implementations must be deterministic for a given
/// configuration so that rebuilt stores replay identically.
class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual std::vector<float> embed(std::string_view text) = 0;
    virtual size_t dim() const = 0;
    virtual std::string id() const = 0;
};

inline double dot(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size())
        raise(Errc::LengthMismatch, "vector sizes differ: " + std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()));
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * b[i];
    return acc;
}

inline double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    double num = dot(a, b);
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return num / (na * nb);
}

/// Offline embedder: hashed character trigrams over the normalized text,
/// signed feature hashing into a fixed-width vector, L2-normalized. No model
/// weights, no network, fully deterministic — similar surface forms land
/// close, unrelated labels stay apart, which is all dedup retrieval needs
/// when no embedding endpoint is configured.
class FallbackEmbedder final : public Embedder {
  public:
    static constexpr size_t kDim = 256;

    std::vector<float> embed(std::string_view text) override {
        std::string norm = normalize(text);
        std::vector<float> v(kDim, 0.0f);
        if (norm.empty()) {
            v[0] = 1.0f; // stable placeholder so empty strings are still indexable
            return v;
        }
        // Sentinel bytes mark the ends so short strings still produce
        // position-aware trigrams ("ab" -> ^ab, ab$, plus ^a b$ pieces).
        std::string padded;
        padded.reserve(norm.size() + 2);
        padded.push_back('\x01');
        padded += norm;
        padded.push_back('\x02');
        for (size_t i = 0; i + 3 <= padded.size(); ++i) {
            std::uint64_t h = fnv1a(padded.data() + i, 3);
            size_t bucket = static_cast<size_t>(h % kDim);
            float sign = (h >> 63) ? -1.0f : 1.0f;
            v[bucket] += sign;
        }
        double norm2 = 0.0;
        for (float x : v) norm2 += static_cast<double>(x) * x;
        if (norm2 == 0.0) {
            v.assign(kDim, 0.0f);
            v[0] = 1.0f;
            return v;
        }
        float inv = static_cast<float>(1.0 / std::sqrt(norm2));
        for (float& x : v) x *= inv;
        return v;
    }

    size_t dim() const override { return kDim; }
    std::string id() const override { return "fallback-trigram-256"; }

  private:
    static std::uint64_t fnv1a(const char* data, size_t len) {
        std::uint64_t h = 1469598103934665603ull;
        for (size_t i = 0; i < len; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace autopkg
