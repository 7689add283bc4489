#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "cookplan/converter/extract.hpp"
#include "cookplan/converter/known_recipes.hpp"
#include "cookplan/converter/prompt.hpp"
#include "cookplan/error.hpp"
#include "cookplan/funcseq/funcseq.hpp"

namespace cookplan::converter {

inline constexpr const char* kApiKeyVariable = "RECIPE_LLM_API_KEY";

/// Failure to obtain a response from the text-generation backend.
class BackendError : public Error {
 public:
  enum class Kind { authentication, transport, timeout, fixture_missing, configuration };

  BackendError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline std::string_view to_string(BackendError::Kind k) {
  switch (k) {
    case BackendError::Kind::authentication: return "authentication";
    case BackendError::Kind::transport: return "transport";
    case BackendError::Kind::timeout: return "timeout";
    case BackendError::Kind::fixture_missing: return "fixture-missing";
    case BackendError::Kind::configuration: return "configuration";
  }
  return "?";
}

struct BackendConfig {
  enum class Mode { live, fixture };
  Mode mode = Mode::fixture;
  /// Chat-completion URL, e.g. `https://host/v1/chat/completions` (live).
  std::string endpoint;
  std::string model = "gpt-4-0613";
  double timeout_seconds = 60.0;
  /// Directory of `<sha256(recipe)>.txt` responses (fixture).
  std::filesystem::path fixture_dir;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

inline std::filesystem::path fixture_path(const std::filesystem::path& dir, std::string_view recipe) {
  return dir / (sha256_hex(recipe) + ".txt");
}

/// Request body sent in live mode; deterministic sampling.
inline nlohmann::json chat_request(const std::string& model, const std::string& prompt) {
  return nlohmann::json{{"model", model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
                        {"temperature", 0}};
}

namespace detail {

struct Url {
  std::string origin;  ///< scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw BackendError(BackendError::Kind::configuration, "endpoint '" + url + "' has no scheme");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace detail

/// Sends `prompt` once and returns the raw response text.
inline std::string generate(const BackendConfig& cfg, std::string_view recipe, const std::string& prompt) {
  if (cfg.mode == BackendConfig::Mode::fixture) {
    if (!std::filesystem::is_directory(cfg.fixture_dir)) {
      throw BackendError(BackendError::Kind::configuration,
                         "fixture directory '" + cfg.fixture_dir.string() + "' does not exist");
    }
    const auto path = fixture_path(cfg.fixture_dir, recipe);
    if (!std::filesystem::is_regular_file(path)) {
      throw BackendError(BackendError::Kind::fixture_missing, "no fixture response " + path.string());
    }
    return detail::read_file(path);
  }

  const char* key = std::getenv(kApiKeyVariable);
  if (key == nullptr || *key == '\0') {
    throw BackendError(BackendError::Kind::authentication,
                       std::string("live mode needs the ") + kApiKeyVariable + " environment variable");
  }
  const auto url = detail::split_url(cfg.endpoint);
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(cfg.timeout_seconds);
  const auto usecs = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
  const auto body = chat_request(cfg.model, prompt).dump();
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw BackendError(BackendError::Kind::timeout, "request to " + cfg.endpoint + " timed out (" +
                                                          httplib::to_string(err) + ")");
    }
    throw BackendError(BackendError::Kind::transport,
                       "request to " + cfg.endpoint + " failed: " + httplib::to_string(err));
  }
  if (res->status == 401 || res->status == 403) {
    throw BackendError(BackendError::Kind::authentication,
                       "backend rejected the credential (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(BackendError::Kind::transport, "backend answered HTTP " + std::to_string(res->status));
  }
  try {
    const auto json = nlohmann::json::parse(res->body);
    return json.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendError::Kind::transport, std::string("malformed backend response: ") + e.what());
  }
}

/// Appends one JSON line under an exclusive lock, so concurrent writers
/// never interleave records.
inline void append_transcript(const std::filesystem::path& path, const nlohmann::json& record) {
  const std::string line = record.dump() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error("cannot open transcript " + path.string());
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw Error("cannot lock transcript " + path.string());
  }
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd, line.data() + written, line.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (written != line.size()) throw Error("short write to transcript " + path.string());
}

inline std::vector<nlohmann::json> read_transcripts(const std::filesystem::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

struct Conversion {
  std::string prompt;
  std::string response;
  funcseq::FunctionSequence sequence;
  /// Audit record: mode, model, recipe hash, request and raw response.
  nlohmann::json transcript;
};

/// Builds the prompt, calls the backend once and extracts the sequence.
/// The transcript is written before extraction, so a response that cannot
/// be extracted is still on record.
inline Conversion convert(std::string_view recipe, const BackendConfig& cfg,
                          const std::vector<Exemplar>& exemplars = known_recipes(),
                          const std::optional<std::filesystem::path>& transcript_path = std::nullopt) {
  Conversion c;
  c.prompt = build_prompt(exemplars, recipe);
  c.response = generate(cfg, recipe, c.prompt);
  c.transcript = nlohmann::json{
      {"mode", cfg.mode == BackendConfig::Mode::live ? "live" : "fixture"},
      {"model", cfg.model},
      {"recipe_sha256", sha256_hex(recipe)},
      {"request", chat_request(cfg.model, c.prompt)},
      {"response", c.response},
  };
  if (transcript_path) append_transcript(*transcript_path, c.transcript);
  c.sequence = extract_sequence(c.response);
  return c;
}

}  // namespace cookplan::converter
