#pragma once

// Live completion backend speaking a minimal JSON protocol over HTTP:
//   POST {base}/generate  body GenRequest      -> {"completions": [...]}
//   POST {base}/score     body ScoreRequest    -> {"scores": [...]}
// Configured through environment variables so credentials stay out of files;
// the credential only ever travels in the Authorization header, never into
// cassettes or logs.

#include <cstdlib>
#include <memory>
#include <string>

#include "dtv/llm.hpp"
#include "httplib.h"

namespace dtv {

inline constexpr const char* kEndpointEnv = "DTV_BACKEND_ENDPOINT";
inline constexpr const char* kCredentialEnv = "DTV_BACKEND_CREDENTIAL";

class HttpBackend : public LlmBackend {
 public:
  HttpBackend(std::string endpoint, std::string credential)
      : endpoint_(std::move(endpoint)), credential_(std::move(credential)) {}

  std::string name() const override { return "http:" + endpoint_; }

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    auto body = post("/generate", Json(req).dump());
    if (!body.ok()) return body.error();
    try {
      Json j = Json::parse(body.value());
      return j.at("completions").get<std::vector<std::string>>();
    } catch (const std::exception& e) {
      return Error{ErrCode::BackendError, std::string("bad generate response: ") + e.what()};
    }
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    auto body = post("/score", Json(req).dump());
    if (!body.ok()) return body.error();
    try {
      Json j = Json::parse(body.value());
      return j.at("scores").get<std::vector<double>>();
    } catch (const std::exception& e) {
      return Error{ErrCode::BackendError, std::string("bad score response: ") + e.what()};
    }
  }

 private:
  Result<std::string> post(const std::string& path, const std::string& body) {
    httplib::Client client(endpoint_);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (!credential_.empty()) headers.emplace("Authorization", "Bearer " + credential_);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res)
      return Error{ErrCode::BackendError,
                   "request to " + endpoint_ + path + " failed: " + httplib::to_string(res.error())};
    if (res->status != 200)
      return Error{ErrCode::BackendError,
                   "request to " + endpoint_ + path + " returned status " + std::to_string(res->status)};
    return res->body;
  }

  std::string endpoint_;
  std::string credential_;
};

inline Result<std::unique_ptr<HttpBackend>> http_backend_from_env() {
  const char* endpoint = std::getenv(kEndpointEnv);
  if (!endpoint || !*endpoint)
    return Error{ErrCode::InvalidConfig,
                 std::string(kEndpointEnv) + " is not set; live recording needs an endpoint"};
  const char* credential = std::getenv(kCredentialEnv);
  return std::make_unique<HttpBackend>(endpoint, credential ? credential : "");
}

}  // namespace dtv
