#pragma once

#include <string>

#include "cskit/augment.hpp"
#include "cskit/error.hpp"

#include <httplib.h>
#include <json.hpp>

namespace cskit {

// MtClient over HTTP: one POST endpoint taking {"text","src","tgt"} and
// returning {"text"}.
class HttpMtClient final : public MtClient {
 public:
  explicit HttpMtClient(const std::string& base_url,
                        std::string endpoint = "/translate")
      : client_(base_url), endpoint_(std::move(endpoint)) {
    client_.set_connection_timeout(10);
    client_.set_read_timeout(30);
  }

  std::string translate(const std::string& text, const std::string& src,
                        const std::string& tgt) const override {
    nlohmann::json request = {{"text", text}, {"src", src}, {"tgt", tgt}};
    auto res = client_.Post(endpoint_, request.dump(), "application/json");
    if (!res)
      throw ValidationError("mt endpoint unreachable (" +
                            httplib::to_string(res.error()) + ") for pair " +
                            src + "-" + tgt);
    if (res->status != 200)
      throw ValidationError("mt endpoint returned status " +
                            std::to_string(res->status) + " for pair " + src +
                            "-" + tgt);
    const auto body = nlohmann::json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("text"))
      throw ValidationError("mt endpoint returned malformed JSON for pair " +
                            src + "-" + tgt);
    return body["text"].get<std::string>();
  }

 private:
  mutable httplib::Client client_;
  std::string endpoint_;
};

}  // namespace cskit
