#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sdgmap/llmtag.hpp"
#include "url_split.hpp"

namespace sdgmap {

namespace {

std::string completions_path(const std::string& base_path) {
  std::string path = base_path;
  if (!path.empty() && path.back() == '/') path.pop_back();
  return path + "/chat/completions";
}

std::string request_body(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const ChatMessage& message : request.messages) {
    messages.push_back({{"role", message.role}, {"content", message.content}});
  }
  body["messages"] = std::move(messages);
  body["max_tokens"] = request.max_tokens;
  return body.dump();
}

std::string extract_content(const std::string& body) {
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError("chat reply is not JSON: " + std::string(e.what()));
  }
  try {
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("chat reply lacks choices[0].message.content");
  }
}

}  // namespace

std::string complete_with_retry(const ChatClientConfig& client,
                                const ChatRequest& request,
                                const RetryPolicy& policy) {
  if (request.messages.empty()) {
    throw Error("chat request needs at least one message");
  }
  if (request.max_tokens < 1) {
    throw Error("chat request max_tokens must be at least 1");
  }
  const detail::SplitUrl url = detail::split_url(client.endpoint);
  const std::string path = completions_path(url.path == "/" ? "" : url.path);
  const std::string body = request_body(request);
  const int attempts = std::max(policy.max_attempts, 1);

  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client http(url.base);
    http.set_connection_timeout(client.timeout_seconds, 0);
    http.set_read_timeout(client.timeout_seconds, 0);
    httplib::Headers headers;
    if (!client.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + client.api_key);
    }
    httplib::Result result =
        http.Post(path, headers, body, "application/json");

    if (result) {
      const int status = result->status;
      if (status >= 200 && status < 300) {
        return extract_content(result->body);
      }
      if (status == 401 || status == 403) {
        throw AuthError("chat endpoint rejected credentials (HTTP " +
                        std::to_string(status) + ")");
      }
      const bool retriable = status == 429 || status >= 500;
      if (!retriable) {
        throw ProtocolError("chat endpoint returned HTTP " +
                            std::to_string(status));
      }
      last_error = "HTTP " + std::to_string(status);
    } else {
      last_error = httplib::to_string(result.error());
    }

    if (attempt < attempts) {
      std::this_thread::sleep_for(policy.sleep);
    }
  }
  throw RetriesExhausted("chat request failed after " +
                         std::to_string(attempts) +
                         " attempts; last error: " + last_error);
}

}  // namespace sdgmap
