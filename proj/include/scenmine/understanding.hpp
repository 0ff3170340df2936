#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scenmine/scenario_schema.hpp"

namespace scenmine {

/// The five prompt segments, joined in declaration order.
struct PromptBundle {
  std::string system_segment;
  std::string description_segment;
  std::string format_segment;
  std::string example_segment;
  std::string closing_segment;

  [[nodiscard]] std::string text() const;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// Throws InputError when the description is blank.
[[nodiscard]] PromptBundle build_prompt(std::string_view description);

inline constexpr std::string_view kCorrectiveSentence =
    "Your previous answer did not follow the required structure. "
    "Respond again using exactly the structure given.";

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4-1106-preview";
  std::string api_key;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  double temperature = 0.0;
  int max_tokens = 1024;

  void validate() const;
};

/// Key from SCENMINE_API_KEY, falling back to OPENAI_API_KEY; empty if unset.
[[nodiscard]] std::string api_key_from_env();

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
};

[[nodiscard]] nlohmann::json to_json(const ChatRequest& request);

/// One completion round trip. Implementations throw TransportError for
/// network-level failures and CredentialError when the key is rejected.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request, const ProviderConfig& config) = 0;
};

/// OpenAI-compatible chat completion over HTTP(S).
class HttpChatTransport : public ChatTransport {
 public:
  std::string complete(const ChatRequest& request, const ProviderConfig& config) override;
};

/// Returns canned responses in order and records the requests it saw. An
/// empty string in the script simulates a transport failure.
class ScriptedTransport : public ChatTransport {
 public:
  explicit ScriptedTransport(std::vector<std::string> responses);
  std::string complete(const ChatRequest& request, const ProviderConfig& config) override;

  [[nodiscard]] const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

/// A recorded exchange: {"description": ..., "model": ..., "responses": [...]}.
struct Transcript {
  std::string description;
  std::string model;
  std::vector<std::string> responses;
};

[[nodiscard]] Transcript load_transcript(const std::filesystem::path& path);
void save_transcript(const std::filesystem::path& path, const Transcript& transcript);

struct Interpretation {
  ScenarioQuery query;
  std::vector<std::string> raw_responses;  // one per attempt that produced text
  int attempts = 0;
};

/// Sends the prompt as a single user message and parses the answer. Answers
/// that fail to parse or validate are retried with the corrective sentence
/// appended; transport failures are retried as-is. At most 1 + max_retries
/// attempts. Throws ProviderError (carrying the last raw answer) once
/// attempts run out and CredentialError immediately on a rejected key.
[[nodiscard]] Interpretation interpret_remote(std::string_view description,
                                              const ProviderConfig& config,
                                              ChatTransport& transport);
[[nodiscard]] Interpretation interpret_remote(std::string_view description,
                                              const ProviderConfig& config);

/// Deterministic rule-based reading of a description; see docs/offline_phrases.md.
/// Throws InterpretationError when no target vehicle is mentioned and
/// VocabularyError when a target position cannot be determined.
[[nodiscard]] ScenarioQuery interpret_offline(std::string_view description);

}  // namespace scenmine
