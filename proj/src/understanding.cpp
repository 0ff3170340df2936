#include "scenmine/understanding.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"
#include "scenmine/errors.hpp"
#include "scenmine/format.hpp"

namespace scenmine {

namespace {

constexpr std::string_view kSystemPrefix =
    "System, you are an AI trained to understand and classify driving scenarios based on "
    "specific frameworks. Your task is to analyze the following driving scenario and classify "
    "the behavior of both the ego vehicle and the target vehicle according to the given "
    "classification framework. Please follow the framework strictly and provide precise and "
    "clear classifications. The framework is as follows: ";

constexpr std::string_view kDescriptionPrefix = "Scenario Description: ";

constexpr std::string_view kFormatSegment =
    "Provide a detailed classification for both the ego vehicle and the target vehicle(s). "
    "The response should be formatted exactly as shown in this structure:\n"
    "{\n"
    "  Ego Vehicle: {Ego longitudinal activity: ['Your Classification'], Ego lateral activity: "
    "['Your Classification']},\n"
    "  Target Vehicle #1:\n"
    "  {\n"
    "        Target start position: {'Your Classification': ['Your Classification']},\n"
    "        Target end position: {'Your Classification': ['Your Classification']},\n"
    "        Target behavior: {target longitudinal activity: ['Your Classification'],\n"
    "                              target lateral activity: ['Your Classification']'}\n"
    "  }\n"
    "  Target Vehicle #2:\n"
    "  {\n"
    "      ......\n"
    "      ......\n"
    "  }\n"
    "}";

constexpr std::string_view kExampleSegment =
    "Example: If an ego vehicle is maintaining speed and following its lane, while another "
    "vehicle is initially in the left adjacent lane and is accelerating, then changing lanes to "
    "the right; finally driving on the front of ego vehicle, the classification would be:\n"
    "{\n"
    "  Ego Vehicle: {Ego longitudinal activity: ['keep velocity'], Ego lateral activity: "
    "['follow lane']},\n"
    "  Target Vehicle:\n"
    "  {\n"
    "        Target start position: {'adjacent lane': ['left adjacent lane']},\n"
    "        Target end position: {'same lane': ['front']},\n"
    "        Target behavior: {target longitudinal activity: ['acceleration'],\n"
    "                              target lateral activity: ['lane change right']'}\n"
    "  }";

constexpr std::string_view kClosingSegment =
    "Remember to analyze carefully and provide the classification as per the structure given "
    "above.";

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError("provider endpoint must be an absolute http(s) URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string PromptBundle::text() const {
  return system_segment + "\n\n" + description_segment + "\n\n" + format_segment + "\n\n" +
         example_segment + "\n\n" + closing_segment;
}

PromptBundle build_prompt(std::string_view description) {
  if (trim(description).empty()) {
    throw InputError("scenario description is empty");
  }
  PromptBundle bundle;
  bundle.system_segment = std::string(kSystemPrefix) + taxonomy_text();
  bundle.description_segment = std::string(kDescriptionPrefix) + std::string(description);
  bundle.format_segment = kFormatSegment;
  bundle.example_segment = kExampleSegment;
  bundle.closing_segment = kClosingSegment;
  return bundle;
}

void ProviderConfig::validate() const {
  if (!(timeout_seconds > 0.0)) {
    throw InputError("provider timeout must be positive");
  }
  if (max_retries < 0) {
    throw InputError("provider max_retries must be non-negative");
  }
  if (max_tokens <= 0) {
    throw InputError("provider max_tokens must be positive");
  }
  if (model.empty()) {
    throw InputError("provider model name is empty");
  }
}

std::string api_key_from_env() {
  for (const char* name : {"SCENMINE_API_KEY", "OPENAI_API_KEY"}) {
    if (const char* value = std::getenv(name); value != nullptr && *value != '\0') {
      return value;
    }
  }
  return {};
}

nlohmann::json to_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return {{"model", request.model},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string HttpChatTransport::complete(const ChatRequest& request, const ProviderConfig& config) {
  const auto endpoint = split_endpoint(config.endpoint);
  httplib::Client client(endpoint.base);
  const auto seconds = static_cast<time_t>(config.timeout_seconds);
  const auto micros = static_cast<time_t>((config.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (!config.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config.api_key);
  }
  auto result = client.Post(endpoint.path, headers, to_json(request).dump(), "application/json");
  if (!result) {
    throw TransportError("request to " + config.endpoint +
                         " failed: " + httplib::to_string(result.error()));
  }
  if (result->status == 401 || result->status == 403) {
    throw CredentialError("provider rejected the API key (HTTP " +
                          std::to_string(result->status) + ")");
  }
  if (result->status != 200) {
    throw TransportError("provider answered HTTP " + std::to_string(result->status) + ": " +
                         result->body.substr(0, 500));
  }
  try {
    const auto doc = nlohmann::json::parse(result->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected completion payload: ") + e.what());
  }
}

ScriptedTransport::ScriptedTransport(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedTransport::complete(const ChatRequest& request, const ProviderConfig&) {
  requests_.push_back(request);
  if (next_ >= responses_.size()) {
    throw TransportError("scripted transport has no more responses");
  }
  std::string out = responses_[next_++];
  if (out.empty()) {
    throw TransportError("scripted transport failure");
  }
  return out;
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open transcript " + path.string());
  }
  try {
    const auto doc = nlohmann::json::parse(in);
    Transcript t;
    t.description = doc.at("description").get<std::string>();
    t.model = doc.value("model", "");
    t.responses = doc.at("responses").get<std::vector<std::string>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed transcript " + path.string() + ": " + e.what());
  }
}

void save_transcript(const std::filesystem::path& path, const Transcript& transcript) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write transcript " + path.string());
  }
  const nlohmann::json doc = {{"description", transcript.description},
                              {"model", transcript.model},
                              {"responses", transcript.responses}};
  out << doc.dump(2) << '\n';
}

Interpretation interpret_remote(std::string_view description, const ProviderConfig& config,
                                ChatTransport& transport) {
  config.validate();
  const std::string prompt = build_prompt(description).text();

  Interpretation result;
  std::string last_raw;
  std::string last_problem;
  bool corrective = false;
  const int attempts = 1 + config.max_retries;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    result.attempts = attempt;
    ChatRequest request;
    request.model = config.model;
    request.temperature = config.temperature;
    request.max_tokens = config.max_tokens;
    request.messages.push_back(
        {"user", corrective ? prompt + "\n\n" + std::string(kCorrectiveSentence) : prompt});

    std::string raw;
    try {
      raw = transport.complete(request, config);
    } catch (const TransportError& e) {
      last_problem = e.what();
      continue;
    }
    result.raw_responses.push_back(raw);
    last_raw = raw;
    try {
      result.query = parse_llm_response(raw);
      require_valid(result.query);
      return result;
    } catch (const ResponseFormatError& e) {
      last_problem = e.what();
      corrective = true;
    }
  }
  throw ProviderError("no usable answer after " + std::to_string(attempts) +
                          " attempt(s): " + last_problem,
                      last_raw);
}

Interpretation interpret_remote(std::string_view description, const ProviderConfig& config) {
  HttpChatTransport transport;
  return interpret_remote(description, config, transport);
}

}  // namespace scenmine
