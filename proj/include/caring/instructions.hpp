#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace caring {

/// Source of step-by-step instructions for a task description.
class InstructionClient {
 public:
  virtual ~InstructionClient() = default;
  /// Raw model response text. Throws IoError when the backend is unreachable.
  virtual std::string complete(const std::string& task_text) = 0;
};

/// Prompt sent to chat backends for a task.
std::string instruction_prompt(std::string_view task_text);

/// Splits a numbered, bulleted or semicolon separated list into step texts.
/// When any line carries a list marker ("1.", "2)", "-", "*") only marked
/// lines count, which drops chatty preambles. Throws ParseError when nothing
/// usable remains.
std::vector<std::string> parse_step_list(std::string_view response);

struct Scenario {
  std::string slug;
  std::string task;
  std::vector<std::string> steps;
  /// Object ids a demo scan places in the scene.
  std::vector<std::string> objects;
};

/// The ten fixture tasks with their scripted steps.
const std::vector<Scenario>& scenarios();
/// Lookup by slug ("use-a-3d-printer") or case-insensitive task name.
/// Throws NotFoundError.
const Scenario& find_scenario(std::string_view name);

/// Deterministic client answering from the scenario table. Unknown tasks
/// yield a single step equal to the task text.
class MockInstructionClient : public InstructionClient {
 public:
  std::string complete(const std::string& task_text) override;
};

struct HttpClientConfig {
  /// Base URL of an OpenAI-compatible server, e.g. "https://api.openai.com".
  std::string url;
  std::string api_key;
  std::string model = "gpt-4o-mini";
  std::chrono::seconds timeout{30};

  /// Reads CARING_LLM_URL, CARING_LLM_API_KEY and CARING_LLM_MODEL.
  /// Throws ValidationError when the URL is unset.
  static HttpClientConfig from_env();
};

/// Chat-completions client (POST {url}/v1/chat/completions).
class HttpInstructionClient : public InstructionClient {
 public:
  explicit HttpInstructionClient(HttpClientConfig config);
  std::string complete(const std::string& task_text) override;

 private:
  HttpClientConfig config_;
};

/// "mock" or "http"; http is configured from the environment.
std::unique_ptr<InstructionClient> make_instruction_client(std::string_view kind);

}  // namespace caring
