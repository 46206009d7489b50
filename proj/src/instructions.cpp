#include "caring/instructions.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "caring/errors.hpp"

namespace caring {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Length of a leading list marker ("12.", "3)", "-", "*", "•") plus spaces,
// or 0 when the line has none.
std::size_t marker_length(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0) {
    if (i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
      ++i;
    } else {
      return 0;
    }
  } else if (line.starts_with("-") || line.starts_with("*")) {
    i = 1;
  } else if (line.starts_with("\xE2\x80\xA2")) {
    i = 3;
  } else {
    return 0;
  }
  if (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) return 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  return i;
}

}  // namespace

std::string instruction_prompt(std::string_view task_text) {
  std::string p = "List the steps a person performs to complete this task: ";
  p += task_text;
  p +=
      ". Answer with a numbered list, one short imperative step per line, "
      "and nothing else.";
  return p;
}

std::vector<std::string> parse_step_list(std::string_view response) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(response)};
  for (std::string line; std::getline(in, line);) {
    auto t = trim(line);
    if (!t.empty()) lines.push_back(std::move(t));
  }
  if (lines.size() == 1 && lines[0].find(';') != std::string::npos) {
    std::vector<std::string> parts;
    std::istringstream parts_in(lines[0]);
    for (std::string part; std::getline(parts_in, part, ';');) {
      auto t = trim(part);
      if (!t.empty()) parts.push_back(std::move(t));
    }
    lines = std::move(parts);
  }
  const bool any_marked = std::any_of(lines.begin(), lines.end(),
                                      [](const std::string& l) { return marker_length(l) > 0; });
  std::vector<std::string> steps;
  for (const auto& l : lines) {
    const auto m = marker_length(l);
    if (any_marked && m == 0) continue;
    auto text = trim(std::string_view(l).substr(m));
    // Markdown emphasis around the whole step.
    while (text.size() >= 4 && text.starts_with("**") && text.ends_with("**")) {
      text = trim(std::string_view(text).substr(2, text.size() - 4));
    }
    if (!text.empty()) steps.push_back(std::move(text));
  }
  if (steps.empty()) {
    throw ParseError("instruction response contains no steps");
  }
  return steps;
}

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> table = {
      {"charging-a-phone",
       "Charging a Phone",
       {"Get the charger", "Insert the cable into the phone", "Plug the charger into an outlet"},
       {"charger", "phone", "outlet"}},
      {"turning-on-the-tv",
       "Turning on the TV",
       {"Pick up the remote", "Point it at the TV", "Press the power button"},
       {"remote", "TV"}},
      {"closing-a-window",
       "Closing a Window",
       {"Approach the window", "Grasp the handle or sash", "Push to close"},
       {"window"}},
      {"starting-a-computer",
       "Starting a Computer",
       {"Sit in front of the computer", "Press the power button", "Wait for it to boot up."},
       {"computer"}},
      {"exercising", "Exercising", {"Crawl", "Run", "Band Push", "Crawl to Stand"}, {}},
      {"reading-a-book",
       "Reading a Book",
       {"Walk to the bookshelf", "Choose a book", "Go to the living room",
        "Sit on the couch or chair"},
       {"bookshelf", "book", "couch"}},
      // The table lists this task twice with a different last step.
      {"closing-a-sliding-window",
       "Closing a Window",
       {"Approach the window", "Grasp the handle or sash", "Push or slide to close"},
       {"window"}},
      {"eating-an-apple",
       "Eating an apple",
       {"Approach to the table", "Pick up the remote", "Eat the apple", "Move back",
        "Turn around", "Leave the kitchen"},
       {"table", "remote", "apple"}},
      {"use-a-3d-printer",
       "Use a 3D printer",
       {"Pick up PVA", "Go to printer", "Attach Filament to printer", "Start printer"},
       {"PVA", "printer"}},
      {"making-tea",
       "Making Tea",
       {"Boil the water", "Place a cup on the table", "Pick the pot",
        "Pour boiling water into the cup."},
       {"water", "cup", "pot"}},
  };
  return table;
}

const Scenario& find_scenario(std::string_view name) {
  const auto key = lower(trim(name));
  for (const auto& s : scenarios()) {
    if (s.slug == key) return s;
  }
  // First row wins for the duplicated task name.
  for (const auto& s : scenarios()) {
    if (lower(s.task) == key) return s;
  }
  throw NotFoundError("unknown scenario '" + std::string(name) + "'");
}

std::string MockInstructionClient::complete(const std::string& task_text) {
  std::vector<std::string> steps;
  try {
    steps = find_scenario(task_text).steps;
  } catch (const NotFoundError&) {
    steps = {trim(task_text)};
  }
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out += std::to_string(i + 1) + ". " + steps[i] + "\n";
  }
  return out;
}

HttpClientConfig HttpClientConfig::from_env() {
  HttpClientConfig c;
  const char* url = std::getenv("CARING_LLM_URL");
  if (url == nullptr || *url == '\0') {
    throw ValidationError("CARING_LLM_URL", "not set; use the mock client or export the endpoint");
  }
  c.url = url;
  if (const char* key = std::getenv("CARING_LLM_API_KEY")) c.api_key = key;
  if (const char* model = std::getenv("CARING_LLM_MODEL"); model != nullptr && *model != '\0') {
    c.model = model;
  }
  return c;
}

HttpInstructionClient::HttpInstructionClient(HttpClientConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw ValidationError("url", "must not be empty");
}

std::string HttpInstructionClient::complete(const std::string& task_text) {
  httplib::Client client(config_.url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const nlohmann::json body = {
      {"model", config_.model},
      {"temperature", 0},
      {"messages", {{{"role", "user"}, {"content", instruction_prompt(task_text)}}}},
  };
  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw IoError("instruction backend unreachable (" + httplib::to_string(res.error()) +
                  "); check CARING_LLM_URL and retry, or use the mock client");
  }
  if (res->status != 200) {
    throw IoError("instruction backend returned HTTP " + std::to_string(res->status) +
                  "; retry later");
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("unexpected instruction backend response: ") + e.what());
  }
}

std::unique_ptr<InstructionClient> make_instruction_client(std::string_view kind) {
  if (kind == "mock") return std::make_unique<MockInstructionClient>();
  if (kind == "http") return std::make_unique<HttpInstructionClient>(HttpClientConfig::from_env());
  throw ValidationError("llm", "unknown instruction client '" + std::string(kind) + "'");
}

}  // namespace caring
