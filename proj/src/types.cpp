#include "sac3/types.hpp"

#include <cctype>

namespace sac3 {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string normalize_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char ch : text) {
    unsigned char uc = static_cast<unsigned char>(ch);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

Question make_question(std::string text, std::string id) {
  std::string trimmed = trim(text);
  if (trimmed.empty()) {
    throw ConfigError("question text is empty");
  }
  return Question{std::move(trimmed), std::move(id)};
}

std::string to_string(Verdict v) {
  return v == Verdict::hallucinated ? "hallucinated" : "factual";
}

}  // namespace sac3
