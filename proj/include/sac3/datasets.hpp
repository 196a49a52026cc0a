#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sac3/types.hpp"

namespace sac3 {

struct LabeledExample {
  std::string question;
  std::string answer;
  int label = 0;  // 0 = factual, 1 = hallucinated
  nlohmann::json metadata = nlohmann::json::object();
};

enum class LabelMix { balanced, all_hallucinated, all_factual };

LabelMix label_mix_from_string(const std::string& s);

// Deterministic trial division; exact for the supported range.
bool is_prime(std::uint64_t n);

// n distinct primes drawn from [lo, hi], rendered as "Is {p} a prime
// number?". Factual answers affirm, hallucinated ones deny. Balanced mix
// yields floor(n/2) hallucinated and ceil(n/2) factual labels.
std::vector<LabeledExample> synth_prime(int n, std::uint64_t lo, std::uint64_t hi,
                                        std::uint64_t seed,
                                        LabelMix mix = LabelMix::balanced);

const std::vector<std::string>& default_states();
const std::vector<std::string>& default_colleges();

// n distinct (state, college) combinations rendered into the senator-search
// template. The factual answer is "No"; hallucinated answers affirm the
// combination.
std::vector<LabeledExample> synth_senator(
    int n, std::uint64_t seed, LabelMix mix = LabelMix::balanced,
    const std::vector<std::string>& states = default_states(),
    const std::vector<std::string>& colleges = default_colleges());

// Reads one object per line: {"question": ..., "answer": ..., "label": 0|1,
// "metadata": {...}?}. Schema violations report the offending line number.
// An empty file yields an empty dataset with a warning.
std::vector<LabeledExample> load_annotated(const std::filesystem::path& path);

void save_dataset(const std::vector<LabeledExample>& examples,
                  const std::filesystem::path& path);
std::string dataset_to_jsonl(const std::vector<LabeledExample>& examples);

// One name per line; blank lines and '#' comments ignored.
std::vector<std::string> load_name_list(const std::filesystem::path& path);

}  // namespace sac3
