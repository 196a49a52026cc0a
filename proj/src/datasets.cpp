#include "sac3/datasets.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace sac3 {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Minimal deterministic generator; avoids the implementation-defined
// std::shuffle/uniform_int_distribution so outputs are stable everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0xabcdef12345ull)) {}

  std::uint64_t next() {
    state_ = splitmix64(state_);
    return state_;
  }

  // Uniform in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

private:
  std::uint64_t state_;
};

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

int label_for(LabelMix mix, int index) {
  switch (mix) {
    case LabelMix::all_hallucinated:
      return 1;
    case LabelMix::all_factual:
      return 0;
    case LabelMix::balanced:
    default:
      return index % 2;  // ceil(n/2) factual, floor(n/2) hallucinated
  }
}

}  // namespace

LabelMix label_mix_from_string(const std::string& s) {
  if (s == "balanced") return LabelMix::balanced;
  if (s == "hallucinated") return LabelMix::all_hallucinated;
  if (s == "factual") return LabelMix::all_factual;
  throw DatasetError("unknown label mix: " + s);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<LabeledExample> synth_prime(int n, std::uint64_t lo, std::uint64_t hi,
                                        std::uint64_t seed, LabelMix mix) {
  if (n < 0) throw DatasetError("negative dataset size");
  if (lo > hi) throw DatasetError("empty prime range");

  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = lo; p <= hi; ++p) {
    if (is_prime(p)) primes.push_back(p);
  }
  if (primes.size() < static_cast<std::size_t>(n)) {
    throw DatasetError("range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "] holds only " + std::to_string(primes.size()) +
                       " primes, need " + std::to_string(n));
  }

  Rng rng(seed);
  shuffle_in_place(primes, rng);

  std::vector<LabeledExample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t p = primes[static_cast<std::size_t>(i)];
    LabeledExample ex;
    ex.question = "Is " + std::to_string(p) + " a prime number?";
    ex.label = label_for(mix, i);
    ex.answer = ex.label == 0 ? "Yes" : "No, it is not a prime number";
    ex.metadata = nlohmann::json{{"number", p}};
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<LabeledExample> synth_senator(int n, std::uint64_t seed, LabelMix mix,
                                          const std::vector<std::string>& states,
                                          const std::vector<std::string>& colleges) {
  if (n < 0) throw DatasetError("negative dataset size");
  const std::size_t combos = states.size() * colleges.size();
  if (combos < static_cast<std::size_t>(n)) {
    throw DatasetError("only " + std::to_string(combos) +
                       " state/college combinations, need " + std::to_string(n));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(combos);
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t c = 0; c < colleges.size(); ++c) {
      pairs.emplace_back(s, c);
    }
  }
  Rng rng(seed);
  shuffle_in_place(pairs, rng);

  std::vector<LabeledExample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& [s, c] = pairs[static_cast<std::size_t>(i)];
    const std::string& state = states[s];
    const std::string& college = colleges[c];
    LabeledExample ex;
    ex.question = "Was there ever a US senator that represented the state of " +
                  state + " and whose alma mater was " + college + "?";
    ex.label = label_for(mix, i);
    ex.answer = ex.label == 0
                    ? "No"
                    : "Yes, there was a US senator that represented the state of " +
                          state + " and whose alma mater was " + college + ".";
    ex.metadata = nlohmann::json{{"state", state}, {"college", college}};
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<LabeledExample> load_annotated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset: " + path.string());

  std::vector<LabeledExample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw DatasetError("line " + std::to_string(line_no) +
                         ": malformed JSON: " + ex.what());
    }
    for (const char* field : {"question", "answer", "label"}) {
      if (!j.contains(field)) {
        throw DatasetError("line " + std::to_string(line_no) +
                           ": missing field '" + field + "'");
      }
    }
    LabeledExample ex;
    try {
      ex.question = j.at("question").get<std::string>();
      ex.answer = j.at("answer").get<std::string>();
      ex.label = j.at("label").get<int>();
    } catch (const nlohmann::json::exception& ex2) {
      throw DatasetError("line " + std::to_string(line_no) + ": bad field type: " +
                         ex2.what());
    }
    if (ex.label != 0 && ex.label != 1) {
      throw DatasetError("line " + std::to_string(line_no) + ": label must be 0 or 1, got " +
                         std::to_string(ex.label));
    }
    if (ex.question.empty() || ex.answer.empty()) {
      throw DatasetError("line " + std::to_string(line_no) + ": empty question or answer");
    }
    if (j.contains("metadata")) ex.metadata = j.at("metadata");
    out.push_back(std::move(ex));
  }
  if (out.empty()) {
    std::cerr << "[sac3] warning: dataset " << path << " is empty\n";
  }
  return out;
}

std::string dataset_to_jsonl(const std::vector<LabeledExample>& examples) {
  std::ostringstream out;
  for (const LabeledExample& ex : examples) {
    nlohmann::ordered_json j{
        {"question", ex.question}, {"answer", ex.answer}, {"label", ex.label}};
    if (!ex.metadata.is_null() && !ex.metadata.empty()) j["metadata"] = ex.metadata;
    out << j.dump() << "\n";
  }
  return out.str();
}

void save_dataset(const std::vector<LabeledExample>& examples,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write dataset: " + path.string());
  out << dataset_to_jsonl(examples);
}

std::vector<std::string> load_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open list file: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string name = trim(line);
    if (name.empty() || name.front() == '#') continue;
    out.push_back(name);
  }
  return out;
}

const std::vector<std::string>& default_states() {
  static const std::vector<std::string> states = {
      "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado",
      "Connecticut", "Delaware", "Florida", "Georgia", "Hawaii", "Idaho",
      "Illinois", "Indiana", "Iowa", "Kansas", "Kentucky", "Louisiana",
      "Maine", "Maryland", "Massachusetts", "Michigan", "Minnesota",
      "Mississippi", "Missouri", "Montana", "Nebraska", "Nevada",
      "New Hampshire", "New Jersey", "New Mexico", "New York",
      "North Carolina", "North Dakota", "Ohio", "Oklahoma", "Oregon",
      "Pennsylvania", "Rhode Island", "South Carolina", "South Dakota",
      "Tennessee", "Texas", "Utah", "Vermont", "Virginia", "Washington",
      "West Virginia", "Wisconsin", "Wyoming"};
  return states;
}

const std::vector<std::string>& default_colleges() {
  static const std::vector<std::string> colleges = {
      "MIT", "Harvard University", "Stanford University", "Yale University",
      "Princeton University", "Columbia University", "University of Chicago",
      "University of Pennsylvania", "California Institute of Technology",
      "Johns Hopkins University", "Northwestern University", "Duke University",
      "Dartmouth College", "Brown University", "Cornell University",
      "Rice University", "University of Notre Dame", "Vanderbilt University",
      "Washington University in St. Louis", "Emory University",
      "Georgetown University", "Carnegie Mellon University",
      "University of California, Berkeley", "University of California, Los Angeles",
      "University of Southern California", "University of Virginia",
      "University of Michigan", "Wake Forest University", "Tufts University",
      "New York University", "Boston College", "College of William & Mary",
      "University of Rochester", "Brandeis University", "Georgia Institute of Technology",
      "Case Western Reserve University", "Lehigh University",
      "University of California, Davis", "University of California, San Diego",
      "University of Illinois Urbana-Champaign", "University of Wisconsin-Madison",
      "Pennsylvania State University", "University of Washington",
      "University of Texas at Austin", "Ohio State University",
      "University of Florida", "University of Georgia", "Purdue University",
      "University of Maryland, College Park", "University of Pittsburgh",
      "Rutgers University", "Texas A&M University", "University of Minnesota",
      "Michigan State University", "Indiana University Bloomington",
      "University of Colorado Boulder", "University of Arizona",
      "Arizona State University", "University of Utah", "University of Oregon",
      "University of Iowa", "University of Kansas", "University of Missouri",
      "University of Nebraska-Lincoln", "University of Oklahoma",
      "University of Tennessee", "University of Kentucky",
      "University of South Carolina", "University of Alabama",
      "Auburn University", "Louisiana State University",
      "University of Mississippi", "University of Arkansas",
      "Oklahoma State University", "Kansas State University",
      "Iowa State University", "Oregon State University",
      "Washington State University", "Colorado State University",
      "University of Nevada, Reno", "University of New Mexico",
      "University of Wyoming", "University of Montana", "Boise State University",
      "University of North Dakota", "University of South Dakota",
      "University of Vermont", "University of New Hampshire",
      "University of Maine", "University of Rhode Island",
      "University of Connecticut", "University of Delaware",
      "West Virginia University", "Virginia Tech", "Clemson University",
      "Florida State University", "University of Hawaii at Manoa",
      "University of Alaska Fairbanks", "Baylor University",
      "Southern Methodist University", "Tulane University"};
  return colleges;
}

}  // namespace sac3
