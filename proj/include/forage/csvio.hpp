#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "forage/env.hpp"
#include "forage/planner.hpp"

namespace forage {

/// One iteration's outcome. steps_survived is in [1, max_steps]; the outcome
/// is MaxSteps exactly when the agent was still standing after the last step.
struct TrialRecord {
  Algo algorithm = Algo::si;
  int episode = 0;
  int iteration = 0;
  int steps_survived = 0;
  bool max_steps_reached = false;
  std::array<bool, kNumResources> death_cause = {false, false, false};
  int hill_visits = 0;
  double model_error = 0.0;
  std::uint64_t seed = 0;
};

inline std::string record_csv_header() {
  return "algorithm,episode,iteration,steps_survived,outcome,death_cause,"
         "hill_visits,model_error,seed";
}

inline std::string death_cause_string(const std::array<bool, kNumResources>& c) {
  static const char* names[kNumResources] = {"food", "water", "sleep"};
  std::string s;
  for (int i = 0; i < kNumResources; ++i)
    if (c[i]) {
      if (!s.empty()) s += '|';
      s += names[i];
    }
  return s;
}

inline std::string to_csv(const TrialRecord& r) {
  char err[32];
  std::snprintf(err, sizeof(err), "%.6f", r.model_error);
  std::string s;
  s += to_string(r.algorithm);
  s += ',';
  s += std::to_string(r.episode);
  s += ',';
  s += std::to_string(r.iteration);
  s += ',';
  s += std::to_string(r.steps_survived);
  s += ',';
  s += r.max_steps_reached ? "MaxSteps" : "Dead";
  s += ',';
  s += death_cause_string(r.death_cause);
  s += ',';
  s += std::to_string(r.hill_visits);
  s += ',';
  s += err;
  s += ',';
  s += std::to_string(r.seed);
  return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline TrialRecord parse_record(const std::string& line) {
  const auto f = split_csv_line(line);
  if (f.size() != 9)
    throw std::invalid_argument("record line has " + std::to_string(f.size()) +
                                " fields, expected 9");
  TrialRecord r;
  r.algorithm = parse_algo(f[0]);
  r.episode = std::stoi(f[1]);
  r.iteration = std::stoi(f[2]);
  r.steps_survived = std::stoi(f[3]);
  r.max_steps_reached = (f[4] == "MaxSteps");
  if (!f[5].empty()) {
    std::stringstream ss(f[5]);
    std::string tok;
    while (std::getline(ss, tok, '|')) {
      if (tok == "food") r.death_cause[0] = true;
      else if (tok == "water") r.death_cause[1] = true;
      else if (tok == "sleep") r.death_cause[2] = true;
    }
  }
  r.hill_visits = std::stoi(f[6]);
  r.model_error = std::stod(f[7]);
  r.seed = std::stoull(f[8]);
  return r;
}

inline std::vector<TrialRecord> parse_records_csv(std::istream& in) {
  std::vector<TrialRecord> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("algorithm,", 0) == 0) continue;  // header
    }
    out.push_back(parse_record(line));
  }
  return out;
}

}  // namespace forage
