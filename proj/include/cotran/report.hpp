#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cotran/group.hpp"

namespace cotran {

// One verified law: the worst residual seen over the sampled window, where it
// occurred, and whether it beat the tolerance.  Informational entries (probes)
// always pass and say so in the note.
struct LawEntry {
  std::string law;
  double max_residual = 0.0;
  std::vector<GroupElement> argmax;
  double tol = 0.0;
  std::size_t samples = 0;
  bool pass = true;
  std::string note;
  std::map<std::string, double> metrics;
};

struct VerificationReport {
  std::vector<LawEntry> entries;
  double wall_time_sec = 0.0;

  bool aggregate_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  const LawEntry* find(std::string_view law) const {
    for (const auto& e : entries)
      if (e.law == law) return &e;
    return nullptr;
  }
  void append(const VerificationReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
};

// Builds an entry by maximizing a residual over a tuple stream.
template <class Tuples, class Residual>
LawEntry max_over(std::string law, double tol, const Tuples& tuples, Residual&& f) {
  LawEntry e;
  e.law = std::move(law);
  e.tol = tol;
  for (const auto& t : tuples) {
    const double r = f(t);
    ++e.samples;
    if (r > e.max_residual || e.samples == 1) {
      e.max_residual = r;
      e.argmax.assign(t.begin(), t.end());
    }
  }
  e.pass = e.max_residual <= tol;
  return e;
}

// Exhaustive tuple streams over a window.
std::vector<std::vector<GroupElement>> all_singles(const std::vector<GroupElement>& w);
std::vector<std::vector<GroupElement>> all_pairs(const std::vector<GroupElement>& w);
std::vector<std::vector<GroupElement>> all_triples(const std::vector<GroupElement>& w);
// (g, h, k) with g from bases and h, k from displacements.
std::vector<std::vector<GroupElement>> base_disp_triples(const std::vector<GroupElement>& bases,
                                                         const std::vector<GroupElement>& disps);
std::vector<std::vector<GroupElement>> base_disp_pairs(const std::vector<GroupElement>& bases,
                                                       const std::vector<GroupElement>& disps);

}  // namespace cotran
