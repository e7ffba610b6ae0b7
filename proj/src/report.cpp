#include "cotran/report.hpp"

namespace cotran {

std::vector<std::vector<GroupElement>> all_singles(const std::vector<GroupElement>& w) {
  std::vector<std::vector<GroupElement>> out;
  out.reserve(w.size());
  for (const auto& g : w) out.push_back({g});
  return out;
}

std::vector<std::vector<GroupElement>> all_pairs(const std::vector<GroupElement>& w) {
  std::vector<std::vector<GroupElement>> out;
  out.reserve(w.size() * w.size());
  for (const auto& g : w)
    for (const auto& h : w) out.push_back({g, h});
  return out;
}

std::vector<std::vector<GroupElement>> all_triples(const std::vector<GroupElement>& w) {
  std::vector<std::vector<GroupElement>> out;
  out.reserve(w.size() * w.size() * w.size());
  for (const auto& g : w)
    for (const auto& h : w)
      for (const auto& k : w) out.push_back({g, h, k});
  return out;
}

std::vector<std::vector<GroupElement>> base_disp_triples(const std::vector<GroupElement>& bases,
                                                         const std::vector<GroupElement>& disps) {
  std::vector<std::vector<GroupElement>> out;
  out.reserve(bases.size() * disps.size() * disps.size());
  for (const auto& g : bases)
    for (const auto& h : disps)
      for (const auto& k : disps) out.push_back({g, h, k});
  return out;
}

std::vector<std::vector<GroupElement>> base_disp_pairs(const std::vector<GroupElement>& bases,
                                                       const std::vector<GroupElement>& disps) {
  std::vector<std::vector<GroupElement>> out;
  out.reserve(bases.size() * disps.size());
  for (const auto& g : bases)
    for (const auto& h : disps) out.push_back({g, h});
  return out;
}

}  // namespace cotran
