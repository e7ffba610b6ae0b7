#pragma once

#include <string>

#include "cotran/errors.hpp"
#include "cotran/group.hpp"
#include "cotran/harness.hpp"
#include "cotran/matrix.hpp"

namespace cotran::harness::detail {

// All parse failures carry the JSON path of the offending field.
[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw SpecError(path + ": " + what);
}

const Json& require_field(const Json& obj, const std::string& path, const std::string& key);
std::string require_string(const Json& obj, const std::string& path, const std::string& key);
double require_number(const Json& obj, const std::string& path, const std::string& key);
std::int64_t require_int(const Json& obj, const std::string& path, const std::string& key);
double optional_number(const Json& obj, const std::string& key, double fallback);

// Row-major rectangular array of numbers.
Mat parse_mat(const Json& j, const std::string& path);
std::vector<Mat> parse_mat_list(const Json& j, const std::string& path);

// Group element literal: integer | [ints] | {"word": [letters]} | {"index": i}.
GroupElement parse_element(const Json& j, const GroupHandle& g, const std::string& path);

GroupHandle parse_group(const Json& j, const std::string& path);

void check_dim_cap(int dim, int cap, const std::string& path);

}  // namespace cotran::harness::detail
