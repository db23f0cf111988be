#pragma once

#include <stdexcept>
#include <string>

namespace approxh {

// Search failed over an exhausted finite range.
class not_found_error : public std::runtime_error {
public:
  explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

// No admissible prime decomposition exists at the requested slack.
class decomposition_error : public std::runtime_error {
public:
  explicit decomposition_error(const std::string& what) : std::runtime_error(what) {}
};

// Retry budget for the flat-vector sampler ran out before acceptance.
class flatness_error : public std::runtime_error {
public:
  explicit flatness_error(const std::string& what) : std::runtime_error(what) {}
};

// A certificate that is expected to hold by construction failed to verify.
class certification_error : public std::runtime_error {
public:
  explicit certification_error(const std::string& what) : std::runtime_error(what) {}
};

// Rejection sampling of the fill-in block exceeded its attempt budget.
class resample_error : public std::runtime_error {
public:
  explicit resample_error(const std::string& what) : std::runtime_error(what) {}
};

// A construction would exceed the configured size cap.
class size_limit_error : public std::runtime_error {
public:
  explicit size_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// An exhaustive enumeration would exceed the configured budget.
class budget_error : public std::runtime_error {
public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace approxh
