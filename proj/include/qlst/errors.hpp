#pragma once

#include <stdexcept>
#include <string>

namespace qlst {

/// A requested target lies beyond what the model can reach anywhere in the
/// search bracket. `ceiling` is the best value attained there.
class UnreachableTarget : public std::runtime_error {
 public:
  UnreachableTarget(const std::string& what, double ceiling) : std::runtime_error(what), ceiling_(ceiling) {}
  double ceiling() const { return ceiling_; }

 private:
  double ceiling_;
};

/// Invalid run configuration (unknown key, wrong type, out-of-range value).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace qlst
