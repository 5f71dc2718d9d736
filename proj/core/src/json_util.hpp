#pragma once

// Path-tracking accessors for reading JSON documents with diagnostics that
// name the offending field ("/arms/0/profiles/2/hesitation: ...").

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "elvis/error.hpp"

namespace elvis::detail {

using nlohmann::json;

class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_.empty() ? root_ : path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path(), what); }

  bool has(const char* key) const { return value_.is_object() && value_.contains(key); }

  Node at(const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    auto it = value_.find(key);
    if (it == value_.end()) throw ConfigError(path_ + "/" + key, "required field is missing");
    return Node(*it, path_ + "/" + key);
  }

  Node at(std::size_t i) const { return Node(value_.at(i), path_ + "/" + std::to_string(i)); }

  std::vector<Node> items() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(at(i));
    return out;
  }

  std::vector<std::pair<std::string, Node>> members() const {
    if (!value_.is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      out.emplace_back(it.key(), Node(it.value(), path_ + "/" + it.key()));
    }
    return out;
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }
  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }
  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }
  std::uint64_t unsigned_integer() const {
    if (!value_.is_number_integer() || (value_.is_number_integer() && !value_.is_number_unsigned() &&
                                        value_.get<long long>() < 0)) {
      fail("expected a non-negative integer");
    }
    return value_.get<std::uint64_t>();
  }
  double probability() const {
    const double p = number();
    if (!(p >= 0.0 && p <= 1.0)) fail("must be a probability in [0, 1]");
    return p;
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& n : items()) out.push_back(n.str());
    return out;
  }

  std::string str_or(const char* key, std::string fallback) const {
    return has(key) ? at(key).str() : fallback;
  }
  double number_or(const char* key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }
  bool boolean_or(const char* key, bool fallback) const {
    return has(key) ? at(key).boolean() : fallback;
  }

 private:
  inline static const std::string root_ = "/";
  const json& value_;
  std::string path_;
};

}  // namespace elvis::detail
