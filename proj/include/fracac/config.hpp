#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracac {

// Plain-text "key = value" configuration; '#' starts a comment.
class RunConfig {
 public:
  RunConfig() = default;
  RunConfig(std::initializer_list<std::pair<const std::string, std::string>> kv) : kv_(kv) {}

  static RunConfig parse(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto eq = line.find('=');
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
      c.kv_[key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
  }

  std::string render() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }

  bool has(const std::string& k) const { return kv_.count(k) != 0; }
  void set(const std::string& k, const std::string& v) { kv_[k] = v; }
  void set(const std::string& k, double v) { kv_[k] = fmt(v); }
  void set_int(const std::string& k, std::int64_t v) { kv_[k] = std::to_string(v); }
  void set_default(const std::string& k, const std::string& v) { kv_.emplace(k, v); }

  std::string str(const std::string& k) const {
    auto it = kv_.find(k);
    if (it == kv_.end()) throw std::invalid_argument("missing config key: " + k);
    return it->second;
  }
  std::string str(const std::string& k, const std::string& def) const { return has(k) ? str(k) : def; }
  double real(const std::string& k) const { return std::stod(str(k)); }
  double real(const std::string& k, double def) const { return has(k) ? real(k) : def; }
  std::int64_t integer(const std::string& k) const { return std::stoll(str(k)); }
  std::int64_t integer(const std::string& k, std::int64_t def) const { return has(k) ? integer(k) : def; }
  std::uint64_t u64(const std::string& k, std::uint64_t def) const { return has(k) ? std::stoull(str(k)) : def; }

  std::vector<double> reals(const std::string& k) const {
    std::vector<double> out;
    std::stringstream ss(str(k));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!trim(item).empty()) out.push_back(std::stod(item));
    }
    return out;
  }
  std::vector<double> reals(const std::string& k, const std::vector<double>& def) const {
    return has(k) ? reals(k) : def;
  }

  // Content hash of the rendered config, excluding keys that do not affect results.
  std::string hash(const std::vector<std::string>& exclude = {"workers", "out"}) const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& [k, v] : kv_) {
      bool skip = false;
      for (const auto& e : exclude) skip |= (e == k);
      if (skip) continue;
      for (char ch : k + "=" + v + "\n") {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
      }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }
  bool operator==(const RunConfig&) const = default;

  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
    return s;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  std::map<std::string, std::string> kv_;
};

}  // namespace fracac
