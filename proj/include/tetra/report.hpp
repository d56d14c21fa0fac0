#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace tetra {

enum class Verdict { pass, fail, inconclusive, skipped };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::skipped: return "skipped";
  }
  return "unknown";
}

struct CheckResult {
  double residual = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::skipped;
  std::string note;
};

/// Outcome of a verification pass: named checks with residuals and
/// verdicts, plus a configuration echo so a report fully identifies the
/// run that produced it. Checks are kept in a sorted map so that
/// serialization is deterministic.
class VerificationReport {
 public:
  void record(const std::string& name, double residual, double threshold,
              const std::string& note = "") {
    CheckResult r;
    r.residual = residual;
    r.threshold = threshold;
    r.verdict = (residual <= threshold) ? Verdict::pass : Verdict::fail;
    r.note = note;
    checks_[name] = r;
  }

  void record_verdict(const std::string& name, Verdict v, double residual = 0.0,
                      double threshold = 0.0, const std::string& note = "") {
    checks_[name] = CheckResult{residual, threshold, v, note};
  }

  void skip(const std::string& name, const std::string& why) {
    checks_[name] = CheckResult{0.0, 0.0, Verdict::skipped, why};
  }

  void set_config(const std::string& key, const nlohmann::json& value) { config_[key] = value; }

  void merge(const VerificationReport& other, const std::string& prefix = "") {
    for (const auto& [name, check] : other.checks_) checks_[prefix + name] = check;
  }

  const std::map<std::string, CheckResult>& checks() const { return checks_; }

  bool has(const std::string& name) const { return checks_.count(name) > 0; }

  const CheckResult& at(const std::string& name) const { return checks_.at(name); }

  bool all_passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& kv) {
      return kv.second.verdict == Verdict::pass || kv.second.verdict == Verdict::skipped;
    });
  }

  bool any_failed() const {
    return std::any_of(checks_.begin(), checks_.end(),
                       [](const auto& kv) { return kv.second.verdict == Verdict::fail; });
  }

  double max_residual() const {
    double r = 0.0;
    for (const auto& [name, check] : checks_)
      if (check.verdict != Verdict::skipped) r = std::max(r, check.residual);
    return r;
  }

  nlohmann::json to_json() const {
    nlohmann::json checks = nlohmann::json::object();
    for (const auto& [name, check] : checks_) {
      nlohmann::json c;
      c["residual"] = check.residual;
      c["threshold"] = check.threshold;
      c["verdict"] = to_string(check.verdict);
      if (!check.note.empty()) c["note"] = check.note;
      checks[name] = c;
    }
    nlohmann::json j;
    j["checks"] = checks;
    if (!config_.is_null()) j["config"] = config_;
    j["all_passed"] = all_passed();
    return j;
  }

  std::string to_text() const {
    std::ostringstream out;
    std::size_t width = 8;
    for (const auto& [name, check] : checks_) width = std::max(width, name.size());
    for (const auto& [name, check] : checks_) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << name;
      out << std::setw(14) << to_string(check.verdict);
      if (check.verdict == Verdict::pass || check.verdict == Verdict::fail) {
        out << std::scientific << std::setprecision(3) << "residual " << check.residual
            << "  threshold " << check.threshold;
      }
      if (!check.note.empty()) out << "  (" << check.note << ")";
      out << "\n";
    }
    out << (all_passed() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
    return out.str();
  }

 private:
  std::map<std::string, CheckResult> checks_;
  nlohmann::json config_;
};

}  // namespace tetra
