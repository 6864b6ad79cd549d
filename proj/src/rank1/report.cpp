#include "rank1/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace rank1 {

std::string mode_str(const std::string& base, int samples) {
  if (base == "sampled") return "sampled(N=" + std::to_string(samples) + ")";
  return base;
}

void Report::add(CheckRecord rec) { checks.push_back(std::move(rec)); }

void Report::add_pass(const std::string& id, const std::string& statement,
                      const std::string& mode, const std::string& detail) {
  checks.push_back({id, statement, mode, CheckRecord::pass, detail});
}

void Report::add_result(const std::string& id, const std::string& statement,
                        const std::string& mode, bool ok, const std::string& detail) {
  checks.push_back({id, statement, mode, ok ? CheckRecord::pass : CheckRecord::fail, detail});
}

void Report::add_skip(const std::string& id, const std::string& statement,
                      const std::string& reason) {
  checks.push_back({id, statement, "-", CheckRecord::skip, reason});
}

void Report::add_info(const std::string& id, const std::string& statement,
                      const std::string& detail) {
  checks.push_back({id, statement, "-", CheckRecord::info, detail});
}

bool Report::all_pass() const {
  for (const auto& c : checks)
    if (c.status == CheckRecord::fail) return false;
  return true;
}

const CheckRecord* Report::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {
const char* status_str(CheckRecord::Status s) {
  switch (s) {
    case CheckRecord::pass: return "PASS";
    case CheckRecord::fail: return "FAIL";
    case CheckRecord::skip: return "SKIP";
    case CheckRecord::info: return "INFO";
  }
  return "?";
}
}  // namespace

std::string Report::render_human() const {
  std::ostringstream os;
  os << "scenario: " << scenario << "\n";
  os << "branch:   " << branch << "\n";
  os << std::string(78, '-') << "\n";
  for (const auto& c : checks) {
    os << "[" << status_str(c.status) << "] " << c.id;
    if (c.mode != "-" && !c.mode.empty()) os << " (" << c.mode << ")";
    os << "\n        " << c.statement << "\n";
    if (!c.detail.empty()) os << "        " << c.detail << "\n";
  }
  os << std::string(78, '-') << "\n";
  int npass = 0, nfail = 0, nskip = 0, ninfo = 0;
  for (const auto& c : checks) {
    if (c.status == CheckRecord::pass) ++npass;
    if (c.status == CheckRecord::fail) ++nfail;
    if (c.status == CheckRecord::skip) ++nskip;
    if (c.status == CheckRecord::info) ++ninfo;
  }
  os << "checks: " << npass << " passed, " << nfail << " failed, " << nskip << " skipped, "
     << ninfo << " informational\n";
  for (const auto& [k, v] : summary) os << k << ": " << v << "\n";
  os << "result: " << (all_pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string Report::render_machine() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["branch"] = branch;
  j["result"] = all_pass() ? "pass" : "fail";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["status"] = status_str(c.status);
    e["mode"] = c.mode;
    e["statement"] = c.statement;
    e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  nlohmann::ordered_json sum;
  for (const auto& [k, v] : summary) sum[k] = v;
  j["summary"] = sum;
  return j.dump(2) + "\n";
}

}  // namespace rank1
