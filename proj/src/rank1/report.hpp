#pragma once

#include <map>
#include <string>
#include <vector>

namespace rank1 {

struct CheckRecord {
  std::string id;
  std::string statement;
  std::string mode;  // "exhaustive", "sampled(N)", "certificate"
  enum Status { pass, fail, skip, info } status = pass;
  std::string detail;  // witness text or skip reason
};

std::string mode_str(const std::string& base, int samples);

struct Report {
  std::string scenario;
  std::string branch;  // quadratic-baseline | a0-trivial | commutative | noncommutative
  std::vector<CheckRecord> checks;
  std::map<std::string, std::string> summary;  // dimensions, verdicts

  void add(CheckRecord rec);
  void add_pass(const std::string& id, const std::string& statement, const std::string& mode,
                const std::string& detail = "");
  void add_result(const std::string& id, const std::string& statement, const std::string& mode,
                  bool ok, const std::string& detail = "");
  void add_skip(const std::string& id, const std::string& statement, const std::string& reason);
  void add_info(const std::string& id, const std::string& statement, const std::string& detail);

  bool all_pass() const;
  const CheckRecord* find(const std::string& id) const;

  std::string render_human() const;
  std::string render_machine() const;  // deterministic JSON
};

// registry used by the CLI `explain` subcommand
struct CheckDoc {
  std::string id;
  std::string statement;
  std::string algorithm;
};
const std::vector<CheckDoc>& check_registry();
const CheckDoc* find_check_doc(const std::string& id);

}  // namespace rank1
