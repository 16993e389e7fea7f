#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsgda/sweep.hpp"

namespace dsgda {

// Error tied to a position in a config file; what() reads "source:line: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct IniValue {
  std::string text;
  int line = 0;
};

// Sections of `key = value` lines; '#' and ';' start comments.
class IniDocument {
 public:
  IniDocument() = default;
  IniDocument(std::string source, std::map<std::string, std::map<std::string, IniValue>> sections,
              std::map<std::string, int> section_lines);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;
  const IniValue* get(const std::string& section, const std::string& key) const;
  const std::string& source() const { return source_; }
  const std::map<std::string, std::map<std::string, IniValue>>& sections() const {
    return sections_;
  }
  int section_line(const std::string& section) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, IniValue>> sections_;
  std::map<std::string, int> section_lines_;
};

IniDocument parse_ini(const std::string& text, const std::string& source);

struct ExperimentConfig {
  ExperimentSetup setup;
  SweepAxis axis;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json", "svg"};
  std::string source;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source);
ExperimentConfig load_config(const std::string& path);

}  // namespace dsgda
