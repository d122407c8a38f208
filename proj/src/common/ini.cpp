#include "uavnav/common/ini.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "uavnav/common/errors.h"

namespace uavnav {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const IniEntry& entry, const char* expected) {
  std::ostringstream msg;
  msg << "config key '" << entry.key << "'";
  if (entry.line > 0) msg << " (line " << entry.line << ")";
  msg << ": expected " << expected << ", got '" << entry.value << "'";
  throw ConfigError(msg.str());
}

}  // namespace

std::vector<IniEntry> parse_ini(std::string_view text) {
  std::vector<IniEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(std::string_view(line).substr(0, line.find_first_of("#;")));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    IniEntry entry;
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    entry.key = section.empty() ? key : section + "." + key;
    entry.value = trim(std::string_view(body).substr(eq + 1));
    entry.line = line_no;
    entries.push_back(std::move(entry));
  }
  return entries;
}

IniEntry parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(text) + "': expected key=value");
  IniEntry entry;
  entry.key = trim(text.substr(0, eq));
  entry.value = trim(text.substr(eq + 1));
  if (entry.key.empty()) throw ConfigError("override '" + std::string(text) + "': empty key");
  return entry;
}

double parse_double(const IniEntry& entry) {
  try {
    std::size_t used = 0;
    const double v = std::stod(entry.value, &used);
    if (used != entry.value.size() || !std::isfinite(v)) bad_value(entry, "a finite number");
    return v;
  } catch (const std::logic_error&) {
    bad_value(entry, "a number");
  }
}

long long parse_int(const IniEntry& entry) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(entry.value, &used);
    if (used != entry.value.size()) bad_value(entry, "an integer");
    return v;
  } catch (const std::logic_error&) {
    bad_value(entry, "an integer");
  }
}

unsigned long long parse_uint(const IniEntry& entry) {
  if (!entry.value.empty() && entry.value.front() == '-') bad_value(entry, "a non-negative integer");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(entry.value, &used);
    if (used != entry.value.size()) bad_value(entry, "a non-negative integer");
    return v;
  } catch (const std::logic_error&) {
    bad_value(entry, "a non-negative integer");
  }
}

bool parse_bool(const IniEntry& entry) {
  if (entry.value == "true" || entry.value == "1" || entry.value == "yes") return true;
  if (entry.value == "false" || entry.value == "0" || entry.value == "no") return false;
  bad_value(entry, "true or false");
}

namespace {

template <typename T>
std::string shortest(T value) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string format_number(double value) { return shortest(value); }
std::string format_number(float value) { return shortest(value); }

}  // namespace uavnav
