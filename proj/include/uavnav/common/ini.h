#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uavnav {

// Flat view of a sectioned key = value document. Keys are qualified as
// "section.key"; keys before any [section] header stay unqualified.
// '#' and ';' start comments.
struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<IniEntry> parse_ini(std::string_view text);

// Splits "section.key=value" command-line overrides.
IniEntry parse_override(std::string_view text);

double parse_double(const IniEntry& entry);
long long parse_int(const IniEntry& entry);
unsigned long long parse_uint(const IniEntry& entry);
bool parse_bool(const IniEntry& entry);

// Shortest text that parses back to the same value.
std::string format_number(double value);
std::string format_number(float value);

}  // namespace uavnav
