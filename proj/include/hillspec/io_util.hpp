// File and text helpers. All floating point output uses 17 significant
// digits so values round-trip bit-exactly through CSV.
#pragma once

#include <string>
#include <vector>

namespace hillspec::ioutil {

std::string fmt17(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

// Strict numeric parsing; context names the offending field in the error.
double to_double(const std::string& tok, const std::string& context);
long to_long(const std::string& tok, const std::string& context);

}  // namespace hillspec::ioutil
