#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cpsor {

// Shortest-form decimal text with `digits` significant digits ("%.{digits}g").
std::string format_number(double value, int digits);

// Rounds a value to what format_number(value, digits) would print.
double quantize(double value, int digits);

// Strict full-string parse; throws std::invalid_argument on trailing garbage.
double parse_number(std::string_view text);
long long parse_integer(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace cpsor
