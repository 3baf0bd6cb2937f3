/*
 * Copyright 2026 The vmwatt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Small helpers shared by every CSV reader and writer in the toolkit.
// Numbers are written in shortest round-trip form so a parse of a written
// file reproduces the exact doubles.

#ifndef VMWATT_CSV_HPP_
#define VMWATT_CSV_HPP_

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace vmwatt::csv {

std::string format_number(double value);

// Splits on ',' without quoting support; none of our formats quote.
std::vector<std::string_view> split(std::string_view line);

// Parses a finite double; throws a kParse error naming `where` otherwise.
double parse_number(std::string_view field, const std::string& where);

// Reads one logical line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

std::string location(const std::string& source, std::size_t line_no);

// Opens a file for reading; missing files raise kNotFound naming the path.
std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace vmwatt::csv

#endif  // VMWATT_CSV_HPP_
