#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pblock {

// Comma-separated table with `#` comment lines ahead of the header row.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

// 12 significant digits, shortest of fixed/scientific (printf %.12g).
std::string format_number(double v);

std::string render(const CsvTable& table);

// Parses text written by render(); comments are kept, cells are unquoted.
CsvTable parse_csv(const std::string& text);

// FNV-1a 64-bit digest, lower-case hex.
std::string checksum_hex(const std::string& bytes);

struct WrittenFile {
  std::string name;
  std::string checksum;
};

WrittenFile write_text_file(const std::filesystem::path& dir, const std::string& name,
                            const std::string& content);

}  // namespace pblock
