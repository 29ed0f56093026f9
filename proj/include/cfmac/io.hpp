#ifndef CFMAC_IO_HPP_
#define CFMAC_IO_HPP_

#include <string>
#include <vector>

#include "cfmac/pmf.hpp"

namespace cfmac {

// Shortest round-trip decimal text, '.' separator regardless of locale.
std::string fmt_double(double v);

// Minimal CSV builder: header row, then rows of already formatted cells.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Comma-separated user subset, 1-based, e.g. "{1,3}".
std::string mask_to_string(Mask m, int k);

}  // namespace cfmac

#endif  // CFMAC_IO_HPP_
