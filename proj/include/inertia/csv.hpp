#pragma once

#include "inertia/types.hpp"

#include <string>
#include <vector>

namespace inertia {

// Shortest decimal form that round-trips a double exactly.
std::string format_full(Scalar v);

std::string trim(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);

// Minimal headered CSV writer; columns are written row by row.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<Scalar>& values);
  void raw_row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

struct CsvTable {
  std::vector<std::string> columns;
  Mat values;  // numeric cells

  Index col(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace inertia
