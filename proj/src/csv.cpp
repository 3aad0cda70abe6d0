#include "inertia/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace inertia {

std::string format_full(Scalar v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, ptr);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t n_columns = 0;
  std::string path;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : impl_(new Impl) {
  impl_->out.open(path);
  impl_->path = path;
  impl_->n_columns = columns.size();
  if (!impl_->out) {
    delete impl_;
    throw IoError("cannot open '" + path + "' for writing");
  }
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << (i ? "," : "") << columns[i];
  impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<Scalar>& values) {
  if (values.size() != impl_->n_columns)
    throw IoError("csv row width mismatch while writing '" + impl_->path + "'");
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->out << (i ? "," : "") << format_full(values[i]);
  impl_->out << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
  if (fields.size() != impl_->n_columns)
    throw IoError("csv row width mismatch while writing '" + impl_->path + "'");
  for (std::size_t i = 0; i < fields.size(); ++i)
    impl_->out << (i ? "," : "") << fields[i];
  impl_->out << "\n";
}

Index CsvTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<Index>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open csv file '" + path + "'");
  CsvTable table;
  std::string line;
  std::vector<std::vector<Scalar>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (table.columns.empty()) {
      table.columns = fields;
      continue;
    }
    std::vector<Scalar> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(f.empty() ? 0.0 : std::stod(f));
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != table.columns.size())
      throw IoError("ragged csv row in '" + path + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return table;
}

}  // namespace inertia
