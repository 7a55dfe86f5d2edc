#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace twem {

// RFC 4180 record reader: quoted fields may contain commas, escaped quotes
// ("") and embedded line breaks. Accepts LF and CRLF line endings and strips
// a UTF-8 BOM from the first record.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record. Returns false on clean end of input; throws DataError
  // on a structurally broken file (unterminated quote). `record_number()`
  // is 1-based and counts the header as record 1.
  bool next(std::vector<std::string>& fields);

  long record_number() const { return record_number_; }

 private:
  std::istream& in_;
  long record_number_ = 0;
  bool first_ = true;
};

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace twem
