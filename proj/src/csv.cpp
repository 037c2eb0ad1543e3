#include "dlsgraph/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "dlsgraph/error.hpp"

namespace dlsgraph {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

// Splits `text` into records. Returns false at end of input.
class RecordReader {
 public:
  RecordReader(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          quoted = false;
          ++pos_;
          continue;
        }
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
        ++pos_;
      } else if (c == delim_) {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        ++pos_;
      } else if (c == '\r' || c == '\n') {
        pos_ += (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ? 2 : 1;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(c);
        ++pos_;
      }
    }
    if (quoted) throw ParseError("csv: unterminated quoted field", pos_);
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  char delim_;
  std::size_t pos_ = 0;
};

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

CsvTable read_csv(std::istream& is, char delimiter) {
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::string_view view(text);
  if (view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
  RecordReader reader(view, delimiter);
  CsvTable table;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (blank(fields)) continue;
    if (table.header.empty()) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError("expected " + std::to_string(table.header.size()) + " fields, found " +
                          std::to_string(fields.size()),
                      table.rows.size() + 1);
    }
    table.rows.push_back(fields);
  }
  if (table.header.empty()) throw DataError("csv: missing header row");
  return table;
}

CsvTable read_csv_file(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_csv(in, delimiter);
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) os << delimiter;
    const std::string& f = fields[i];
    if (f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
      os << f;
      continue;
    }
    os << '"';
    for (char c : f) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }
  os << '\n';
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace dlsgraph
