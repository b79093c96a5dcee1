#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "rnkm/data.hpp"
#include "rnkm/error.hpp"

namespace rnkm::data {
namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Splits RFC-4180 style records; quoted fields may hold delimiters,
// doubled quotes and line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delim, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && trim(fields[0]).empty();
    if (!blank) records.push_back(std::move(fields));
    fields.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == delim) {
      end_field();
    } else if (ch == '\r') {
      // swallowed; CRLF ends the record at '\n'
    } else if (ch == '\n') {
      end_record();
      ++line;
    } else {
      field.push_back(ch);
      if (ch != ' ' && ch != '\t') field_started = true;
    }
  }
  if (quoted) parse_error(source + ": unterminated quoted field near line " + std::to_string(line));
  if (!field.empty() || !fields.empty()) end_record();
  return records;
}

bool parse_number(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

DataSet parse_csv(std::string_view text, const CsvOptions& options, const std::string& source) {
  auto records = split_records(text, options.delimiter, source);
  if (records.empty()) parse_error(source + ": no records");

  std::vector<std::string> header;
  std::size_t first = 0;
  if (options.has_header) {
    header = records[0];
    for (auto& h : header) h = std::string(trim(h));
    first = 1;
  }
  if (records.size() <= first) parse_error(source + ": no data rows");

  const std::size_t width = records[first].size();
  if (options.has_header && header.size() != width)
    parse_error(source + ": header has " + std::to_string(header.size()) + " fields but row 2 has " +
                std::to_string(width));

  std::optional<std::size_t> label_col = options.label_index;
  if (options.label_column) {
    if (!options.has_header) throw_invalid(source + ": a label column name requires a header row");
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == *options.label_column) label_col = c;
    if (!label_col) parse_error(source + ": no column named '" + *options.label_column + "'");
  }
  if (label_col && *label_col >= width) parse_error(source + ": label column index out of range");

  const std::size_t d = width - (label_col ? 1 : 0);
  if (d == 0) parse_error(source + ": no feature columns");

  DataSet out;
  for (std::size_t c = 0; c < width; ++c) {
    if (label_col && c == *label_col) continue;
    out.feature_names.push_back(options.has_header ? header[c] : "x" + std::to_string(out.feature_names.size()));
  }

  std::vector<double> values;
  values.reserve((records.size() - first) * d);
  std::vector<int> labels;
  std::map<std::string, int> label_ids;
  for (std::size_t r = first; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row_number = r + 1;
    if (rec.size() != width)
      parse_error(source + ": row " + std::to_string(row_number) + " has " + std::to_string(rec.size()) +
                  " fields, expected " + std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        const std::string key(trim(rec[c]));
        auto [it, inserted] = label_ids.emplace(key, static_cast<int>(label_ids.size()));
        if (inserted) out.label_names.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      if (!parse_number(rec[c], v)) {
        const std::string name = options.has_header ? " ('" + header[c] + "')" : "";
        parse_error(source + ": row " + std::to_string(row_number) + ", column " + std::to_string(c + 1) + name +
                    ": '" + rec[c] + "' is not a finite number");
      }
      values.push_back(v);
    }
  }
  const std::size_t n = records.size() - first;
  out.values = Matrix(n, d, std::move(values));
  if (label_col) out.labels = std::move(labels);
  return out;
}

DataSet load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), options, path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string to_csv(const DataSet& data, char delimiter) {
  std::string out;
  const std::size_t d = data.values.cols();
  for (std::size_t c = 0; c < d; ++c) {
    if (c) out += delimiter;
    out += c < data.feature_names.size() ? data.feature_names[c] : "x" + std::to_string(c);
  }
  if (data.labels) out += std::string(1, delimiter) + "label";
  out += '\n';
  for (std::size_t i = 0; i < data.values.rows(); ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      if (c) out += delimiter;
      out += format_double(data.values(i, c));
    }
    if (data.labels) {
      out += delimiter;
      const int l = (*data.labels)[i];
      out += static_cast<std::size_t>(l) < data.label_names.size() ? data.label_names[static_cast<std::size_t>(l)]
                                                                   : std::to_string(l);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const DataSet& data, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << to_csv(data, delimiter);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

NormalizedMatrix minmax_normalize(const Matrix& x) {
  NormalizedMatrix out{x, std::vector<bool>(x.cols(), false)};
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      lo = std::min(lo, x(i, c));
      hi = std::max(hi, x(i, c));
    }
    const double range = hi - lo;
    if (!(range > 0.0)) {
      out.constant_columns[c] = true;
      for (std::size_t i = 0; i < x.rows(); ++i) out.values(i, c) = 0.0;
      continue;
    }
    for (std::size_t i = 0; i < x.rows(); ++i) out.values(i, c) = (x(i, c) - lo) / range;
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open manifest '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    parse_error("manifest '" + path.string() + "': " + e.what());
  }
  if (!doc.contains("datasets") || !doc["datasets"].is_array()) parse_error("manifest needs a 'datasets' array");

  std::vector<ManifestEntry> entries;
  for (const auto& item : doc["datasets"]) {
    ManifestEntry e;
    e.id = item.at("id").get<std::string>();
    e.path = item.at("path").get<std::string>();
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    if (item.contains("label_column")) e.csv.label_column = item["label_column"].get<std::string>();
    if (item.contains("delimiter")) e.csv.delimiter = item["delimiter"].get<std::string>().at(0);
    if (item.contains("header")) e.csv.has_header = item["header"].get<bool>();
    if (item.contains("n")) e.expected_n = item["n"].get<std::size_t>();
    if (item.contains("d")) e.expected_d = item["d"].get<std::size_t>();
    entries.push_back(std::move(e));
  }
  return entries;
}

DataSet load_entry(const ManifestEntry& entry) {
  DataSet ds = load_csv(entry.path, entry.csv);
  if (entry.expected_n && ds.values.rows() != *entry.expected_n)
    parse_error("data set '" + entry.id + "' has " + std::to_string(ds.values.rows()) + " rows, expected " +
                std::to_string(*entry.expected_n));
  if (entry.expected_d && ds.values.cols() != *entry.expected_d)
    parse_error("data set '" + entry.id + "' has " + std::to_string(ds.values.cols()) + " features, expected " +
                std::to_string(*entry.expected_d));
  return ds;
}

}  // namespace rnkm::data
