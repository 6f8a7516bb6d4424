#include "stc/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace stc {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : width_(header.size()) {
  if (header.empty()) throw std::invalid_argument("csv: empty header");
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw std::invalid_argument("csv: row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string out(static_cast<size_t>(is.tellg()), '\0');
  is.seekg(0);
  is.read(out.data(), static_cast<std::streamsize>(out.size()));
  if (!is) throw std::runtime_error("read failed: " + path);
  return out;
}

void save_dataset(const FeatureMatrix& data, const std::string& path) {
  const int N = static_cast<int>(data.X.rows());
  const int M = static_cast<int>(data.X.cols());
  if (static_cast<size_t>(M) != data.labels.size())
    throw std::invalid_argument("save_dataset: label count mismatch");
  std::string out = "schema_version,label";
  for (int i = 0; i < N; ++i) out += ",f" + std::to_string(i);
  out += '\n';
  char buf[64];
  for (int m = 0; m < M; ++m) {
    out += "1," + std::to_string(data.labels[m]);
    for (int i = 0; i < N; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", data.X(i, m));
      out += buf;
    }
    out += '\n';
  }
  write_text_file(path, out);
}

FeatureMatrix load_dataset(const std::string& path) {
  std::string text = read_text_file(path);
  size_t pos = text.find('\n');
  if (pos == std::string::npos) throw std::runtime_error("dataset: missing header");
  std::string header = text.substr(0, pos);
  if (header.rfind("schema_version,label,f0", 0) != 0)
    throw std::runtime_error("dataset: unrecognized header");
  int N = 0;
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == ',') ++N;
  --N;  // the label column

  std::vector<std::vector<double>> rows;
  std::vector<int32_t> labels;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos + 1);
    if (end == std::string::npos) end = text.size();
    const char* p = text.data() + pos + 1;
    const char* stop = text.data() + end;
    if (p >= stop) break;
    char* next = nullptr;
    long version = std::strtol(p, &next, 10);
    if (version != 1 || *next != ',') throw std::runtime_error("dataset: bad schema version");
    p = next + 1;
    labels.push_back(static_cast<int32_t>(std::strtol(p, &next, 10)));
    p = next;
    std::vector<double> row;
    row.reserve(N);
    while (p < stop && *p == ',') {
      ++p;
      row.push_back(std::strtod(p, &next));
      p = next;
    }
    if (static_cast<int>(row.size()) != N) throw std::runtime_error("dataset: ragged row");
    rows.push_back(std::move(row));
    pos = end;
  }
  FeatureMatrix out;
  out.X.resize(N, static_cast<int>(rows.size()));
  for (size_t m = 0; m < rows.size(); ++m)
    for (int i = 0; i < N; ++i) out.X(i, static_cast<int>(m)) = rows[m][i];
  out.labels = std::move(labels);
  return out;
}

}  // namespace stc
