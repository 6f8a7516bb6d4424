#pragma once
#include <string>
#include <vector>

#include "stc/types.hpp"

namespace stc {

// Deterministic double formatting shared by every CSV writer; %.10g keeps
// byte-identical output a plain consequence of identical values.
std::string format_double(double v);

// Rows of formatted cells under a fixed header. The first header column of
// every experiment file is schema_version.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  size_t width_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Dataset file: CSV with header schema_version,label,f0..f{N-1}; one item per
// row, features %.17g so values round-trip exactly.
void save_dataset(const FeatureMatrix& data, const std::string& path);
FeatureMatrix load_dataset(const std::string& path);

}  // namespace stc
