#pragma once

#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace drbsde {

/// Fixed 17-significant-digit decimal form, stable across runs.
std::string fmt17(double v);

/// Minimal ordered JSON value with 17-significant-digit number output.
class JsonValue {
 public:
  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double v);
  static JsonValue integer(long long v);
  static JsonValue boolean(bool v);
  static JsonValue string(std::string v);

  JsonValue& set(const std::string& key, JsonValue v);  // object insertion
  JsonValue& push(JsonValue v);                         // array append

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { Object, Array, Number, Integer, Boolean, String };
  Kind kind_ = Kind::Object;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> elements_;

  void write(std::string& out, int indent, int depth) const;
};

/// Buffered CSV table: header first, then rows; all cells preformatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  std::string dump() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to path, creating parent directories. Throws on
/// failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace drbsde
