#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace netsens::cli {

inline constexpr const char* kSchema = "netsens/1";

using Cell = std::variant<std::monostate, std::string, double, long long, bool>;

inline Cell maybe(const std::optional<double>& v) {
  if (!v) return std::monostate{};
  return *v;
}

// Scalar fields followed by an optional table. Every command produces one.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, Cell>> fields;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void field(std::string key, Cell value) { fields.emplace_back(std::move(key), std::move(value)); }
};

enum class OutputFormat { table, csv, json };

namespace detail {

inline std::string number(double v, bool readable) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = readable ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10)
                            : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string text(const Cell& c, bool readable) {
  struct Visitor {
    bool readable;
    std::string operator()(std::monostate) const { return readable ? "-" : ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double v) const { return number(v, readable); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{readable}, c);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline nlohmann::ordered_json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

inline bool right_aligned(const Cell& c) {
  return std::holds_alternative<double>(c) || std::holds_alternative<long long>(c);
}

} // namespace detail

inline void render_json(const Report& r, std::ostream& out) {
  nlohmann::ordered_json j;
  j["schema"] = kSchema;
  j["command"] = r.command;
  for (const auto& [k, v] : r.fields) j[k] = detail::json_cell(v);
  if (!r.columns.empty()) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json o = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = detail::json_cell(row[c]);
      rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
  }
  j["notes"] = r.notes;
  out << j.dump(2) << '\n';
}

// CSV carries the table only; commands without one print key,value pairs.
inline void render_csv(const Report& r, std::ostream& out, std::ostream& err) {
  if (r.columns.empty()) {
    out << "key,value\n";
    for (const auto& [k, v] : r.fields) out << detail::csv_escape(k) << ',' << detail::csv_escape(detail::text(v, false)) << '\n';
  } else {
    for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << detail::csv_escape(r.columns[c]);
    out << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << detail::csv_escape(detail::text(row[c], false));
      out << '\n';
    }
  }
  for (const auto& n : r.notes) err << "note: " << n << '\n';
}

inline void render_table(const Report& r, std::ostream& out) {
  std::size_t key_width = 0;
  for (const auto& f : r.fields) key_width = std::max(key_width, f.first.size());
  for (const auto& [k, v] : r.fields) {
    out << k << ':' << std::string(key_width - k.size() + 1, ' ') << detail::text(v, true) << '\n';
  }
  if (!r.columns.empty()) {
    if (!r.fields.empty()) out << '\n';
    std::vector<std::size_t> width(r.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t c = 0; c < r.columns.size(); ++c) width[c] = r.columns[c].size();
    for (const auto& row : r.rows) {
      auto& line = cells.emplace_back();
      for (std::size_t c = 0; c < row.size(); ++c) {
        line.push_back(detail::text(row[c], true));
        width[c] = std::max(width[c], line.back().size());
      }
    }
    auto pad = [&](const std::string& s, std::size_t w, bool right) {
      const std::string fill(w - s.size(), ' ');
      return right ? fill + s : s + fill;
    };
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      out << (c ? "  " : "") << pad(r.columns[c], width[c], false);
    }
    out << '\n';
    for (std::size_t k = 0; k < cells.size(); ++k) {
      std::string line;
      for (std::size_t c = 0; c < cells[k].size(); ++c) {
        line += (c ? "  " : "") + pad(cells[k][c], width[c], detail::right_aligned(r.rows[k][c]));
      }
      line.erase(line.find_last_not_of(' ') + 1);
      out << line << '\n';
    }
    if (r.rows.empty()) out << "(no rows)\n";
  }
  for (const auto& n : r.notes) out << "note: " << n << '\n';
}

inline void render(const Report& r, OutputFormat f, std::ostream& out, std::ostream& err) {
  switch (f) {
  case OutputFormat::json: render_json(r, out); break;
  case OutputFormat::csv: render_csv(r, out, err); break;
  case OutputFormat::table: render_table(r, out); break;
  }
}

} // namespace netsens::cli
