#include "ecomplex/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ecomplex/csv.hpp"
#include "ecomplex/error.hpp"

namespace ecomplex {
namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

/// Column positions keyed by required name; throws MissingColumn.
std::vector<std::size_t> locate_columns(const std::vector<std::string>& header,
                                        std::span<const std::string_view> required, std::string_view source) {
  std::vector<std::size_t> pos;
  for (auto name : required) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(Errc::MissingColumn, std::string(source) + ": header lacks column '" + std::string(name) + "'");
    pos.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return pos;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

constexpr std::string_view kFirmColumns[] = {"firm_id", "region", "industry", "list_date", "delist_date"};
constexpr std::string_view kPanelKeyColumns[] = {"region", "year"};

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
  auto num = [&](std::size_t at, std::size_t len) {
    int v = 0;
    for (std::size_t i = at; i < at + len; ++i) v = v * 10 + (text[i] - '0');
    return v;
  };
  Date d{num(0, 4), num(5, 2), num(8, 2)};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) return std::nullopt;
  return d;
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

FirmFile parse_firm_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open firms file " + path.string());
  return parse_firm_records(in, path.string());
}

FirmFile parse_firm_records(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingColumn, std::string(source) + ": missing header row");
  const auto pos = locate_columns(csv::split_line(line), kFirmColumns, source);
  const std::size_t width = *std::max_element(pos.begin(), pos.end()) + 1;

  FirmFile file;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = csv::split_line(line);
    if (fields.size() < width)
      throw Error(Errc::InvalidValue, where(source, line_no) + ": expected at least " + std::to_string(width) +
                                          " fields, found " + std::to_string(fields.size()));
    FirmRecord rec;
    rec.firm_id = fields[pos[0]];
    rec.region = fields[pos[1]];
    rec.industry = fields[pos[2]];
    if (rec.firm_id.empty() || rec.region.empty() || rec.industry.empty()) {
      file.rejected.push_back({line_no, rec.firm_id.empty() ? "blank firm_id"
                                        : rec.region.empty() ? "blank region"
                                                             : "blank industry"});
      continue;
    }
    auto list = Date::parse(fields[pos[3]]);
    if (!list)
      throw Error(Errc::MalformedDate,
                  where(source, line_no) + ": column 'list_date' has malformed date '" + fields[pos[3]] + "'");
    rec.list_date = *list;
    if (const auto& raw = fields[pos[4]]; !raw.empty()) {
      auto delist = Date::parse(raw);
      if (!delist)
        throw Error(Errc::MalformedDate,
                    where(source, line_no) + ": column 'delist_date' has malformed date '" + raw + "'");
      if (*delist <= *list)
        throw Error(Errc::OrderViolation, where(source, line_no) + ": column 'delist_date' " + raw +
                                              " is not after list_date " + list->str());
      rec.delist_date = *delist;
    }
    if (!seen.insert(rec.firm_id).second)
      throw Error(Errc::DuplicateFirmId, where(source, line_no) + ": firm_id '" + rec.firm_id + "' repeats");
    file.records.push_back(std::move(rec));
  }
  return file;
}

bool is_active(const FirmRecord& record, int year) noexcept {
  if (record.list_date.year > year) return false;
  return !record.delist_date || record.delist_date->year > year;
}

std::int64_t CountMatrix::total() const noexcept {
  std::int64_t t = 0;
  for (std::size_t r = 0; r < counts.rows(); ++r)
    for (auto v : counts.row(r)) t += v;
  return t;
}

void CountMatrix::validate() const {
  if (counts.rows() != regions.size() || counts.cols() != industries.size())
    throw Error(Errc::InvalidValue, "count matrix shape does not match its labels");
  auto unique = [](const std::vector<std::string>& labels) {
    return std::set<std::string>(labels.begin(), labels.end()).size() == labels.size();
  };
  if (!unique(regions)) throw Error(Errc::InvalidValue, "duplicate region label");
  if (!unique(industries)) throw Error(Errc::InvalidValue, "duplicate industry label");
  bool positive = false;
  for (std::size_t r = 0; r < counts.rows(); ++r)
    for (auto v : counts.row(r)) {
      if (v < 0) throw Error(Errc::InvalidValue, "negative count");
      positive = positive || v > 0;
    }
  if (!positive) throw Error(Errc::InvalidValue, "count matrix has no positive entry");
}

CountMatrix build_count_matrix(std::span<const FirmRecord> records, int year) {
  std::set<std::string> regions, industries;
  for (const auto& r : records)
    if (is_active(r, year)) {
      regions.insert(r.region);
      industries.insert(r.industry);
    }
  if (regions.empty()) throw Error(Errc::EmptyYear, "no firm is active in " + std::to_string(year));

  CountMatrix out;
  out.year = year;
  out.regions.assign(regions.begin(), regions.end());
  out.industries.assign(industries.begin(), industries.end());
  out.counts = Matrix<std::int64_t>(out.regions.size(), out.industries.size());

  std::unordered_map<std::string_view, std::size_t> row_of, col_of;
  for (std::size_t i = 0; i < out.regions.size(); ++i) row_of[out.regions[i]] = i;
  for (std::size_t i = 0; i < out.industries.size(); ++i) col_of[out.industries[i]] = i;
  for (const auto& r : records)
    if (is_active(r, year)) ++out.counts(row_of.at(r.region), col_of.at(r.industry));
  return out;
}

void write_count_matrix(std::ostream& out, const CountMatrix& counts) {
  out << "region";
  for (const auto& ind : counts.industries) out << ',' << csv::escape(ind);
  out << '\n';
  for (std::size_t r = 0; r < counts.regions.size(); ++r) {
    out << csv::escape(counts.regions[r]);
    for (auto v : counts.counts.row(r)) out << ',' << v;
    out << '\n';
  }
}

CountMatrix read_count_matrix(std::istream& in, int year) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingColumn, "count matrix: missing header row");
  auto header = csv::split_line(line);
  if (header.empty() || header[0] != "region")
    throw Error(Errc::MissingColumn, "count matrix: first header cell must be 'region'");

  CountMatrix out;
  out.year = year;
  out.industries.assign(header.begin() + 1, header.end());
  std::vector<std::int64_t> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = csv::split_line(line);
    if (fields.size() != header.size())
      throw Error(Errc::InvalidValue, "count matrix line " + std::to_string(line_no) + ": wrong field count");
    out.regions.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      auto v = csv::parse_int(fields[c]);
      if (!v)
        throw Error(Errc::NonNumericCell, "count matrix line " + std::to_string(line_no) + ": '" + fields[c] + "'");
      cells.push_back(*v);
    }
  }
  out.counts = Matrix<std::int64_t>(out.regions.size(), out.industries.size());
  std::copy(cells.begin(), cells.end(), out.counts.data());
  out.validate();
  return out;
}

void PanelTable::insert(const std::string& region, int year, const PanelRow& row) {
  for (std::size_t c = 0; c < kPanelColumnCount; ++c) {
    const auto& v = row.values[c];
    if (!v) continue;
    if (!std::isfinite(*v))
      throw Error(Errc::InvalidValue, "panel (" + region + ", " + std::to_string(year) + "): non-finite " +
                                          std::string(kPanelColumnNames[c]));
    const auto col = static_cast<PanelColumn>(c);
    if ((col == PanelColumn::Urbanization || col == PanelColumn::Schooling) && (*v < 0.0 || *v > 1.0))
      throw Error(Errc::InvalidValue, "panel (" + region + ", " + std::to_string(year) + "): " +
                                          std::string(kPanelColumnNames[c]) + " must be a fraction in [0, 1]");
  }
  if (!rows_.emplace(Key{region, year}, row).second)
    throw Error(Errc::DuplicateKey, "panel key (" + region + ", " + std::to_string(year) + ") repeats");
}

const PanelRow* PanelTable::find(const std::string& region, int year) const {
  auto it = rows_.find(Key{region, year});
  return it == rows_.end() ? nullptr : &it->second;
}

PanelTable parse_panel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open panel file " + path.string());
  return parse_panel(in, path.string());
}

PanelTable parse_panel(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::MissingColumn, std::string(source) + ": missing header row");
  const auto header = csv::split_line(line);
  const auto key_pos = locate_columns(header, kPanelKeyColumns, source);
  const auto value_pos = locate_columns(header, kPanelColumnNames, source);

  PanelTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = csv::split_line(line);
    if (fields.size() != header.size())
      throw Error(Errc::InvalidValue, where(source, line_no) + ": expected " + std::to_string(header.size()) +
                                          " fields, found " + std::to_string(fields.size()));
    const auto& region = fields[key_pos[0]];
    if (region.empty()) throw Error(Errc::InvalidValue, where(source, line_no) + ": blank region");
    auto year = csv::parse_int(fields[key_pos[1]]);
    if (!year)
      throw Error(Errc::NonNumericCell,
                  where(source, line_no) + ": column 'year' is not an integer: '" + fields[key_pos[1]] + "'");
    PanelRow row;
    for (std::size_t c = 0; c < kPanelColumnCount; ++c) {
      const auto& cell = fields[value_pos[c]];
      if (cell.empty()) continue;
      auto v = csv::parse_double(cell);
      if (!v || !std::isfinite(*v))
        throw Error(Errc::NonNumericCell, where(source, line_no) + ": column '" + std::string(kPanelColumnNames[c]) +
                                              "' is not numeric: '" + cell + "'");
      row.values[c] = *v;
    }
    try {
      table.insert(region, static_cast<int>(*year), row);
    } catch (const Error& e) {
      throw Error(e.code(), where(source, line_no) + ": " + e.detail());
    }
  }
  return table;
}

}  // namespace ecomplex
