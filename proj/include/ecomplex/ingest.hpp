#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecomplex/matrix.hpp"

namespace ecomplex {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  /// Parses ISO-8601 YYYY-MM-DD and validates the calendar day. nullopt on
  /// malformed text.
  static std::optional<Date> parse(std::string_view text);
  std::string str() const;

  auto operator<=>(const Date&) const = default;
};

struct FirmRecord {
  std::string firm_id;
  std::string region;
  std::string industry;
  Date list_date;
  std::optional<Date> delist_date;
};

struct RowDiagnostic {
  std::size_t line = 0;
  std::string message;
};

/// Parsed firms file. Rows with a blank region or industry are not records;
/// they are listed in `rejected` so callers can report the count.
struct FirmFile {
  std::vector<FirmRecord> records;
  std::vector<RowDiagnostic> rejected;
};

FirmFile parse_firm_records(const std::filesystem::path& path);
FirmFile parse_firm_records(std::istream& in, std::string_view source = "<stream>");

/// A firm counts in `year` if listed in or before it and not delisted by the
/// start of it; the delisting year itself is excluded.
bool is_active(const FirmRecord& record, int year) noexcept;

/// Yearly region x industry firm counts. Labels are unique and sorted.
struct CountMatrix {
  int year = 0;
  std::vector<std::string> regions;
  std::vector<std::string> industries;
  Matrix<std::int64_t> counts;

  std::int64_t total() const noexcept;
  /// Throws Error(InvalidValue) if labels repeat, a count is negative, the
  /// shape disagrees with the labels, or every entry is zero.
  void validate() const;

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;
};

/// Throws Error(EmptyYear) if no firm is active in `year`.
CountMatrix build_count_matrix(std::span<const FirmRecord> records, int year);

/// CSV with header `region,<industry...>` and one row per region.
void write_count_matrix(std::ostream& out, const CountMatrix& counts);
CountMatrix read_count_matrix(std::istream& in, int year);

enum class PanelColumn : std::size_t {
  GdpPc,
  Population,
  Urbanization,
  Schooling,
  Innovation,
  Trade,
  Ricu,
  Ricr,
};

inline constexpr std::size_t kPanelColumnCount = 8;
inline constexpr std::array<std::string_view, kPanelColumnCount> kPanelColumnNames = {
    "gdp_pc", "population", "urbanization", "schooling", "innovation", "trade", "ricu", "ricr"};

struct PanelRow {
  std::array<std::optional<double>, kPanelColumnCount> values;

  const std::optional<double>& operator[](PanelColumn c) const { return values[static_cast<std::size_t>(c)]; }
  std::optional<double>& operator[](PanelColumn c) { return values[static_cast<std::size_t>(c)]; }
};

/// Region-year macro indicators. Blank cells stay missing.
class PanelTable {
 public:
  using Key = std::pair<std::string, int>;

  /// Throws Error(DuplicateKey) if the key exists, Error(InvalidValue) for a
  /// non-finite value or a fraction outside [0, 1].
  void insert(const std::string& region, int year, const PanelRow& row);

  const PanelRow* find(const std::string& region, int year) const;
  const std::map<Key, PanelRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }

 private:
  std::map<Key, PanelRow> rows_;
};

PanelTable parse_panel(const std::filesystem::path& path);
PanelTable parse_panel(std::istream& in, std::string_view source = "<stream>");

}  // namespace ecomplex
