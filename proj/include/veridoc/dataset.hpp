#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veridoc/config.hpp"

namespace veridoc {

/// Ground-truth records loaded from a comma-separated file with a header row.
class ReferenceDataset {
public:
    ReferenceDataset() = default;
    /// Every row must have exactly one value per column.
    ReferenceDataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows);

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t row_count() const { return rows_.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;

    const std::string& value(std::size_t row, std::size_t col) const { return rows_[row][col]; }
    const std::string& lowered(std::size_t row, std::size_t col) const { return lowered_[row][col]; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::vector<std::string>> lowered_;
};

/// RFC 4180 style: quoted fields may hold commas, quotes ("") and newlines.
/// Blank lines are skipped. Throws ParseError naming the 1-based line.
ReferenceDataset parse_dataset(std::string_view text);
ReferenceDataset load_dataset(const std::filesystem::path& path);
std::string serialize_dataset(const ReferenceDataset& ds);

struct AttributeCheck {
    std::string column;
    std::string expected;  ///< lowercase dataset value
    bool found = false;
};

struct AttributeResult {
    bool passed = false;
    std::vector<AttributeCheck> checks;
    std::optional<std::size_t> matched_row;  ///< set only when passed in row mode
};

/// Looks for required column values (case-folded) as substrings of `text`.
/// Row mode reports the best row: most columns found, earliest on ties. Any mode
/// reports, per column, the first row whose value is found. Empty dataset values never match.
AttributeResult check_attributes(std::string_view text, const ReferenceDataset& ds,
                                 std::span<const std::string> required, MatchMode mode = MatchMode::row);

std::string to_lower(std::string_view s);

}  // namespace veridoc
