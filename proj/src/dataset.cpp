#include "veridoc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace veridoc {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

ReferenceDataset::ReferenceDataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].size() != columns_.size())
            throw ParameterError("dataset row " + std::to_string(i) + " has " + std::to_string(rows_[i].size()) +
                                 " values for " + std::to_string(columns_.size()) + " columns");
    lowered_.reserve(rows_.size());
    for (const auto& row : rows_) {
        std::vector<std::string> low;
        low.reserve(row.size());
        for (const auto& v : row) low.push_back(to_lower(v));
        lowered_.push_back(std::move(low));
    }
}

std::optional<std::size_t> ReferenceDataset::column_index(std::string_view name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

namespace {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

std::vector<Record> split_records(std::string_view text) {
    std::vector<Record> out;
    Record cur{{""}, 1};
    std::size_t line = 1;
    bool quoted = false;
    bool field_was_quoted = false;

    auto finish = [&] {
        const bool blank = cur.fields.size() == 1 && cur.fields[0].empty() && !field_was_quoted;
        if (!blank) out.push_back(std::move(cur));
        cur = Record{{""}, line};
        field_was_quoted = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur.fields.back().push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                cur.fields.back().push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cur.fields.back().empty())
                    throw ParseError("quote inside unquoted field", cur.line);
                quoted = true;
                field_was_quoted = true;
                break;
            case ',':
                cur.fields.emplace_back();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                ++line;
                finish();
                break;
            default:
                cur.fields.back().push_back(c);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", cur.line);
    finish();
    return out;
}

bool needs_quotes(const std::string& v) {
    return v.find_first_of(",\"\r\n") != std::string::npos || (v.empty() ? false : (v.front() == ' ' || v.back() == ' '));
}

}  // namespace

ReferenceDataset parse_dataset(std::string_view text) {
    auto records = split_records(text);
    if (records.empty()) throw ParseError("missing header row", 1);
    std::vector<std::string> columns = std::move(records.front().fields);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].fields.size() != columns.size())
            throw ParseError("expected " + std::to_string(columns.size()) + " fields, found " +
                                 std::to_string(records[i].fields.size()),
                             records[i].line);
        rows.push_back(std::move(records[i].fields));
    }
    return ReferenceDataset(std::move(columns), std::move(rows));
}

ReferenceDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dataset(ss.str());
}

std::string serialize_dataset(const ReferenceDataset& ds) {
    std::string out;
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out.push_back(',');
            const auto& v = fields[i];
            if (!needs_quotes(v)) {
                out += v;
                continue;
            }
            out.push_back('"');
            for (char c : v) {
                if (c == '"') out.push_back('"');
                out.push_back(c);
            }
            out.push_back('"');
        }
        out.push_back('\n');
    };
    emit(ds.columns());
    for (const auto& row : ds.rows()) emit(row);
    return out;
}

AttributeResult check_attributes(std::string_view text, const ReferenceDataset& ds,
                                 std::span<const std::string> required, MatchMode mode) {
    std::vector<std::size_t> cols;
    for (const auto& name : required) {
        const auto idx = ds.column_index(name);
        if (!idx) throw ParameterError("required column \"" + name + "\" is not in the dataset header");
        cols.push_back(*idx);
    }
    auto present = [&](std::size_t row, std::size_t col) {
        const auto& v = ds.lowered(row, col);
        return !v.empty() && text.find(v) != std::string_view::npos;
    };

    AttributeResult res;
    if (mode == MatchMode::row) {
        std::optional<std::size_t> best_row;
        std::size_t best_count = 0;
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            std::size_t count = 0;
            for (auto c : cols) count += present(r, c) ? 1 : 0;
            if (!best_row || count > best_count) best_row = r, best_count = count;
        }
        for (std::size_t i = 0; i < cols.size(); ++i)
            res.checks.push_back({required[i], best_row ? ds.lowered(*best_row, cols[i]) : std::string{},
                                  best_row && present(*best_row, cols[i])});
        res.passed = best_row && best_count == cols.size();
        if (res.passed) res.matched_row = best_row;
        return res;
    }

    res.passed = ds.row_count() > 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        AttributeCheck check{required[i], ds.row_count() ? ds.lowered(0, cols[i]) : std::string{}, false};
        for (std::size_t r = 0; r < ds.row_count(); ++r)
            if (present(r, cols[i])) {
                check = {required[i], ds.lowered(r, cols[i]), true};
                break;
            }
        res.passed = res.passed && check.found;
        res.checks.push_back(std::move(check));
    }
    return res;
}

}  // namespace veridoc
