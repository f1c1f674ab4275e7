#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace starsql::sqleval {

struct Blob {
    std::string bytes;
    bool operator==(const Blob&) const = default;
};

// NULL, INTEGER, REAL, TEXT, BLOB.
using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;
using Row = std::vector<SqlValue>;

enum class ExecStatus { ok, sql_error, timeout, rejected_write };

std::string to_string(ExecStatus s);

struct ExecResult {
    ExecStatus status = ExecStatus::sql_error;
    std::vector<Row> rows;
    std::size_t width = 0;
    std::string error;
    std::chrono::milliseconds elapsed{0};

    bool ok() const { return status == ExecStatus::ok; }
};

struct ExecOptions {
    std::chrono::milliseconds timeout{30000};
};

// Runs one read-only statement against the database file. Never throws for
// SQL problems; those are reported through the status. Throws
// DatabaseUnavailable when the file cannot be opened.
ExecResult execute_query(const std::filesystem::path& db_path, const std::string& sql, const ExecOptions& opts = {});

// Stable text rendering of one value, used for fingerprints and logs.
std::string render_value(const SqlValue& v);

}  // namespace starsql::sqleval
