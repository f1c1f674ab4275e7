#include "starsql/sqleval/executor.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>

#include <sqlite3.h>

#include "starsql/sqleval/errors.hpp"

namespace starsql::sqleval {

std::string to_string(ExecStatus s) {
    switch (s) {
        case ExecStatus::ok: return "ok";
        case ExecStatus::sql_error: return "sql_error";
        case ExecStatus::timeout: return "timeout";
        case ExecStatus::rejected_write: return "rejected_write";
    }
    return "sql_error";
}

namespace {

using Clock = std::chrono::steady_clock;

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using DbPtr = std::unique_ptr<sqlite3, DbCloser>;
using StmtPtr = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

struct Guard {
    Clock::time_point deadline;
    bool timed_out = false;
    bool denied = false;
};

int progress(void* arg) {
    auto* g = static_cast<Guard*>(arg);
    if (Clock::now() >= g->deadline) {
        g->timed_out = true;
        return 1;
    }
    return 0;
}

int authorize(void* arg, int action, const char*, const char*, const char*, const char*) {
    auto* g = static_cast<Guard*>(arg);
    switch (action) {
        case SQLITE_ATTACH:
        case SQLITE_PRAGMA:
        case SQLITE_DETACH:
        case SQLITE_INSERT:
        case SQLITE_UPDATE:
        case SQLITE_DELETE:
        case SQLITE_CREATE_TABLE:
        case SQLITE_CREATE_INDEX:
        case SQLITE_CREATE_VIEW:
        case SQLITE_CREATE_TRIGGER:
        case SQLITE_DROP_TABLE:
        case SQLITE_DROP_INDEX:
        case SQLITE_DROP_VIEW:
        case SQLITE_DROP_TRIGGER:
        case SQLITE_ALTER_TABLE:
        case SQLITE_REINDEX:
        case SQLITE_CREATE_VTABLE:
        case SQLITE_DROP_VTABLE:
            g->denied = true;
            return SQLITE_DENY;
        default:
            return SQLITE_OK;
    }
}

SqlValue column_value(sqlite3_stmt* stmt, int i) {
    switch (sqlite3_column_type(stmt, i)) {
        case SQLITE_INTEGER: return static_cast<std::int64_t>(sqlite3_column_int64(stmt, i));
        case SQLITE_FLOAT: return sqlite3_column_double(stmt, i);
        case SQLITE_TEXT: {
            const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt, i));
            return std::string(p ? p : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt, i)));
        }
        case SQLITE_BLOB: {
            const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt, i));
            return Blob{std::string(p ? p : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt, i)))};
        }
        default: return std::monostate{};
    }
}

bool only_trivia(const char* tail) {
    // Whitespace and comments after the last statement are fine.
    const char* p = tail;
    while (*p) {
        if (std::isspace(static_cast<unsigned char>(*p)) || *p == ';') {
            ++p;
        } else if (p[0] == '-' && p[1] == '-') {
            while (*p && *p != '\n') ++p;
        } else if (p[0] == '/' && p[1] == '*') {
            p += 2;
            while (*p && !(p[0] == '*' && p[1] == '/')) ++p;
            if (*p) p += 2;
        } else {
            return false;
        }
    }
    return true;
}

}  // namespace

ExecResult execute_query(const std::filesystem::path& db_path, const std::string& sql, const ExecOptions& opts) {
    const auto start = Clock::now();
    ExecResult res;
    auto finish = [&](ExecStatus st, std::string err) {
        res.status = st;
        res.error = std::move(err);
        res.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
        if (st != ExecStatus::ok) {
            res.rows.clear();
            res.width = 0;
        }
        return res;
    };

    if (!std::filesystem::exists(db_path)) throw DatabaseUnavailable("database not found: " + db_path.string());
    sqlite3* raw = nullptr;
    int rc = sqlite3_open_v2(db_path.c_str(), &raw, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr);
    DbPtr db(raw);
    if (rc != SQLITE_OK) {
        throw DatabaseUnavailable("cannot open " + db_path.string() + ": " +
                                  (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)));
    }

    Guard guard{start + opts.timeout};
    sqlite3_set_authorizer(db.get(), authorize, &guard);
    sqlite3_progress_handler(db.get(), 1000, progress, &guard);

    // Prepare every statement up front so a trailing write is rejected before
    // anything runs.
    std::vector<StmtPtr> stmts;
    const char* tail = sql.c_str();
    while (tail && *tail && !only_trivia(tail)) {
        sqlite3_stmt* s = nullptr;
        const char* next = nullptr;
        rc = sqlite3_prepare_v2(db.get(), tail, -1, &s, &next);
        if (rc != SQLITE_OK) {
            if (guard.denied) return finish(ExecStatus::rejected_write, "statement not permitted");
            if (guard.timed_out) return finish(ExecStatus::timeout, "timeout");
            return finish(ExecStatus::sql_error, sqlite3_errmsg(db.get()));
        }
        if (s) {
            StmtPtr owned(s);
            if (!sqlite3_stmt_readonly(s)) return finish(ExecStatus::rejected_write, "statement writes");
            stmts.push_back(std::move(owned));
        }
        if (next == tail) break;
        tail = next;
    }
    if (stmts.empty()) return finish(ExecStatus::sql_error, "empty statement");
    if (stmts.size() > 1) return finish(ExecStatus::sql_error, "multiple statements");

    sqlite3_stmt* stmt = stmts.front().get();
    res.width = static_cast<std::size_t>(sqlite3_column_count(stmt));
    while (true) {
        rc = sqlite3_step(stmt);
        if (rc == SQLITE_ROW) {
            Row row;
            row.reserve(res.width);
            for (int i = 0; i < static_cast<int>(res.width); ++i) row.push_back(column_value(stmt, i));
            res.rows.push_back(std::move(row));
        } else if (rc == SQLITE_DONE) {
            break;
        } else {
            if (guard.timed_out || rc == SQLITE_INTERRUPT) return finish(ExecStatus::timeout, "timeout");
            return finish(ExecStatus::sql_error, sqlite3_errmsg(db.get()));
        }
    }
    return finish(ExecStatus::ok, "");
}

std::string render_value(const SqlValue& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "NULL"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.007199254740992e15) {
                return std::to_string(static_cast<std::int64_t>(d));
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.15g", d);
            return buf;
        }
        std::string operator()(const std::string& s) const { return "'" + s + "'"; }
        std::string operator()(const Blob& b) const {
            static const char* hex = "0123456789abcdef";
            std::string out = "x'";
            for (unsigned char c : b.bytes) {
                out.push_back(hex[c >> 4]);
                out.push_back(hex[c & 15]);
            }
            return out + "'";
        }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace starsql::sqleval
