#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace starsql::sqleval {

// Operator tables in the order of the reference script; the integer ids below
// index into them.
inline constexpr const char* kAggOps[] = {"none", "max", "min", "count", "sum", "avg"};
inline constexpr const char* kUnitOps[] = {"none", "-", "+", "*", "/"};
inline constexpr const char* kWhereOps[] = {"not", "between", "=", ">", "<", ">=", "<=", "!=", "in", "like", "is", "exists"};

enum AggId : int { kAggNone = 0, kAggMax, kAggMin, kAggCount, kAggSum, kAggAvg };
enum UnitOpId : int { kUnitNone = 0, kUnitMinus, kUnitPlus, kUnitTimes, kUnitDivide };
enum WhereOpId : int {
    kOpNot = 0, kOpBetween, kOpEq, kOpGt, kOpLt, kOpGe, kOpLe, kOpNe, kOpIn, kOpLike, kOpIs, kOpExists
};

// Owning, nullable, deep-copying pointer with value equality.
template <class T>
class Boxed {
public:
    Boxed() = default;
    Boxed(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Boxed(const Boxed& o) : ptr_(o.ptr_ ? std::make_unique<T>(*o.ptr_) : nullptr) {}
    Boxed(Boxed&&) noexcept = default;
    Boxed& operator=(const Boxed& o) {
        if (this != &o) ptr_ = o.ptr_ ? std::make_unique<T>(*o.ptr_) : nullptr;
        return *this;
    }
    Boxed& operator=(Boxed&&) noexcept = default;

    explicit operator bool() const { return static_cast<bool>(ptr_); }
    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }
    T* get() { return ptr_.get(); }
    const T* get() const { return ptr_.get(); }
    void reset() { ptr_.reset(); }

    friend bool operator==(const Boxed& a, const Boxed& b) {
        if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
        return *a.ptr_ == *b.ptr_;
    }

private:
    std::unique_ptr<T> ptr_;
};

struct ColUnit {
    int agg = kAggNone;
    std::string col_id;  // "__table.column__" or "__all__"
    bool distinct = false;

    bool operator==(const ColUnit&) const = default;
};

struct ValUnit {
    int unit_op = kUnitNone;
    ColUnit col1;
    std::optional<ColUnit> col2;

    bool operator==(const ValUnit&) const = default;
};

// A literal condition operand. `placeholder` literals carry only their type.
struct Literal {
    enum class Kind { number, string };
    Kind kind = Kind::number;
    std::string text;    // token as written; strings keep their quotes
    double number = 0;   // meaningful for Kind::number
    bool placeholder = false;

    friend bool operator==(const Literal& a, const Literal& b) {
        if (a.kind != b.kind || a.placeholder != b.placeholder) return false;
        if (a.placeholder) return true;
        return a.kind == Kind::number ? a.number == b.number : a.text == b.text;
    }
};

struct Query;

// None, literal, column reference or nested query.
using Value = std::variant<std::monostate, Literal, ColUnit, Boxed<Query>>;

struct CondUnit {
    bool not_op = false;
    int op_id = kOpEq;
    ValUnit val_unit;
    Value val1;
    Value val2;

    bool operator==(const CondUnit&) const = default;
};

// units[0] connectors[0] units[1] connectors[1] ... ; a trailing connector is
// possible for truncated input, so connectors.size() may equal units.size().
struct Condition {
    std::vector<CondUnit> units;
    std::vector<std::string> connectors;

    bool empty() const { return units.empty() && connectors.empty(); }
    std::size_t size() const { return units.size() + connectors.size(); }
    bool operator==(const Condition&) const = default;
};

struct TableUnit {
    bool is_sql = false;
    std::string table_id;  // "__table__" when !is_sql
    Boxed<Query> sql;

    bool operator==(const TableUnit&) const = default;
};

struct SelectItem {
    int agg = kAggNone;
    ValUnit val_unit;

    bool operator==(const SelectItem&) const = default;
};

struct OrderBy {
    std::string direction = "asc";  // one direction for the whole clause
    std::vector<ValUnit> units;

    bool operator==(const OrderBy&) const = default;
};

struct Query {
    bool distinct = false;
    std::vector<SelectItem> select;
    std::vector<TableUnit> table_units;
    Condition from_conds;
    Condition where;
    std::vector<ColUnit> group_by;
    Condition having;
    std::optional<OrderBy> order_by;
    bool limit = false;
    Boxed<Query> intersect;
    Boxed<Query> except_;
    Boxed<Query> union_;

    bool operator==(const Query&) const = default;
};

// The normalized form: alias-free column ids, literals reduced to typed placeholders.
using ParsedQuery = Query;

// Replaces every literal (including in nested queries) by its placeholder.
void mask_literals(Query& q);

// Nested-list JSON in the reference script's layout with literals rendered as
// "<number>" / "<string>" and limit as a presence flag.
nlohmann::json to_json(const Query& q);

}  // namespace starsql::sqleval
