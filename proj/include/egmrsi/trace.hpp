#ifndef EGMRSI_TRACE_HPP
#define EGMRSI_TRACE_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "egmrsi/errors.hpp"

namespace egmrsi {

/// One simulation step. Column order is fixed by kTraceColumns.
struct TraceRow {
    std::int64_t t = 0;
    double c = 0, e = 0, n = 0, S = 0;
    double f_base = 0;
    double eps_t = 0;
    double grad_norm_pre = 0, grad_norm_post = 0;
    double i_pred = 0, md = 0, mce = 0, delta_s = 0;
    std::int64_t fired = 0, phase_shift = 0;
    double base_f = 0, spikes = 0, penalty = 0, dg_bonus = 0, baseline_bonus = 0;
    double md_bonus = 0, mce_bonus = 0, external_mixed = 0, total = 0;
    double capability = 0;
    std::int64_t goals_active = 0, goals_noise = 0;
    double toll_l1 = 0;
    std::int64_t in_region = 1;
    // Extra columns beyond the core set.
    double k_max = 0;
    double h_norm = 0;
    double h_step = 0;
    double r_ext = 0;
    std::int64_t update_rule = 0;
    std::int64_t rsi_count = 0;
    std::int64_t viable = 0;
    std::int64_t goal_injected = 0;
    std::int64_t batches_pending = 0;
    std::int64_t promotions = 0;
    std::int64_t gain_ok = -1;  // -1 on non-fired steps

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TraceColumn {
    const char* name;
    double TraceRow::*real;
    std::int64_t TraceRow::*integer;
};

#define EGMRSI_REAL(f) TraceColumn{#f, &TraceRow::f, nullptr}
#define EGMRSI_INT(f) TraceColumn{#f, nullptr, &TraceRow::f}
inline const std::vector<TraceColumn> kTraceColumns = {
    EGMRSI_INT(t),
    EGMRSI_REAL(c), EGMRSI_REAL(e), EGMRSI_REAL(n), EGMRSI_REAL(S),
    EGMRSI_REAL(f_base), EGMRSI_REAL(eps_t),
    EGMRSI_REAL(grad_norm_pre), EGMRSI_REAL(grad_norm_post),
    EGMRSI_REAL(i_pred), EGMRSI_REAL(md), EGMRSI_REAL(mce), EGMRSI_REAL(delta_s),
    EGMRSI_INT(fired), EGMRSI_INT(phase_shift),
    EGMRSI_REAL(base_f), EGMRSI_REAL(spikes), EGMRSI_REAL(penalty), EGMRSI_REAL(dg_bonus),
    EGMRSI_REAL(baseline_bonus), EGMRSI_REAL(md_bonus), EGMRSI_REAL(mce_bonus),
    EGMRSI_REAL(external_mixed), EGMRSI_REAL(total),
    EGMRSI_REAL(capability),
    EGMRSI_INT(goals_active), EGMRSI_INT(goals_noise),
    EGMRSI_REAL(toll_l1), EGMRSI_INT(in_region),
    EGMRSI_REAL(k_max), EGMRSI_REAL(h_norm), EGMRSI_REAL(h_step), EGMRSI_REAL(r_ext),
    EGMRSI_INT(update_rule), EGMRSI_INT(rsi_count), EGMRSI_INT(viable),
    EGMRSI_INT(goal_injected), EGMRSI_INT(batches_pending), EGMRSI_INT(promotions),
    EGMRSI_INT(gain_ok),
};
#undef EGMRSI_REAL
#undef EGMRSI_INT

/// 9 significant digits.
inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

/// Round-trip precision; for summary values that must match a re-summed trace.
inline std::string format_exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// The value a reader of the trace sees after 9-digit serialization.
inline double serialized(double x) {
    const std::string s = format_real(x);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline std::string trace_header() {
    std::string out;
    for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
        if (i) out += ',';
        out += kTraceColumns[i].name;
    }
    return out;
}

inline std::string format_row(const TraceRow& r) {
    std::string out;
    for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
        if (i) out += ',';
        const TraceColumn& col = kTraceColumns[i];
        out += col.real ? format_real(r.*col.real) : std::to_string(r.*col.integer);
    }
    return out;
}

inline void write_trace(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << trace_header() << '\n';
    for (const TraceRow& r : rows) os << format_row(r) << '\n';
}

inline void write_trace_file(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open trace file for writing: " + path);
    write_trace(os, rows);
    if (!os) throw Error("failed writing trace file: " + path);
}

namespace detail {

inline double parse_real(std::string_view s, std::size_t line, const char* col) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError("column '" + std::string(col) + "': not a number: '" + std::string(s) + "'", line);
    }
    return x;
}

inline std::int64_t parse_int(std::string_view s, std::size_t line, const char* col) {
    std::int64_t x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ParseError("column '" + std::string(col) + "': not an integer: '" + std::string(s) + "'", line);
    }
    return x;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace detail

/// Parses a trace; the header must match the fixed column order exactly.
inline std::vector<TraceRow> read_trace(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("missing header row", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != trace_header()) throw ParseError("header does not match the trace schema", 1);
    std::vector<TraceRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != kTraceColumns.size()) {
            throw ParseError("expected " + std::to_string(kTraceColumns.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        }
        TraceRow r;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const TraceColumn& col = kTraceColumns[i];
            if (col.real) r.*col.real = detail::parse_real(fields[i], lineno, col.name);
            else r.*col.integer = detail::parse_int(fields[i], lineno, col.name);
        }
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<TraceRow> read_trace_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open trace file: " + path);
    return read_trace(is);
}

/// Line-oriented `key = value` report. Insertion order is preserved.
class KeyValueReport {
public:
    void set(const std::string& key, const std::string& value) {
        auto it = index_.find(key);
        if (it == index_.end()) {
            index_[key] = entries_.size();
            entries_.emplace_back(key, value);
        } else {
            entries_[it->second].second = value;
        }
    }
    void set(const std::string& key, double value) { set(key, format_real(value)); }
    void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set_exact(const std::string& key, double value) { set(key, format_exact(value)); }

    bool contains(const std::string& key) const { return index_.contains(key); }

    const std::string& get(const std::string& key) const {
        auto it = index_.find(key);
        if (it == index_.end()) throw Error("report has no key '" + key + "'");
        return entries_[it->second].second;
    }

    double get_real(const std::string& key) const { return detail::parse_real(get(key), 0, key.c_str()); }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    std::string str() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
        return out;
    }

    static KeyValueReport parse(std::istream& is) {
        KeyValueReport r;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const std::size_t eq = line.find(" = ");
            if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
            r.set(line.substr(0, eq), line.substr(eq + 3));
        }
        return r;
    }

    static KeyValueReport read_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw Error("cannot open report file: " + path);
        return parse(is);
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace egmrsi

#endif
