#!/usr/bin/env python3
"""Writes the fixture programs and the benchmark manifests.

Each program is a defective unit, its fixed version and a test driver (plus a
caller unit for indirect instances). Line numbers in the manifests (fault
lines, critic anchors, implicated lines) are looked up from marker substrings
so the sources can be edited freely. Run from any directory; output goes next
to this script and to ../manifests.
"""
import json
import os
import textwrap

HERE = os.path.dirname(os.path.abspath(__file__))
MANIFESTS = os.path.join(HERE, "..", "manifests")

HEADER = '#include <stdexcept>\n#include <string>\n#include <vector>\n\n#include "rt.hpp"\n\n'


def src(body):
    return HEADER + textwrap.dedent(body).lstrip("\n")


def line_of(text, marker):
    hits = [i + 1 for i, l in enumerate(text.split("\n")) if marker in l]
    if len(hits) != 1:
        raise SystemExit(f"marker {marker!r} matched {len(hits)} lines")
    return hits[0]


def driver(protos, tests):
    body = HEADER + "\n".join(protos) + "\n\n"
    for name, check in tests:
        body += f"static void {name}() {{ {check}; }}\n"
    body += "\nint main(int argc, char** argv) {\n  return rt::run({"
    body += ", ".join(f'{{"{n}", {n}}}' for n, _ in tests)
    body += "}, argc, argv);\n}\n"
    return body


# kind: "exception" or "silent". `fault` marks the faulty line in the
# defective unit; `fix` maps defective line text to fixed text.
DIRECT = [
    dict(
        id="window_sum", kind="exception",
        unit="""
        int sum_window(const std::vector<int>& v, int start, int k) {
          int total = 0;
          int end = start + k;
          for (int i = start; i <= end; ++i) {
            if (i >= static_cast<int>(v.size())) {
              RT_THROW(std::out_of_range, "index " + std::to_string(i) + " past " + std::to_string(v.size()));
            }
            total += v[i];
          }
          return total;
        }
        """,
        fault="int end = start + k;", fix={"int end = start + k;": "int end = start + k - 1;"},
        protos=["int sum_window(const std::vector<int>& v, int start, int k);"],
        failing=[("t_tail", "RT_CHECK_EQ(sum_window({1, 2, 3, 4}, 2, 2), 7)")],
        regression=[("t_head", "RT_CHECK_EQ(sum_window({1, 2, 3, 4}, 0, 2), 3)")],
        key="end", key_at="int end = start + k;",
    ),
    dict(
        id="parse_port", kind="exception",
        unit="""
        int parse_port(const std::string& addr) {
          auto colon = addr.find(':');
          if (colon == std::string::npos) {
            RT_THROW(std::invalid_argument, "no port in " + addr);
          }
          std::string digits = addr.substr(colon);
          int port = 0;
          for (char c : digits) {
            if (c < '0' || c > '9') {
              RT_THROW(std::invalid_argument, std::string("bad digit ") + c);
            }
            port = port * 10 + (c - '0');
          }
          return port;
        }
        """,
        fault="addr.substr(colon);", fix={"addr.substr(colon);": "addr.substr(colon + 1);"},
        protos=["int parse_port(const std::string& addr);"],
        failing=[("t_port", 'RT_CHECK_EQ(parse_port("db:5432"), 5432)')],
        regression=[("t_short", 'RT_CHECK_EQ(parse_port("h:7"), 7)')],
        key="digits", key_at="addr.substr(colon);",
    ),
    dict(
        id="ring_next", kind="exception",
        unit="""
        struct Ring {
          std::vector<int> slots;
          int head = 0;
        };

        int advance(Ring& r, int steps) {
          int cap = static_cast<int>(r.slots.size());
          int next = r.head + steps;
          if (next >= cap) {
            RT_THROW(std::out_of_range, "slot " + std::to_string(next) + " of " + std::to_string(cap));
          }
          r.head = next;
          return r.slots[next];
        }
        """,
        fault="int next = r.head + steps;", fix={"int next = r.head + steps;": "int next = (r.head + steps) % cap;"},
        protos=["struct Ring {\n  std::vector<int> slots;\n  int head = 0;\n};", "int advance(Ring& r, int steps);"],
        failing=[("t_wrap", "Ring r{{10, 20, 30}, 2}; RT_CHECK_EQ(advance(r, 2), 20)")],
        regression=[("t_plain", "Ring r{{10, 20, 30}, 0}; RT_CHECK_EQ(advance(r, 1), 20)")],
        key="next", key_at="int next = r.head + steps;",
    ),
    dict(
        id="matrix_get", kind="exception",
        unit="""
        struct Matrix {
          int rows = 0;
          int cols = 0;
          std::vector<int> cells;
        };

        int cell(const Matrix& m, int r, int c) {
          int idx = r * m.rows + c;
          if (idx >= static_cast<int>(m.cells.size())) {
            RT_THROW(std::out_of_range, "cell " + std::to_string(idx));
          }
          return m.cells[idx];
        }
        """,
        fault="int idx = r * m.rows + c;", fix={"int idx = r * m.rows + c;": "int idx = r * m.cols + c;"},
        protos=["struct Matrix {\n  int rows = 0;\n  int cols = 0;\n  std::vector<int> cells;\n};",
                "int cell(const Matrix& m, int r, int c);"],
        failing=[("t_last", "Matrix m{4, 2, {0, 1, 2, 3, 4, 5, 6, 7}}; RT_CHECK_EQ(cell(m, 3, 1), 7)")],
        regression=[("t_first", "Matrix m{4, 2, {0, 1, 2, 3, 4, 5, 6, 7}}; RT_CHECK_EQ(cell(m, 0, 1), 1)")],
        key=None,
    ),
    dict(
        id="split_shares", kind="exception",
        unit="""
        int share(int total, int people, int guests) {
          int payers = people - guests - 1;
          if (payers <= 0) {
            RT_THROW(std::domain_error, "nobody pays for " + std::to_string(total));
          }
          int each = total / payers;
          return each;
        }
        """,
        fault="int payers = people - guests - 1;",
        fix={"int payers = people - guests - 1;": "int payers = people - guests;"},
        protos=["int share(int total, int people, int guests);"],
        failing=[("t_one_payer", "RT_CHECK_EQ(share(90, 2, 1), 90)")],
        regression=[("t_even", "RT_CHECK_EQ(share(90, 3, 0), 30)")],
        key="payers", key_at="int payers = people - guests - 1;",
    ),
    dict(
        id="stack_peek", kind="exception",
        unit="""
        int peek(const std::vector<int>& items) {
          int top = static_cast<int>(items.size());
          if (top >= static_cast<int>(items.size())) {
            RT_THROW(std::out_of_range, "top " + std::to_string(top));
          }
          return items[top];
        }
        """,
        fault="int top = static_cast<int>(items.size());",
        fix={"int top = static_cast<int>(items.size());": "int top = static_cast<int>(items.size()) - 1;"},
        protos=["int peek(const std::vector<int>& items);"],
        failing=[("t_peek", "RT_CHECK_EQ(peek({4, 5, 6}), 6)")],
        regression=[],
        key=None,
    ),
    dict(
        id="histogram", kind="exception",
        unit="""
        std::vector<int> histogram(const std::vector<int>& values, int lo, int hi, int buckets) {
          std::vector<int> counts(buckets, 0);
          int width = (hi - lo) / buckets;
          for (int v : values) {
            int b = (v - lo) / width;
            if (b >= buckets) {
              RT_THROW(std::out_of_range, "bucket " + std::to_string(b) + " for " + std::to_string(v));
            }
            counts[b] += 1;
          }
          return counts;
        }
        """,
        fault="int width = (hi - lo) / buckets;",
        fix={"int width = (hi - lo) / buckets;": "int width = (hi - lo + buckets) / buckets;"},
        protos=["std::vector<int> histogram(const std::vector<int>& values, int lo, int hi, int buckets);"],
        failing=[("t_edge", "RT_CHECK_EQ(histogram({0, 5, 9}, 0, 9, 3), std::vector<int>({1, 1, 1}))")],
        regression=[],
        key="width", key_at="int width = (hi - lo) / buckets;",
    ),
    dict(
        id="month_days", kind="exception",
        unit="""
        int days_in(int month, bool leap) {
          static const int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
          int idx = month;
          if (idx < 0 || idx > 11) {
            RT_THROW(std::out_of_range, "month index " + std::to_string(idx));
          }
          int days = kDays[idx];
          if (leap && idx == 1) days += 1;
          return days;
        }
        """,
        fault="int idx = month;", fix={"int idx = month;": "int idx = month - 1;"},
        protos=["int days_in(int month, bool leap);"],
        failing=[("t_december", "RT_CHECK_EQ(days_in(12, false), 31)")],
        regression=[("t_january", "RT_CHECK_EQ(days_in(1, false), 31)")],
        key="idx", key_at="int idx = month;",
    ),
    dict(
        id="ratio_helper", kind="exception",
        # the throw sits in a helper, not in the faulty method
        unit="""
        int checked_div(int num, int den) {
          if (den == 0) {
            RT_THROW(std::domain_error, "division by zero");
          }
          return num / den;
        }

        int hit_ratio(int hits, int misses) {
          int lookups = hits - misses;
          int pct = checked_div(hits * 100, lookups);
          return pct;
        }
        """,
        fault="int lookups = hits - misses;", fix={"int lookups = hits - misses;": "int lookups = hits + misses;"},
        protos=["int hit_ratio(int hits, int misses);"],
        failing=[("t_even", "RT_CHECK_EQ(hit_ratio(5, 5), 50)")],
        regression=[],
        key=None,
    ),
    dict(
        id="token_field", kind="exception",
        unit="""
        std::string field(const std::string& line, char sep, int n) {
          std::size_t start = 0;
          for (int i = 0; i < n; ++i) {
            std::size_t pos = line.find(sep, start);
            if (pos == std::string::npos) {
              RT_THROW(std::out_of_range, "field " + std::to_string(n) + " missing");
            }
            start = pos + 2;
          }
          if (start >= line.size()) {
            RT_THROW(std::out_of_range, "field " + std::to_string(n) + " starts past the end");
          }
          std::size_t end = line.find(sep, start);
          return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
        }
        """,
        fault="start = pos + 2;", fix={"start = pos + 2;": "start = pos + 1;"},
        protos=["std::string field(const std::string& line, char sep, int n);"],
        failing=[("t_third", 'RT_CHECK_EQ(field("a,b,c", \',\', 2), std::string("c"))')],
        regression=[("t_first", 'RT_CHECK_EQ(field("a,b,c", \',\', 0), std::string("a"))')],
        key="start", key_at="start = pos + 2;",
    ),
    # ---------------------------------------------------------------- silent
    dict(
        id="average_rating", kind="silent",
        unit="""
        double average(const std::vector<int>& ratings) {
          int sum = 0;
          for (int r : ratings) sum += r;
          int count = static_cast<int>(ratings.size()) - 1;
          if (count <= 0) return 0.0;
          return static_cast<double>(sum) / count;
        }
        """,
        fault="int count = static_cast<int>(ratings.size()) - 1;",
        fix={"int count = static_cast<int>(ratings.size()) - 1;": "int count = static_cast<int>(ratings.size());"},
        protos=["double average(const std::vector<int>& ratings);"],
        failing=[("t_avg", "RT_CHECK_EQ(average({4, 5, 3, 4}), 4.0)")],
        regression=[("t_empty", "RT_CHECK_EQ(average({}), 0.0)")],
        key="count", key_at="int count = static_cast<int>(ratings.size()) - 1;",
        expect=("count", "==", 4),
    ),
    dict(
        id="tier_discount", kind="silent",
        unit="""
        int discounted(int price, int tier) {
          if (tier <= 0) {
            return price;
          }
          int pct = tier * 50;
          int off = price * pct / 100;
          return price - off;
        }
        """,
        fault="int pct = tier * 50;", fix={"int pct = tier * 50;": "int pct = tier * 5;"},
        protos=["int discounted(int price, int tier);"],
        failing=[("t_tier1", "RT_CHECK_EQ(discounted(200, 1), 190)")],
        regression=[("t_none", "RT_CHECK_EQ(discounted(200, 0), 200)")],
        key="pct", key_at="int pct = tier * 50;",
        expect=("pct", "<=", 30),
    ),
    dict(
        id="fahrenheit", kind="silent",
        unit="""
        int to_fahrenheit(int celsius) {
          int scaled = celsius * 9 / 5;
          int offset = 23;
          return scaled + offset;
        }
        """,
        fault="int offset = 23;", fix={"int offset = 23;": "int offset = 32;"},
        protos=["int to_fahrenheit(int celsius);"],
        failing=[("t_boil", "RT_CHECK_EQ(to_fahrenheit(100), 212)")],
        regression=[],
        key="offset", key_at="int offset = 23;",
        expect=("offset", "==", 32),
    ),
    dict(
        id="clamp_range", kind="silent",
        unit="""
        int clamp_to(int v, int lo, int hi) {
          int lower = std::min(lo, hi);
          int upper = std::min(lo, hi);
          if (v < lower) return lower;
          if (v > upper) return upper;
          return v;
        }
        """,
        fault="int upper = std::min(lo, hi);", fix={"int upper = std::min(lo, hi);": "int upper = std::max(lo, hi);"},
        protos=["int clamp_to(int v, int lo, int hi);"],
        failing=[("t_inside", "RT_CHECK_EQ(clamp_to(5, 0, 10), 5)")],
        regression=[("t_below", "RT_CHECK_EQ(clamp_to(-3, 0, 10), 0)")],
        key="upper", key_at="int upper = std::min(lo, hi);",
        expect=("upper", "==", 10),
        includes="#include <algorithm>\n",
    ),
    dict(
        id="median_index", kind="silent",
        unit="""
        int median(const std::vector<int>& sorted) {
          int n = static_cast<int>(sorted.size());
          if (n == 0) {
            return 0;
          }
          int mid = n / 2 + 1;
          if (mid >= n) mid = n - 1;
          return sorted[mid];
        }
        """,
        fault="int mid = n / 2 + 1;", fix={"int mid = n / 2 + 1;": "int mid = n / 2;"},
        protos=["int median(const std::vector<int>& sorted);"],
        failing=[("t_odd", "RT_CHECK_EQ(median({1, 3, 5, 7, 9}), 5)")],
        regression=[("t_empty", "RT_CHECK_EQ(median({}), 0)")],
        key="mid", key_at="int mid = n / 2 + 1;",
        expect=("mid", "==", 2),
    ),
    dict(
        id="loan_months", kind="silent",
        unit="""
        int total_interest(int principal, int rate_pct, int years) {
          int months = years * 10;
          int monthly = principal * rate_pct / 1200;
          return monthly * months;
        }
        """,
        fault="int months = years * 10;", fix={"int months = years * 10;": "int months = years * 12;"},
        protos=["int total_interest(int principal, int rate_pct, int years);"],
        failing=[("t_two_years", "RT_CHECK_EQ(total_interest(12000, 6, 2), 1440)")],
        regression=[],
        key="months", key_at="int months = years * 10;",
        expect=("months", "==", 24),
    ),
    dict(
        id="percent_of", kind="silent",
        unit="""
        int percent(int part, int whole) {
          if (whole == 0) {
            return 0;
          }
          int scaled = part * 10;
          return scaled / whole;
        }
        """,
        fault="int scaled = part * 10;", fix={"int scaled = part * 10;": "int scaled = part * 100;"},
        protos=["int percent(int part, int whole);"],
        failing=[("t_quarter", "RT_CHECK_EQ(percent(1, 4), 25)")],
        regression=[("t_zero", "RT_CHECK_EQ(percent(3, 0), 0)")],
        key="scaled", key_at="int scaled = part * 10;",
        expect=("scaled", "==", 100),
    ),
    dict(
        id="page_count", kind="silent",
        unit="""
        int pages(int items, int per_page) {
          if (per_page <= 0) {
            return 0;
          }
          int full = items / per_page;
          int partial = 0;
          return full + partial;
        }
        """,
        fault="int partial = 0;", fix={"int partial = 0;": "int partial = items % per_page ? 1 : 0;"},
        protos=["int pages(int items, int per_page);"],
        failing=[("t_ragged", "RT_CHECK_EQ(pages(25, 10), 3)")],
        regression=[("t_exact", "RT_CHECK_EQ(pages(20, 10), 2)")],
        key="partial", key_at="int partial = 0;",
        expect=("partial", "==", 1),
    ),
    dict(
        id="bonus_threshold", kind="silent",
        unit="""
        int bonus(int sales, int target) {
          int threshold = target * 2;
          if (sales < threshold) {
            return 0;
          }
          return (sales - threshold) / 10;
        }
        """,
        fault="int threshold = target * 2;", fix={"int threshold = target * 2;": "int threshold = target;"},
        protos=["int bonus(int sales, int target);"],
        failing=[("t_over", "RT_CHECK_EQ(bonus(150, 100), 5)")],
        regression=[("t_under", "RT_CHECK_EQ(bonus(50, 100), 0)")],
        key="threshold", key_at="int threshold = target * 2;",
        expect=("threshold", "<=", 100),
    ),
    dict(
        id="grade_cutoff", kind="silent",
        unit="""
        char grade(int score) {
          int a_cutoff = 80;
          int b_cutoff = 70;
          if (score >= a_cutoff) return 'A';
          if (score >= b_cutoff) return 'B';
          return 'C';
        }
        """,
        fault="int a_cutoff = 80;", fix={"int a_cutoff = 80;": "int a_cutoff = 90;"},
        protos=["char grade(int score);"],
        failing=[("t_b_range", "RT_CHECK_EQ(grade(85), 'B')")],
        regression=[("t_c_range", "RT_CHECK_EQ(grade(50), 'C')")],
        key="a_cutoff", key_at="int a_cutoff = 80;",
        expect=("a_cutoff", ">=", 90),
    ),
]

INDIRECT = [
    dict(
        id="trip_speed", kind="exception",
        unit="""
        int speed_kmh(int meters, int seconds) {
          int hours_x100 = seconds / 3600;
          if (hours_x100 == 0) {
            RT_THROW(std::domain_error, "zero duration for " + std::to_string(meters) + " m");
          }
          return meters / 10 / hours_x100;
        }
        """,
        fault="int hours_x100 = seconds / 3600;",
        fix={"int hours_x100 = seconds / 3600;": "int hours_x100 = seconds / 36;"},
        caller="""
        int speed_kmh(int meters, int seconds);

        std::string trip_summary(int meters, int seconds) {
          int kmh = speed_kmh(meters, seconds);
          std::string label = kmh > 100 ? "fast" : "steady";
          return label + " " + std::to_string(kmh);
        }
        """,
        protos=["std::string trip_summary(int meters, int seconds);"],
        failing=[("t_short_trip", 'RT_CHECK_EQ(trip_summary(30000, 1800), std::string("steady 60"))')],
        regression=[("t_hour", 'RT_CHECK_EQ(trip_summary(50000, 3600), std::string("steady 50"))')],
        key=None,
    ),
    dict(
        id="shipping_fee", kind="silent",
        unit="""
        int shipping_fee(int grams) {
          int tier = grams / 1000;
          int fee = 5 + tier * 7;
          if (grams > 5000) {
            fee = 40;
          }
          return fee;
        }
        """,
        fault="int tier = grams / 1000;", fix={"int tier = grams / 1000;": "int tier = (grams + 999) / 1000;"},
        caller="""
        int shipping_fee(int grams);

        int order_total(int item_cents, int grams) {
          int fee = shipping_fee(grams);
          int total = item_cents + fee * 100;
          return total;
        }
        """,
        protos=["int order_total(int item_cents, int grams);"],
        failing=[("t_parcel", "RT_CHECK_EQ(order_total(1000, 1500), 2900)")],
        regression=[],
        key="fee", key_at="int fee = shipping_fee(grams);",
        expect=("fee", "==", 19),
    ),
    dict(
        id="cart_tax", kind="silent",
        unit="""
        int tax_cents(int subtotal_cents, int rate_pct) {
          int tax = subtotal_cents * rate_pct / 1000;
          return tax;
        }
        """,
        fault="int tax = subtotal_cents * rate_pct / 1000;",
        fix={"int tax = subtotal_cents * rate_pct / 1000;": "int tax = subtotal_cents * rate_pct / 100;"},
        caller="""
        int tax_cents(int subtotal_cents, int rate_pct);

        int checkout(const std::vector<int>& prices, int rate_pct) {
          int subtotal = 0;
          for (int p : prices) subtotal += p;
          int tax = tax_cents(subtotal, rate_pct);
          return subtotal + tax;
        }
        """,
        protos=["int checkout(const std::vector<int>& prices, int rate_pct);"],
        failing=[("t_cart", "RT_CHECK_EQ(checkout({1000, 1000}, 10), 2200)")],
        regression=[],
        key="tax", key_at="int tax = tax_cents(subtotal, rate_pct);",
        expect=("tax", ">=", 200),
    ),
    dict(
        id="queue_slot", kind="exception",
        unit="""
        int slot_for(int ticket, int lanes) {
          int lane = ticket % (lanes + 1);
          if (lane >= lanes) {
            RT_THROW(std::out_of_range, "lane " + std::to_string(lane) + " of " + std::to_string(lanes));
          }
          return lane;
        }
        """,
        fault="int lane = ticket % (lanes + 1);",
        fix={"int lane = ticket % (lanes + 1);": "int lane = ticket % lanes;"},
        caller="""
        int slot_for(int ticket, int lanes);

        std::vector<int> assign(int first, int count, int lanes) {
          std::vector<int> out;
          for (int t = first; t < first + count; ++t) {
            int lane = slot_for(t, lanes);
            out.push_back(lane);
          }
          return out;
        }
        """,
        protos=["std::vector<int> assign(int first, int count, int lanes);"],
        failing=[("t_wrap", "RT_CHECK_EQ(assign(2, 3, 3), std::vector<int>({2, 0, 1}))")],
        regression=[],
        key=None,
    ),
]


def write(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(text)


def emit_program(p, indirect):
    d = os.path.join(HERE, p["id"])
    unit = src(p["unit"])
    if p.get("includes"):
        unit = p["includes"] + unit
    fixed = unit
    for old, new in p["fix"].items():
        assert fixed.count(old) == 1, (p["id"], old)
        fixed = fixed.replace(old, new)
    unit_name = p["id"] + ".cpp"
    write(os.path.join(d, unit_name), unit)
    write(os.path.join(d, "fixed.cpp"), fixed)
    tests = p["failing"] + p["regression"]
    write(os.path.join(d, "driver.cpp"), driver(p["protos"], tests))
    caller_name = None
    caller = None
    if indirect:
        caller_name = p["id"] + "_caller.cpp"
        caller = src(p["caller"])
        write(os.path.join(d, caller_name), caller)

    entry = {
        "instance_id": p["id"],
        "mode": "indirect" if indirect else "direct",
        "kind": p["kind"],
        "paths": {
            "defective": f"../corpus/{p['id']}/{unit_name}",
            "fixed": f"../corpus/{p['id']}/fixed.cpp",
            "support": [f"../corpus/{p['id']}/driver.cpp"],
        },
        "failing_tests": [n for n, _ in p["failing"]],
        "regression_tests": [n for n, _ in p["regression"]],
        "fault_lines": [{"file": unit_name, "line": line_of(unit, p["fault"])}],
    }
    if indirect:
        entry["paths"]["callers"] = [f"../corpus/{p['id']}/{caller_name}"]
    stub = {}
    if p.get("key"):
        where = caller if indirect else unit
        stub["key_variable"] = p["key"]
        stub["key_anchor"] = line_of(where, p["key_at"])
        stub["key_position"] = "after"
    if p.get("expect"):
        var, op, value = p["expect"]
        stub["expectation"] = {"variable": var, "op": op, "value": value}
        stub["implicates"] = {"file": unit_name, "line": line_of(unit, p["fault"])}
    entry["stub"] = stub
    return entry


def manifest(name, entries, note):
    return {"name": name, "description": note, "toolchain": "../runtime/toolchain.json", "instances": entries}


def main():
    direct = {p["id"]: emit_program(p, False) for p in DIRECT}
    indirect = [emit_program(p, True) for p in INDIRECT]

    convergent_ids = ["window_sum", "parse_port", "ring_next", "split_shares", "month_days",
                      "average_rating", "tier_discount", "fahrenheit", "clamp_range", "loan_months"]
    convergent = [direct[i] for i in convergent_ids]

    ablation = []
    for n, p in enumerate(DIRECT):
        e = json.loads(json.dumps(direct[p["id"]]))
        if n % 2 == 0:
            e["stub"]["inject_fault"] = "undeclared" if n % 4 == 0 else "unreachable"
        ablation.append(e)

    os.makedirs(MANIFESTS, exist_ok=True)
    out = {
        "convergent.json": manifest("convergent", convergent,
                                    "ten direct instances on which the rule stubs converge"),
        "ablation.json": manifest("ablation", ablation,
                                  "twenty direct instances; every other generation carries an uncompilable statement"),
        "indirect.json": manifest("indirect", indirect, "caller-only instances; the defective unit is hidden"),
    }
    for name, m in out.items():
        with open(os.path.join(MANIFESTS, name), "w") as f:
            json.dump(m, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
