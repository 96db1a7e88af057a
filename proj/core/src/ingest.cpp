#include "forumpaths/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "forumpaths/error.hpp"
#include "forumpaths/rng.hpp"

namespace forumpaths {
namespace {

using nlohmann::json;

constexpr std::string_view kCsvColumns[] = {"forum_id", "post_id", "author_id", "timestamp",
                                            "parent_post_id"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of("\n\r") != std::string_view::npos)
    throw DataError(fmt::format("field contains a line break: '{}'", s));
  if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool parse_integer(std::string_view text, std::int64_t& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end && !text.empty();
}

int digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) throw DataError("truncated date-time");
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') throw DataError("non-digit in date-time");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

void expect_char(std::string_view s, std::size_t pos, std::string_view allowed) {
  if (pos >= s.size() || allowed.find(s[pos]) == std::string_view::npos)
    throw DataError("malformed date-time");
}

Timestamp parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  const int yy = digits(s, 0, 4);
  expect_char(s, 4, "-");
  const int mo = digits(s, 5, 2);
  expect_char(s, 7, "-");
  const int dd = digits(s, 8, 2);
  expect_char(s, 10, "Tt ");
  const int hh = digits(s, 11, 2);
  expect_char(s, 13, ":");
  const int mi = digits(s, 14, 2);
  expect_char(s, 16, ":");
  const int ss = digits(s, 17, 2);
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) throw DataError("empty fractional seconds");
  }
  int offset_seconds = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    const int sign = s[pos] == '-' ? -1 : 1;
    const int oh = digits(s, pos + 1, 2);
    expect_char(s, pos + 3, ":");
    const int om = digits(s, pos + 4, 2);
    if (oh > 23 || om > 59) throw DataError("invalid UTC offset");
    offset_seconds = sign * (oh * 3600 + om * 60);
    pos += 6;
  } else {
    throw DataError("date-time lacks a UTC offset");
  }
  if (pos != s.size()) throw DataError("trailing characters after date-time");

  const year_month_day ymd{year{yy}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(dd)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) throw DataError("date-time out of range");
  const auto days = sys_days{ymd}.time_since_epoch().count();
  // Leap second 60 folds into the next second.
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mi * 60 + ss - offset_seconds;
}

std::optional<std::string> parent_from_text(std::string_view text) {
  if (text.empty()) return std::nullopt;
  return std::string(text);
}

ParseResult parse_csv(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::vector<int> column_of(std::size(kCsvColumns), -1);
  bool have_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;

    std::vector<std::string> fields;
    try {
      fields = split_csv_line(view);
    } catch (const DataError& e) {
      if (!have_header) throw DataError(fmt::format("line {}: bad header: {}", line_no, e.what()));
      result.errors.push_back({line_no, e.what()});
      continue;
    }

    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = trim(fields[i]);
        for (std::size_t c = 0; c < std::size(kCsvColumns); ++c)
          if (name == kCsvColumns[c]) column_of[c] = static_cast<int>(i);
      }
      for (std::size_t c = 0; c < 4; ++c)
        if (column_of[c] < 0)
          throw DataError(fmt::format("CSV header lacks required column '{}'", kCsvColumns[c]));
      have_header = true;
      continue;
    }

    auto field = [&](std::size_t c) -> std::optional<std::string_view> {
      const int idx = column_of[c];
      if (idx < 0 || static_cast<std::size_t>(idx) >= fields.size()) return std::nullopt;
      return trim(fields[static_cast<std::size_t>(idx)]);
    };

    RawEvent ev;
    std::string problem;
    for (std::size_t c = 0; c < 4 && problem.empty(); ++c) {
      auto v = field(c);
      if (!v || v->empty()) problem = fmt::format("missing required field '{}'", kCsvColumns[c]);
    }
    if (problem.empty()) {
      ev.forum_id = std::string(*field(0));
      ev.post_id = std::string(*field(1));
      ev.author_id = std::string(*field(2));
      try {
        ev.timestamp = parse_timestamp(*field(3));
      } catch (const DataError& e) {
        problem = fmt::format("unparseable timestamp '{}': {}", *field(3), e.what());
      }
      if (auto parent = field(4)) ev.parent_post_id = parent_from_text(*parent);
    }
    if (!problem.empty()) {
      result.errors.push_back({line_no, std::move(problem)});
      continue;
    }
    result.events.push_back(std::move(ev));
  }
  if (!have_header && line_no > 0) throw DataError("CSV input has no header row");
  return result;
}

const json* find_key(const json& obj, std::string_view primary, std::string_view alias) {
  if (auto it = obj.find(primary); it != obj.end()) return &*it;
  if (auto it = obj.find(alias); it != obj.end()) return &*it;
  return nullptr;
}

ParseResult parse_jsonl(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      result.errors.push_back({line_no, fmt::format("invalid JSON: {}", e.what())});
      continue;
    }
    if (!obj.is_object()) {
      result.errors.push_back({line_no, "row is not a JSON object"});
      continue;
    }

    RawEvent ev;
    std::string problem;
    auto required_string = [&](std::string_view key, std::string_view alias, std::string& dst) {
      if (!problem.empty()) return;
      const json* v = find_key(obj, key, alias);
      if (!v || v->is_null() || (v->is_string() && v->get_ref<const std::string&>().empty())) {
        problem = fmt::format("missing required field '{}'", key);
      } else if (!v->is_string()) {
        problem = fmt::format("field '{}' must be a string", key);
      } else {
        dst = v->get<std::string>();
      }
    };
    required_string("forum_id", "forum", ev.forum_id);
    required_string("post_id", "post", ev.post_id);
    required_string("author_id", "author", ev.author_id);
    if (problem.empty()) {
      const json* ts = find_key(obj, "timestamp", "ts");
      if (!ts || ts->is_null()) {
        problem = "missing required field 'timestamp'";
      } else if (ts->is_number_integer()) {
        ev.timestamp = ts->get<Timestamp>();
      } else if (ts->is_string()) {
        try {
          ev.timestamp = parse_timestamp(ts->get_ref<const std::string&>());
        } catch (const DataError& e) {
          problem = fmt::format("unparseable timestamp: {}", e.what());
        }
      } else {
        problem = "unparseable timestamp: expected integer seconds or RFC 3339 string";
      }
    }
    if (problem.empty()) {
      if (const json* parent = find_key(obj, "parent_post_id", "parent"); parent && !parent->is_null()) {
        if (!parent->is_string())
          problem = "field 'parent_post_id' must be a string or null";
        else
          ev.parent_post_id = parent_from_text(parent->get_ref<const std::string&>());
      }
    }
    if (!problem.empty()) {
      result.errors.push_back({line_no, std::move(problem)});
      continue;
    }
    result.events.push_back(std::move(ev));
  }
  return result;
}

}  // namespace

LogFormat parse_log_format(std::string_view name) {
  if (name == "csv") return LogFormat::csv;
  if (name == "jsonl") return LogFormat::jsonl;
  throw std::invalid_argument(fmt::format("unknown event log format '{}'", name));
}

std::string_view to_string(LogFormat format) {
  return format == LogFormat::csv ? "csv" : "jsonl";
}

ValidationPolicy parse_validation_policy(std::string_view name) {
  if (name == "strict") return ValidationPolicy::strict;
  if (name == "lenient") return ValidationPolicy::lenient;
  throw std::invalid_argument(fmt::format("unknown validation policy '{}'", name));
}

Timestamp parse_timestamp(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  if (parse_integer(text, value)) return value;
  if (text.size() >= 20 && text[4] == '-') return parse_rfc3339(text);
  throw DataError(fmt::format("'{}' is neither epoch seconds nor RFC 3339", text));
}

ParseResult parse_event_log(std::istream& in, LogFormat format) {
  switch (format) {
    case LogFormat::csv:
      return parse_csv(in);
    case LogFormat::jsonl:
      return parse_jsonl(in);
  }
  throw std::invalid_argument("unknown event log format");
}

void write_event_log(std::ostream& out, const std::vector<RawEvent>& events, LogFormat format) {
  if (format == LogFormat::csv) {
    out << "forum_id,post_id,author_id,timestamp,parent_post_id\n";
    for (const auto& ev : events) {
      out << csv_escape(ev.forum_id) << ',' << csv_escape(ev.post_id) << ','
          << csv_escape(ev.author_id) << ',' << ev.timestamp << ','
          << csv_escape(ev.parent_post_id.value_or("")) << '\n';
    }
    return;
  }
  for (const auto& ev : events) {
    nlohmann::ordered_json obj;
    obj["forum_id"] = ev.forum_id;
    obj["post_id"] = ev.post_id;
    obj["author_id"] = ev.author_id;
    obj["timestamp"] = ev.timestamp;
    if (ev.parent_post_id)
      obj["parent_post_id"] = *ev.parent_post_id;
    else
      obj["parent_post_id"] = nullptr;
    out << obj.dump() << '\n';
  }
}

ValidatedForums resolve_and_validate(std::vector<RawEvent> events, const ValidationOptions& options) {
  const bool strict = options.policy == ValidationPolicy::strict;
  ValidatedForums result;

  for (auto& ev : events) {
    if (options.dataset_window && !options.dataset_window->contains(ev.timestamp)) {
      const auto msg = fmt::format("forum '{}' post '{}': timestamp {} outside dataset window",
                                   ev.forum_id, ev.post_id, ev.timestamp);
      if (strict) throw DataError(msg);
      result.warnings.push_back(msg + "; dropped");
      continue;
    }
    result.forums[ev.forum_id].push_back(std::move(ev));
  }

  for (auto& [forum, list] : result.forums) {
    std::unordered_map<std::string, std::size_t> by_id;
    by_id.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!by_id.emplace(list[i].post_id, i).second)
        throw DataError(fmt::format("forum '{}': duplicate post_id '{}'", forum, list[i].post_id));
    }
    for (auto& ev : list) {
      if (!ev.parent_post_id) continue;
      auto it = by_id.find(*ev.parent_post_id);
      if (it == by_id.end()) {
        const auto msg = fmt::format("forum '{}' post '{}': dangling parent '{}'", forum,
                                     ev.post_id, *ev.parent_post_id);
        if (strict) throw DataError(msg);
        result.warnings.push_back(msg + "; treated as thread starter");
        ev.parent_post_id.reset();
        continue;
      }
      const auto& parent = list[it->second];
      if (parent.timestamp > ev.timestamp) {
        const auto msg = fmt::format("forum '{}' post '{}': parent '{}' is newer than the reply",
                                     forum, ev.post_id, parent.post_id);
        if (strict) throw DataError(msg);
        result.warnings.push_back(msg + "; treated as thread starter");
        ev.parent_post_id.reset();
      }
    }
    std::sort(list.begin(), list.end(), [](const RawEvent& a, const RawEvent& b) {
      return std::tie(a.timestamp, a.post_id) < std::tie(b.timestamp, b.post_id);
    });
  }
  return result;
}

std::set<std::string> sample_users(const std::set<std::string>& user_ids, double fraction,
                                   std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument(fmt::format("sample fraction {} outside (0, 1]", fraction));
  const auto n = user_ids.size();
  const auto k = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5)));
  if (k == n) return user_ids;

  std::vector<std::string> pool(user_ids.begin(), user_ids.end());
  SeededRng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  return {std::make_move_iterator(pool.begin()),
          std::make_move_iterator(pool.begin() + static_cast<std::ptrdiff_t>(k))};
}

RegistrationTable parse_registration_csv(std::istream& in) {
  RegistrationTable table;
  std::string line;
  std::size_t line_no = 0;
  int user_col = -1, ts_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (user_col < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (trim(fields[i]) == "user_id") user_col = static_cast<int>(i);
        if (trim(fields[i]) == "registration_timestamp") ts_col = static_cast<int>(i);
      }
      if (user_col < 0 || ts_col < 0)
        throw DataError("registration CSV header must contain user_id,registration_timestamp");
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max(user_col, ts_col));
    if (fields.size() <= need)
      throw DataError(fmt::format("registration CSV line {}: too few fields", line_no));
    const auto user = std::string(trim(fields[static_cast<std::size_t>(user_col)]));
    if (user.empty()) throw DataError(fmt::format("registration CSV line {}: empty user_id", line_no));
    try {
      table[user] = parse_timestamp(fields[static_cast<std::size_t>(ts_col)]);
    } catch (const DataError& e) {
      throw DataError(fmt::format("registration CSV line {}: {}", line_no, e.what()));
    }
  }
  return table;
}

std::set<std::string> authors_of(const std::vector<RawEvent>& forum_events) {
  std::set<std::string> out;
  for (const auto& ev : forum_events) out.insert(ev.author_id);
  return out;
}

RegistrationScope scope_registration(const std::vector<RawEvent>& forum_events,
                                     const RegistrationTable* registrations,
                                     const std::optional<TimeWindow>& window,
                                     ValidationPolicy policy) {
  std::map<std::string, Timestamp> first_post;
  for (const auto& ev : forum_events) {
    auto [it, inserted] = first_post.emplace(ev.author_id, ev.timestamp);
    if (!inserted) it->second = std::min(it->second, ev.timestamp);
  }

  RegistrationScope scope;
  for (const auto& [user, first] : first_post) {
    Timestamp t0 = first;
    if (registrations) {
      if (auto it = registrations->find(user); it != registrations->end()) {
        if (it->second > first) {
          const auto msg = fmt::format("user '{}': registration {} after first post {}", user,
                                       it->second, first);
          if (policy == ValidationPolicy::strict) throw DataError(msg);
          scope.warnings.push_back(msg + "; using first post time");
        } else {
          t0 = it->second;
        }
      }
    }
    if (window && !window->contains(t0)) continue;
    scope.registration.emplace(user, t0);
    scope.retained.insert(user);
  }
  return scope;
}

}  // namespace forumpaths
